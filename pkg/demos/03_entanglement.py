"""
Entangling two lattices
=======================

A two-mode squeezed vacuum is launched into the edge waveguides of two
identical chains, A and B. We follow the partial-transpose eigenvalue of
(a0, b0): negative means entangled, and -1 in normalized units means the
input state is untouched.
"""

# %%
from functools import partial

import numpy as np

from topsqueeze import EnsemblePlan
from topsqueeze.ensemble import run_realizations
from topsqueeze.experiments import Setup, two_lattice_propagation, two_lattice_rows

setup = Setup()
rows = two_lattice_rows()
norm = rows.index("entanglement_norm")
plan = EnsemblePlan(sextets=10, group_size=6, master_seed=5)

# %%
for kind in ("ssh", "impurity"):
    pristine = two_lattice_propagation(0, kind, setup)[norm]
    fn = partial(two_lattice_propagation, kind=kind, setup=setup, disorder="hopping", width=0.6)
    noisy = run_realizations(plan, fn)[:, :, norm].reshape(-1, setup.z_steps)
    print(f"{kind:9s} normalized entanglement at z=10: pristine {pristine[-1]:6.3f}, "
          f"hopping disorder {noisy[:, -1].mean():6.3f} +/- {noisy[:, -1].std():.3f}")
    print(f"          least entangled point along z (pristine): {pristine.max():6.3f} at z={setup.zs[np.argmax(pristine)]:.2f}")
