"""
Teleporting a single photon
===========================

The entangled edge modes at z = 20 serve as the resource for unit-gain
continuous-variable teleportation of a Fock-1 state. Averaged over homodyne
outcomes, the output Wigner function is the input smeared by a Gaussian
whose width shrinks with the resource's entanglement.
"""

# %%
from functools import partial

import numpy as np

from topsqueeze import EnsemblePlan, PhaseGrid, TeleportResource, teleport_average, wigner_fock1
from topsqueeze.ensemble import run_realizations
from topsqueeze.experiments import Setup, teleport_resource, two_lattice_edge_covariance
from topsqueeze.teleport import tmsv_resource

setup = Setup()
w_in = wigner_fock1(PhaseGrid())
print(f"input W(0) = {w_in.at_origin():.4f}")

# %% Reference: the bare two-mode squeezed vacuum
for r in (0.0, 0.9, 3.0):
    rep = teleport_average(w_in, tmsv_resource(r))
    print(f"TMSV r={r}: F = {rep.fidelity:.4f}, W_out(0) = {rep.w_out.at_origin():+.4f}")

# %% Lattice resources
plan = EnsemblePlan(sextets=10, group_size=6, master_seed=11)
for kind in ("ssh", "impurity"):
    pristine = teleport_average(w_in, teleport_resource(0, kind, setup))
    fn = partial(two_lattice_edge_covariance, kind=kind, setup=setup, disorder="hopping", width=0.3)
    covs = run_realizations(plan, fn).reshape(-1, 4, 4)
    noisy = teleport_average(w_in, [TeleportResource(v) for v in covs])
    print(f"{kind:9s} pristine F = {pristine.fidelity:.4f} (negative peak kept {100 * pristine.peak_retained:.1f}%), "
          f"disordered F = {noisy.fidelity:.4f}, min W_out = {noisy.min_value:+.2e}")
