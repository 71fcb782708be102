"""Fast self-checks behind ``topsqueeze validate``.

Each check returns a :class:`Check`; failures are reported, never raised.
The kernel builder is injectable so a deliberately wrong kernel can be
shown to fail the oracle comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .evolve import Evolution, evolve
from .experiments import Setup, lattice, teleport_resource
from .gaussian import (
    SqueezeParam,
    analytic_eigenmode_squeezing,
    full_quad_cov,
    inject_collective,
    inject_single_mode,
    inject_two_mode,
    max_squeezing_db,
    max_two_mode_squeezing_db,
    physicality_min_eig,
    quad_cov,
    symplectic_eigenvalues,
    vacuum,
)
from .lattice import LatticeKind, LatticeSpec, build_hamiltonian, edge_mode
from .quantum_info import PhaseGrid, entanglement, tmsv_min_eig, wigner_coherent, wigner_fock1
from .teleport import (
    TeleportResource,
    averaged_output_oracle,
    convolve_gaussian,
    extract_resource,
    fidelity,
    kernel_from_resource,
    tmsv_resource,
)

__all__ = ["Check", "run_validation", "format_report"]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def _eigenmode_equivalence(rng) -> Check:
    worst = 0.0
    for _ in range(100):
        alpha, r = rng.uniform(0.1, 0.7), rng.uniform(0.1, 1.5)
        kind = LatticeKind.SSH if rng.random() < 0.5 else LatticeKind.IMPURITY
        c = edge_mode(build_hamiltonian(LatticeSpec(kind, 15, alpha))).coeffs
        xi = SqueezeParam(r, 0.0)
        st = inject_collective(c, xi)
        for n in range(15):
            worst = max(worst, abs(max_squeezing_db(st, n)[0] - analytic_eigenmode_squeezing(c, xi, n)))
        for m in range(1, 15):
            worst = max(worst, abs(max_two_mode_squeezing_db(st, 0, m)[0] - analytic_eigenmode_squeezing(c, xi, 0, m)))
    return Check("eigenmode squeezing matches closed form", worst < 1e-10, f"max error {worst:.2e} dB")


def _entanglement_checks() -> Check:
    v = quad_cov(inject_two_mode(vacuum(2), 0, 1, SqueezeParam(0.9, 0.0)), [0, 1])
    err = abs(entanglement(v) - tmsv_min_eig(0.9))
    rot = max(
        abs(entanglement(quad_cov(inject_two_mode(vacuum(2), 0, 1, SqueezeParam(0.9, th)), [0, 1])) - entanglement(v))
        for th in np.linspace(0, 2 * np.pi, 13)
    )
    return Check("TMSV entanglement and phase invariance", err < 1e-9 and rot < 1e-10,
                 f"value error {err:.2e}, rotation spread {rot:.2e}")


def _evolution_invariants(rng) -> Check:
    setup = Setup()
    worst = dict(unitarity=0.0, photons=0.0, physicality=0.0, purity=0.0)
    for kind in LatticeKind:
        for disorder in (None, "hopping", "onsite"):
            h = lattice(kind, setup, disorder, 0.6, int(rng.integers(2**32)))
            st0 = inject_single_mode(vacuum(setup.sites), 0, setup.xi)
            n0 = np.trace(st0.nmat).real
            ev = Evolution(h)
            for z in (0.5, 3.0, 10.0):
                u = ev.propagator(z)
                st = evolve(st0, u)
                v = full_quad_cov(st)
                worst["unitarity"] = max(worst["unitarity"], u.unitarity_error())
                worst["photons"] = max(worst["photons"], abs(np.trace(st.nmat).real - n0) / n0)
                worst["physicality"] = min(worst["physicality"], physicality_min_eig(v))
                worst["purity"] = max(worst["purity"], np.abs(symplectic_eigenvalues(v) - 0.25).max())
    ok = (worst["unitarity"] < 1e-10 and worst["photons"] < 1e-10
          and worst["physicality"] >= -1e-10 and worst["purity"] < 1e-9)
    return Check("unitarity, photon number, physicality, purity", ok,
                 ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def _sublattice(rng, seeds: int = 30) -> Check:
    setup = Setup()
    worst = 0.0
    for _ in range(seeds):
        c = edge_mode(lattice(LatticeKind.SSH, setup, "hopping", 0.6, int(rng.integers(2**32)))).coeffs
        worst = max(worst, float(np.sum(np.abs(c[1::2]) ** 2)))
    return Check("hopping-disordered edge mode stays on even sites", worst < 1e-20, f"max odd weight {worst:.1e}")


def _oracle(kernel_fn) -> Check:
    grid = PhaseGrid.symmetric(4.0, 81)
    w_in = wigner_fock1(grid)
    rms = 0.0
    # lattice resources give isotropic kernels; the product of two squeezed
    # vacua at different angles does not, so sign errors show up there
    skew = inject_single_mode(inject_single_mode(vacuum(2), 0, SqueezeParam(0.5, 0.6)), 1, SqueezeParam(0.3, 1.9))
    for res in (teleport_resource(7, LatticeKind.SSH, Setup(), "hopping", 0.6), extract_resource(skew, 0, 1)):
        fast = convolve_gaussian(w_in, [kernel_fn(res)])
        slow = averaged_output_oracle(w_in, res, quad_extent=7.0, quad_step=0.1, kernel_extent=4.0)
        rms = max(rms, float(np.sqrt(np.mean((fast.values - slow.values) ** 2))))
    return Check("convolution kernel matches integrated protocol", rms < 1e-6, f"RMS {rms:.2e}")


def _calibration(kernel_fn) -> Check:
    grid = PhaseGrid()
    coh = wigner_coherent(0.0, grid)
    f_coh = fidelity(coh, convolve_gaussian(coh, [kernel_fn(tmsv_resource(0.0))]))
    fock = wigner_fock1(grid)
    f_fock = fidelity(fock, convolve_gaussian(fock, [kernel_fn(tmsv_resource(3.0))]))
    ok = abs(f_coh - 0.5) <= 2e-3 and f_fock > 0.98
    return Check("classical limit and strong-squeezing limit", ok, f"coherent F {f_coh:.4f}, Fock-1 F {f_fock:.4f}")


def run_validation(
    kernel_fn: Callable[[TeleportResource], object] = kernel_from_resource,
    seed: int = 12345,
) -> List[Check]:
    rng = np.random.default_rng(seed)
    checks = [
        _eigenmode_equivalence(rng),
        _entanglement_checks(),
        _evolution_invariants(rng),
        _sublattice(rng),
        _oracle(kernel_fn),
        _calibration(kernel_fn),
    ]
    return checks


def format_report(checks: List[Check]) -> str:
    lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}" for c in checks]
    n = sum(c.passed for c in checks)
    lines.append(f"{n}/{len(checks)} checks passed")
    return "\n".join(lines)
