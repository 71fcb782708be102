"""Per-realization pipelines behind the figure data.

Every pipeline is a pure function of an integer seed (plus keyword
parameters), so it can be handed to :mod:`topsqueeze.ensemble` directly or via
``functools.partial``. All lattices are built in the rotating frame of their
pristine edge mode.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import List, Optional

import numpy as np

from .evolve import Evolution, evolve_stacked
from .gaussian import (
    SqueezeParam,
    VACUUM_VARIANCE,
    inject_collective,
    inject_single_mode,
    inject_two_mode,
    max_squeezing_db,
    max_two_mode_squeezing_db,
    quad_cov_from_moments,
    to_db,
    vacuum,
)
from .lattice import (
    DisorderConfig,
    Hamiltonian,
    LatticeKind,
    LatticeSpec,
    apply_disorder,
    build_hamiltonian,
    edge_mode,
    rotating_frame,
)
from .quantum_info import entanglement, tmsv_min_eig

__all__ = [
    "Setup",
    "TWO_MODE_PAIRS",
    "lattice",
    "split_seed",
    "collective_rows",
    "collective_squeezing",
    "single_mode_rows",
    "single_mode_propagation",
    "quadrature_rows",
    "edge_covariances",
    "two_lattice_rows",
    "two_lattice_propagation",
    "two_lattice_edge_covariance",
    "teleport_resource",
]

# pairs with waveguide 0 reported for two-mode squeezing
TWO_MODE_PAIRS = {LatticeKind.SSH: ((0, 2), (0, 4)), LatticeKind.IMPURITY: ((0, 1), (0, 2))}


@dataclass(frozen=True)
class Setup:
    """Physical parameters shared by all figures."""

    alpha: float = 0.3
    r: float = 0.9
    theta: float = 0.0
    sites: int = 15
    z_max: float = 10.0
    z_steps: int = 201
    teleport_z: float = 20.0

    @property
    def xi(self) -> SqueezeParam:
        return SqueezeParam(self.r, self.theta)

    @property
    def zs(self) -> np.ndarray:
        return np.linspace(0.0, self.z_max, self.z_steps)

    def to_dict(self) -> dict:
        return asdict(self)


def split_seed(seed: int, n: int) -> List[int]:
    """Independent child seeds, e.g. one per lattice of a pair."""
    return [int(s) for s in np.random.SeedSequence(int(seed)).generate_state(n, dtype=np.uint64)]


def lattice(kind, setup: Setup, disorder: Optional[str] = None, width: float = 0.0, seed: int = 0) -> Hamiltonian:
    """Rotating-frame Hamiltonian, disordered if ``disorder`` is given."""
    spec = rotating_frame(LatticeSpec(kind, setup.sites, setup.alpha))
    h = build_hamiltonian(spec)
    if disorder is not None and width > 0:
        h = apply_disorder(h, DisorderConfig(disorder, width, seed))
    return h


def _db_of(nd, md):
    return to_db(VACUUM_VARIANCE * (1 + 2 * np.real(nd) - 2 * np.abs(md)))


# --- squeezed eigenmode ---------------------------------------------------------------

def collective_rows(kind, sites: int) -> List[str]:
    kind = LatticeKind(kind)
    return [f"S_{n}" for n in range(sites)] + [f"S_{a},{b}" for a, b in TWO_MODE_PAIRS[kind]]


def collective_squeezing(seed: int, kind, setup: Setup = Setup(), disorder=None, width: float = 0.0) -> np.ndarray:
    """Maximal one-mode squeezing at every site and two-mode squeezing for the
    reference pairs, after squeezing the (numerically found) edge mode."""
    kind = LatticeKind(kind)
    h = lattice(kind, setup, disorder, width, seed)
    state = inject_collective(edge_mode(h), setup.xi)
    one = [max_squeezing_db(state, n)[0] for n in range(state.k)]
    two = [max_two_mode_squeezing_db(state, a, b)[0] for a, b in TWO_MODE_PAIRS[kind]]
    return np.array(one + two)


# --- single-mode squeezing injected at waveguide 0 ----------------------------------

def single_mode_rows(kind, sites: int) -> List[str]:
    kind = LatticeKind(kind)
    return (
        ["var_X1_0", "var_X2_0"]
        + [f"photons_{n}" for n in range(sites)]
        + [f"max_db_{n}" for n in range(sites)]
        + [f"max_db_{a},{b}" for a, b in TWO_MODE_PAIRS[kind]]
    )


def _evolved_single(seed, kind, setup, disorder, width, zs):
    h = lattice(kind, setup, disorder, width, seed)
    state = inject_single_mode(vacuum(setup.sites), 0, setup.xi)
    return evolve_stacked(state, Evolution(h).stacked(zs))


def single_mode_propagation(seed: int, kind, setup: Setup = Setup(), disorder=None, width: float = 0.0) -> np.ndarray:
    """Observables along ``z`` for squeezed vacuum injected into waveguide 0.

    Rows follow :func:`single_mode_rows`: X1/X2 variances at waveguide 0,
    per-site photon numbers in units of the injected photon number, per-site
    maximal squeezing, then two-mode squeezing for the reference pairs.
    """
    kind = LatticeKind(kind)
    nz, mz = _evolved_single(seed, kind, setup, disorder, width, setup.zs)
    nd = np.real(np.diagonal(nz, axis1=1, axis2=2))
    md = np.diagonal(mz, axis1=1, axis2=2)
    rows = [
        VACUUM_VARIANCE * (1 + 2 * nd[:, 0] + 2 * md[:, 0].real),
        VACUUM_VARIANCE * (1 + 2 * nd[:, 0] - 2 * md[:, 0].real),
    ]
    rows += list((nd / setup.xi.photons).T)
    rows += list(_db_of(nd, md).T)
    for a, b in TWO_MODE_PAIRS[kind]:
        nb = 0.5 * (nd[:, a] + nd[:, b] + 2 * np.real(nz[:, a, b]))
        mb = 0.5 * (md[:, a] + md[:, b] + 2 * mz[:, a, b])
        rows.append(_db_of(nb, mb))
    return np.array(rows)


def quadrature_rows(seed: int, kind, setup: Setup = Setup(), disorder=None, width: float = 0.0) -> np.ndarray:
    """``(var_X1, var_X2, max_db)`` at waveguide 0 along ``z``."""
    full = single_mode_propagation(seed, kind, setup, disorder, width)
    return full[[0, 1, 2 + setup.sites]]


def edge_covariances(seed: int, kind, setup: Setup = Setup(), disorder=None, width: float = 0.0, zs=None) -> np.ndarray:
    """2x2 quadrature covariance of waveguide 0 at each ``z``; shape ``(nz, 2, 2)``."""
    zs = setup.zs if zs is None else np.asarray(zs, dtype=float)
    nz, mz = _evolved_single(seed, LatticeKind(kind), setup, disorder, width, zs)
    return quad_cov_from_moments(nz[:, :1, :1], mz[:, :1, :1])


# --- two-mode squeezing shared between lattices A and B ----------------------------

def two_lattice_rows() -> List[str]:
    return ["var_X1", "var_X2", "max_db", "entanglement", "entanglement_norm"]


def _two_lattice_moments(seed, kind, setup, disorder, width, zs):
    seed_a, seed_b = split_seed(seed, 2)
    ha = lattice(kind, setup, disorder, width, seed_a)
    hb = lattice(kind, setup, disorder, width, seed_b)
    k = setup.sites
    state = inject_two_mode(vacuum(2 * k), 0, k, setup.xi)
    ua, ub = Evolution(ha).stacked(zs), Evolution(hb).stacked(zs)
    u = np.zeros((len(zs), 2 * k, 2 * k), dtype=complex)
    u[:, :k, :k] = ua
    u[:, k:, k:] = ub
    nz, mz = evolve_stacked(state, u)
    idx = np.array([0, k])
    return nz[:, idx[:, None], idx], mz[:, idx[:, None], idx]


def two_lattice_propagation(seed: int, kind, setup: Setup = Setup(), disorder=None, width: float = 0.0) -> np.ndarray:
    """Two-mode squeezing and entanglement between the edge waveguides a0, b0.

    Rows follow :func:`two_lattice_rows`; the first three are in the layout
    expected by :func:`topsqueeze.ensemble.quadrature_phase_statistics`.
    """
    nsub, msub = _two_lattice_moments(seed, LatticeKind(kind), setup, disorder, width, setup.zs)
    nb = 0.5 * (nsub[:, 0, 0] + nsub[:, 1, 1] + 2 * nsub[:, 0, 1]).real
    mb = 0.5 * (msub[:, 0, 0] + msub[:, 1, 1] + 2 * msub[:, 0, 1])
    ent = entanglement(quad_cov_from_moments(nsub, msub))
    return np.array([
        VACUUM_VARIANCE * (1 + 2 * nb + 2 * mb.real),
        VACUUM_VARIANCE * (1 + 2 * nb - 2 * mb.real),
        _db_of(nb, mb),
        ent,
        ent / abs(tmsv_min_eig(setup.r)),
    ])


def two_lattice_edge_covariance(seed: int, kind, setup: Setup = Setup(), disorder=None, width: float = 0.0, z=None) -> np.ndarray:
    """4x4 covariance of ``(a0, b0)`` at distance ``z`` (default ``setup.teleport_z``)."""
    z = setup.teleport_z if z is None else z
    nsub, msub = _two_lattice_moments(seed, LatticeKind(kind), setup, disorder, width, [z])
    return quad_cov_from_moments(nsub[0], msub[0])


def teleport_resource(seed: int, kind, setup: Setup = Setup(), disorder=None, width: float = 0.0):
    """Reduced ``(a0, b0)`` covariance at ``setup.teleport_z`` as a teleportation resource."""
    from .teleport import TeleportResource

    return TeleportResource(two_lattice_edge_covariance(seed, kind, setup, disorder, width))
