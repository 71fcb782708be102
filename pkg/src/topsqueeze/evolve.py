"""Propagation of Gaussian states along a waveguide array.

Mode operators evolve linearly, ``a(z) = U(z) a(0)`` with
``U(z) = Q exp(-i H~ z) Q^dag``, so the correlation matrices transform as
``N(z) = conj(U) N(0) U^T`` and ``M(z) = U M(0) U^T``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np
from scipy.linalg import block_diag

from .exceptions import InvalidConfigError, ShapeError
from .gaussian import GaussianState, max_squeezing_db, photon_number
from .lattice import Hamiltonian, diagonalize

__all__ = [
    "Propagator",
    "ZGrid",
    "Evolution",
    "propagator",
    "evolve",
    "evolve_two_lattices",
    "two_lattice_propagator",
    "evolve_stacked",
    "sweep",
    "write_sweep_csv",
]


@dataclass(frozen=True)
class Propagator:
    umat: np.ndarray
    z: float

    def __post_init__(self):
        u = np.array(self.umat, dtype=complex)
        u.setflags(write=False)
        object.__setattr__(self, "umat", u)

    @property
    def k(self) -> int:
        return self.umat.shape[0]

    def unitarity_error(self) -> float:
        return float(np.abs(self.umat.conj().T @ self.umat - np.eye(self.k)).max())

    def __matmul__(self, other: "Propagator") -> "Propagator":
        return Propagator(self.umat @ other.umat, self.z + other.z)


@dataclass(frozen=True)
class ZGrid:
    """Uniform samples of ``[0, z_max]`` including both ends."""

    z_max: float = 10.0
    steps: int = 201

    def __post_init__(self):
        if not self.z_max > 0:
            raise InvalidConfigError(f"z_max must be positive, got {self.z_max!r}")
        if self.steps < 2:
            raise InvalidConfigError(f"steps must be >= 2, got {self.steps!r}")

    @property
    def samples(self) -> np.ndarray:
        return np.linspace(0.0, self.z_max, self.steps)


class Evolution:
    """Diagonalize once, then build propagators for any ``z`` cheaply."""

    def __init__(self, h: Union[Hamiltonian, np.ndarray]):
        self.evals, self.q = diagonalize(h)

    def propagator(self, z: float) -> Propagator:
        if z < 0:
            raise InvalidConfigError(f"z must be >= 0, got {z!r}")
        u = (self.q * np.exp(-1j * self.evals * z)) @ self.q.conj().T
        return Propagator(u, float(z))

    def propagators(self, zs: Sequence[float]) -> Iterator[Propagator]:
        for z in zs:
            yield self.propagator(z)

    def stacked(self, zs: Sequence[float]) -> np.ndarray:
        """``U(z)`` for every ``z`` as one ``(len(zs), k, k)`` array."""
        phases = np.exp(-1j * np.outer(np.asarray(zs, dtype=float), self.evals))
        return np.einsum("ik,zk,jk->zij", self.q, phases, self.q.conj())


def propagator(h: Union[Hamiltonian, np.ndarray], z: float) -> Propagator:
    return Evolution(h).propagator(z)


def _psd_factor(nmat: np.ndarray) -> np.ndarray:
    """``B`` with ``N = B B^dag``; N is a Gram matrix, so it is PSD."""
    w, v = np.linalg.eigh(nmat)
    # eigenvalues at the solver's rounding floor are zero in exact arithmetic
    floor = nmat.shape[0] * np.finfo(float).eps * max(np.abs(w).max(), 1e-300)
    return v * np.sqrt(np.where(w > floor, w, 0.0))


def evolve(state: GaussianState, u: Union[Propagator, np.ndarray]) -> GaussianState:
    umat = u.umat if isinstance(u, Propagator) else np.asarray(u)
    if umat.shape != (state.k, state.k):
        raise ShapeError(f"propagator shape {umat.shape} does not match {state.k} modes")
    # N through its factor: rounding enters squared and photon numbers stay >= 0
    b = umat.conj() @ _psd_factor(state.nmat)
    nmat = b @ b.conj().T
    mmat = umat @ state.mmat @ umat.T
    return GaussianState(0.5 * (nmat + nmat.conj().T), 0.5 * (mmat + mmat.T))


def two_lattice_propagator(ua: Propagator, ub: Propagator) -> Propagator:
    return Propagator(block_diag(ua.umat, ub.umat), ua.z)


def evolve_two_lattices(
    state: GaussianState,
    ha: Union[Hamiltonian, np.ndarray],
    hb: Union[Hamiltonian, np.ndarray],
    z: float,
) -> GaussianState:
    """Evolve a state living on two uncoupled lattices, A first then B."""
    ua, ub = propagator(ha, z), propagator(hb, z)
    if ua.k + ub.k != state.k:
        raise ShapeError(f"lattices have {ua.k} + {ub.k} modes, state has {state.k}")
    return evolve(state, two_lattice_propagator(ua, ub))


def evolve_stacked(state: GaussianState, umats: np.ndarray):
    """Batched :func:`evolve`: returns ``(N, M)`` arrays of shape ``(nz, k, k)``."""
    umats = np.asarray(umats)
    if umats.shape[1:] != (state.k, state.k):
        raise ShapeError(f"propagator shape {umats.shape[1:]} does not match {state.k} modes")
    b = umats.conj() @ _psd_factor(state.nmat)
    return b @ np.swapaxes(b.conj(), 1, 2), umats @ state.mmat @ np.swapaxes(umats, 1, 2)


def sweep(state: GaussianState, h: Union[Hamiltonian, np.ndarray], zs) -> Iterator[GaussianState]:
    """Yield the evolved state at each ``z`` in ``zs``."""
    ev = Evolution(h)
    for z in zs:
        yield evolve(state, ev.propagator(z))


def write_sweep_csv(path, state: GaussianState, h, zs) -> None:
    """Stream ``z, n_0..n_{k-1}, sdb_0.., phi_0..`` rows."""
    k = state.k
    header = (["z"] + [f"photons_{i}" for i in range(k)]
              + [f"max_db_{i}" for i in range(k)] + [f"phi_star_{i}" for i in range(k)])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for z, st in zip(zs, sweep(state, h, zs)):
            best = [max_squeezing_db(st, i) for i in range(k)]
            writer.writerow(
                [f"{z:.10g}"]
                + [f"{photon_number(st, i):.12g}" for i in range(k)]
                + [f"{b[0]:.12g}" for b in best]
                + [f"{b[1]:.12g}" for b in best]
            )
