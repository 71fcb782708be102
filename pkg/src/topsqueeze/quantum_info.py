"""Entanglement (partial-transpose criterion) and phase-space Wigner functions."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from .exceptions import DegenerateCovarianceError, GridMismatchError, ShapeError
from .gaussian import symplectic_form

__all__ = [
    "PhaseGrid",
    "WignerField",
    "EntanglementResult",
    "entanglement",
    "entanglement_result",
    "tmsv_min_eig",
    "gaussian_density",
    "wigner_gaussian",
    "wigner_fock1",
    "wigner_coherent",
    "ensemble_average_wigner",
    "write_wigner_csv",
    "read_wigner_csv",
]

_PT = np.diag([1.0, 1.0, 1.0, -1.0])


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform ``resolution x resolution`` grid over a rectangle of phase space."""

    q_min: float = -6.0
    q_max: float = 6.0
    p_min: float = -6.0
    p_max: float = 6.0
    resolution: int = 241

    def __post_init__(self):
        if self.resolution < 2 or not (self.q_max > self.q_min and self.p_max > self.p_min):
            raise ValueError(f"degenerate phase-space grid {self}")

    @classmethod
    def symmetric(cls, extent: float = 6.0, resolution: int = 241) -> "PhaseGrid":
        return cls(-extent, extent, -extent, extent, resolution)

    def _axis(self, lo: float, hi: float) -> np.ndarray:
        # antisymmetrized unit axis: symmetric ranges mirror exactly about 0
        t = np.linspace(-1.0, 1.0, self.resolution)
        t = 0.5 * (t - t[::-1])
        return 0.5 * (lo + hi) + 0.5 * (hi - lo) * t

    @property
    def q(self) -> np.ndarray:
        return self._axis(self.q_min, self.q_max)

    @property
    def p(self) -> np.ndarray:
        return self._axis(self.p_min, self.p_max)

    @property
    def dq(self) -> float:
        return (self.q_max - self.q_min) / (self.resolution - 1)

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / (self.resolution - 1)

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        """``(Q, P)`` with ``Q[i, j] = q[i]`` and ``P[i, j] = p[j]``."""
        return np.meshgrid(self.q, self.p, indexing="ij")

    def integrate(self, values: np.ndarray) -> float:
        return float(trapezoid(trapezoid(values, dx=self.dp, axis=1), dx=self.dq))

    def origin_index(self) -> Tuple[int, int]:
        i, j = int(np.argmin(np.abs(self.q))), int(np.argmin(np.abs(self.p)))
        if abs(self.q[i]) > 1e-12 or abs(self.p[j]) > 1e-12:
            raise ValueError("grid does not contain the phase-space origin")
        return i, j


@dataclass(frozen=True)
class WignerField:
    """Scalar field sampled on a :class:`PhaseGrid`; ``values[i, j]`` at ``(q[i], p[j])``."""

    values: np.ndarray
    grid: PhaseGrid

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.resolution, self.grid.resolution):
            raise ShapeError(f"field shape {v.shape} does not match grid resolution {self.grid.resolution}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def integral(self) -> float:
        return self.grid.integrate(self.values)

    def at_origin(self) -> float:
        return float(self.values[self.grid.origin_index()])

    def overlap(self, other: "WignerField") -> float:
        """``pi * integral(W1 * W2)``; the state fidelity when one state is pure."""
        if other.grid != self.grid:
            raise GridMismatchError("fields live on different grids")
        return np.pi * self.grid.integrate(self.values * other.values)

    def moments(self) -> np.ndarray:
        """Second-moment matrix of the field in ``(q, p)``."""
        qq, pp = self.grid.mesh()
        integ = self.grid.integrate
        norm = integ(self.values)
        mq, mp = integ(qq * self.values) / norm, integ(pp * self.values) / norm
        dq, dp = qq - mq, pp - mp
        cqq = integ(dq * dq * self.values) / norm
        cpp = integ(dp * dp * self.values) / norm
        cqp = integ(dq * dp * self.values) / norm
        return np.array([[cqq, cqp], [cqp, cpp]])


@dataclass(frozen=True)
class EntanglementResult:
    min_eig: float
    normalized: float


def entanglement(v: np.ndarray):
    """Minimum eigenvalue of the partially transposed ``V~ - Lambda``.

    ``v`` is a two-mode covariance ordered ``(q_a, p_a, q_b, p_b)``, or a
    stack of them. Negative values mean the state is not separable.
    """
    v = np.asarray(v, dtype=float)
    if v.shape[-2:] != (4, 4):
        raise ShapeError(f"entanglement needs a 4x4 covariance, got {v.shape}")
    vt = _PT @ v @ _PT
    lam = 0.25j * symplectic_form(2)
    out = np.linalg.eigvalsh(vt - lam)[..., 0]
    return float(out) if out.ndim == 0 else out


def tmsv_min_eig(r: float) -> float:
    """Reference value for a two-mode squeezed vacuum of magnitude ``r``."""
    return (np.exp(-2 * r) - 1) / 4


def entanglement_result(v: np.ndarray, r_ref: float) -> EntanglementResult:
    """Entanglement measure plus its value in units of ``|min_eig|`` of the input TMSV."""
    e = entanglement(v)
    ref = abs(tmsv_min_eig(r_ref))
    return EntanglementResult(e, e / ref if ref > 0 else float("nan"))


def gaussian_density(v: np.ndarray, chi: np.ndarray) -> np.ndarray:
    """Zero-mean Gaussian Wigner function of covariance ``v`` at points ``chi[..., 2k]``."""
    v = np.asarray(v, dtype=float)
    dim = v.shape[0]
    evals = np.linalg.eigvalsh(v)
    if evals.min() <= 1e-14 * max(evals.max(), 1.0):
        raise DegenerateCovarianceError(f"covariance is not positive definite (eigenvalues {evals})")
    vinv = np.linalg.inv(v)
    norm = 1.0 / np.sqrt(np.linalg.det(v) * (2 * np.pi) ** dim)
    chi = np.asarray(chi, dtype=float)
    quad = np.einsum("...i,ij,...j->...", chi, vinv, chi)
    return norm * np.exp(-0.5 * quad)


def wigner_gaussian(v: np.ndarray, grid: Optional[PhaseGrid] = None) -> WignerField:
    """Single-mode Wigner function of a 2x2 covariance on ``grid``.

    For one mode of a larger state pass the corresponding 2x2 block of the
    covariance; tracing out the other modes is exactly that restriction.
    """
    grid = grid or PhaseGrid()
    v = np.asarray(v, dtype=float)
    if v.shape != (2, 2):
        raise ShapeError("wigner_gaussian samples single-mode (2x2) covariances; use gaussian_density for more modes")
    qq, pp = grid.mesh()
    return WignerField(gaussian_density(v, np.stack([qq, pp], axis=-1)), grid)


def wigner_fock1(grid: Optional[PhaseGrid] = None) -> WignerField:
    """Wigner function of the single-photon Fock state (vacuum variance 1/4)."""
    grid = grid or PhaseGrid()
    qq, pp = grid.mesh()
    rho2 = qq**2 + pp**2
    return WignerField((2 / np.pi) * (4 * rho2 - 1) * np.exp(-2 * rho2), grid)


def wigner_coherent(alpha: complex = 0.0, grid: Optional[PhaseGrid] = None) -> WignerField:
    """Coherent state ``|alpha>`` centred at ``(Re alpha, Im alpha)``."""
    grid = grid or PhaseGrid()
    qq, pp = grid.mesh()
    rho2 = (qq - np.real(alpha)) ** 2 + (pp - np.imag(alpha)) ** 2
    return WignerField((2 / np.pi) * np.exp(-2 * rho2), grid)


def ensemble_average_wigner(fields: Iterable[WignerField]) -> WignerField:
    fields = list(fields)
    if not fields:
        raise ValueError("no fields to average")
    grid = fields[0].grid
    if any(f.grid != grid for f in fields[1:]):
        raise GridMismatchError("cannot average fields on different grids")
    return WignerField(np.mean([f.values for f in fields], axis=0), grid)


def write_wigner_csv(field: WignerField, path) -> None:
    """Metadata header row, then one CSV row per ``q`` sample."""
    g = field.grid
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["q_min", "q_max", "p_min", "p_max", "resolution"])
        writer.writerow([repr(g.q_min), repr(g.q_max), repr(g.p_min), repr(g.p_max), g.resolution])
        for row in field.values:
            writer.writerow([f"{x:.12e}" for x in row])


def read_wigner_csv(path) -> WignerField:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    meta = dict(zip(rows[0], rows[1]))
    grid = PhaseGrid(
        float(meta["q_min"]), float(meta["q_max"]), float(meta["p_min"]), float(meta["p_max"]),
        int(meta["resolution"]),
    )
    return WignerField(np.array([[float(x) for x in r] for r in rows[2:]]), grid)
