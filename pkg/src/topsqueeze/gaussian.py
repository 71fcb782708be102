"""Zero-mean Gaussian states in the (N, M) correlation-matrix representation.

A state of ``k`` bosonic modes is fixed by ``N[n, m] = <a_n^dag a_m>`` and
``M[n, m] = <a_n a_m>``. Quadratures follow
``X_n(phi) = (exp(-i phi) a_n + exp(i phi) a_n^dag) / 2`` so that the vacuum
variance is 1/4, and squeezing is reported in dB relative to that value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from .exceptions import InvalidModeError, ModeConflictError, ShapeError

__all__ = [
    "VACUUM_VARIANCE",
    "SqueezeParam",
    "GaussianState",
    "vacuum",
    "inject_single_mode",
    "inject_two_mode",
    "inject_collective",
    "quad_cov",
    "quad_cov_from_moments",
    "full_quad_cov",
    "symplectic_form",
    "physicality_min_eig",
    "symplectic_eigenvalues",
    "variance",
    "squeezing_db",
    "max_squeezing_db",
    "two_mode_variance",
    "two_mode_squeezing_db",
    "max_two_mode_squeezing_db",
    "analytic_eigenmode_squeezing",
    "photon_number",
    "to_db",
    "write_state_csv",
    "read_state_csv",
]

VACUUM_VARIANCE = 0.25
_DB_FLOOR = 1e-15


@dataclass(frozen=True)
class SqueezeParam:
    """Squeezing parameter ``xi = r * exp(i * theta)``."""

    r: float
    theta: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.r) or self.r < 0:
            raise ValueError(f"squeezing magnitude must be >= 0, got {self.r!r}")
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "theta", float(np.mod(self.theta, 2 * np.pi)))

    @property
    def xi(self) -> complex:
        return self.r * np.exp(1j * self.theta)

    @property
    def pair_amplitude(self) -> complex:
        """``<a a>`` (or ``<a b>``) of the squeezed vacuum."""
        return -np.exp(1j * self.theta) * np.sinh(self.r) * np.cosh(self.r)

    @property
    def photons(self) -> float:
        return float(np.sinh(self.r) ** 2)


@dataclass(frozen=True)
class GaussianState:
    """Zero-mean Gaussian state; ``nmat`` Hermitian, ``mmat`` symmetric."""

    nmat: np.ndarray
    mmat: np.ndarray

    def __post_init__(self):
        n = np.array(self.nmat, dtype=complex)
        m = np.array(self.mmat, dtype=complex)
        if n.ndim != 2 or n.shape[0] != n.shape[1] or m.shape != n.shape:
            raise ShapeError(f"N and M must be equal square matrices, got {n.shape} and {m.shape}")
        n.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "nmat", n)
        object.__setattr__(self, "mmat", m)

    @property
    def k(self) -> int:
        return self.nmat.shape[0]

    def is_valid(self, atol: float = 1e-12) -> bool:
        return bool(
            np.allclose(self.nmat, self.nmat.conj().T, atol=atol)
            and np.allclose(self.mmat, self.mmat.T, atol=atol)
        )

    def total_photons(self) -> float:
        return float(np.trace(self.nmat).real)

    def _is_vacuum_mode(self, n: int) -> bool:
        return not (
            np.any(self.nmat[n, :]) or np.any(self.nmat[:, n])
            or np.any(self.mmat[n, :]) or np.any(self.mmat[:, n])
        )


def vacuum(k: int) -> GaussianState:
    if k < 1:
        raise InvalidModeError(f"mode count must be >= 1, got {k}")
    z = np.zeros((k, k), dtype=complex)
    return GaussianState(z, z)


def _check_index(state: GaussianState, n: int) -> int:
    if not (0 <= n < state.k) or int(n) != n:
        raise InvalidModeError(f"mode index {n!r} out of range for {state.k} modes")
    return int(n)


def inject_single_mode(state: GaussianState, n: int, xi: SqueezeParam) -> GaussianState:
    """Apply the single-mode squeezer to vacuum mode ``n``."""
    n = _check_index(state, n)
    if not state._is_vacuum_mode(n):
        raise ModeConflictError(f"mode {n} is not in vacuum")
    nm, mm = np.array(state.nmat), np.array(state.mmat)
    nm[n, n] = xi.photons
    mm[n, n] = xi.pair_amplitude
    return GaussianState(nm, mm)


def inject_two_mode(state: GaussianState, n: int, m: int, xi: SqueezeParam) -> GaussianState:
    """Apply the two-mode squeezer to vacuum modes ``n`` and ``m``."""
    n, m = _check_index(state, n), _check_index(state, m)
    if n == m:
        raise InvalidModeError("two-mode squeezing needs two distinct modes")
    for j in (n, m):
        if not state._is_vacuum_mode(j):
            raise ModeConflictError(f"mode {j} is not in vacuum")
    nm, mm = np.array(state.nmat), np.array(state.mmat)
    nm[n, n] = nm[m, m] = xi.photons
    mm[n, m] = mm[m, n] = xi.pair_amplitude
    return GaussianState(nm, mm)


def inject_collective(coeffs, xi: SqueezeParam, atol: float = 1e-10) -> GaussianState:
    """Squeezed vacuum of the collective mode ``A = sum_n c_n a_n``.

    ``coeffs`` may be an :class:`~topsqueeze.lattice.EdgeMode` or a vector.
    """
    c = np.asarray(getattr(coeffs, "coeffs", coeffs), dtype=complex)
    if c.ndim != 1:
        raise InvalidModeError("mode coefficients must be a vector")
    if abs(np.vdot(c, c).real - 1.0) > atol:
        raise InvalidModeError(f"mode coefficients must be normalized, |c|^2 = {np.vdot(c, c).real}")
    nm = np.outer(c, c.conj()) * xi.photons
    mm = np.outer(c.conj(), c.conj()) * xi.pair_amplitude
    return GaussianState(nm, mm)


def quad_cov_from_moments(nsub: np.ndarray, msub: np.ndarray) -> np.ndarray:
    """Quadrature covariance from ``(..., k, k)`` blocks of N and M.

    Leading dimensions are treated as a batch.
    """
    nsub, msub = np.asarray(nsub), np.asarray(msub)
    k = nsub.shape[-1]
    phis = np.array([0.0, np.pi / 2])
    e_sum = np.exp(-1j * (phis[:, None] + phis[None, :]))
    e_diff = np.exp(1j * (phis[:, None] - phis[None, :]))
    cos_diff = np.cos(phis[:, None] - phis[None, :])
    # v[..., n, i, m, j] for mode pair (n, m) and phases (phi_i, phi_j)
    v = (
        2 * np.real(msub[..., :, None, :, None] * e_sum[:, None, :])
        + 2 * np.real(nsub[..., :, None, :, None] * e_diff[:, None, :])
        + np.eye(k)[:, None, :, None] * cos_diff[:, None, :]
    ) / 4
    v = v.reshape(nsub.shape[:-2] + (2 * k, 2 * k))
    return 0.5 * (v + np.swapaxes(v, -1, -2))


def quad_cov(state: GaussianState, modes: Sequence[int]) -> np.ndarray:
    """Symmetrized quadrature covariance over ``modes``.

    Ordering is ``(X_m1(0), X_m1(pi/2), X_m2(0), X_m2(pi/2), ...)``; the result
    is real ``2k x 2k``.
    """
    modes = [_check_index(state, n) for n in modes]
    if len(set(modes)) != len(modes):
        raise InvalidModeError(f"repeated mode index in {modes}")
    idx = np.asarray(modes)
    return quad_cov_from_moments(state.nmat[np.ix_(idx, idx)], state.mmat[np.ix_(idx, idx)])


def full_quad_cov(state: GaussianState) -> np.ndarray:
    return quad_cov(state, range(state.k))


def symplectic_form(k: int) -> np.ndarray:
    """Block-diagonal ``[[0, 1], [-1, 0]]`` for ``k`` modes."""
    return np.kron(np.eye(k), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def physicality_min_eig(v: Union[np.ndarray, GaussianState]) -> float:
    """Smallest eigenvalue of ``V + (i/4) Omega``; >= 0 for physical states."""
    if isinstance(v, GaussianState):
        v = full_quad_cov(v)
    k = v.shape[0] // 2
    return float(np.linalg.eigvalsh(v + 0.25j * symplectic_form(k)).min())


def symplectic_eigenvalues(v: np.ndarray) -> np.ndarray:
    """Williamson spectrum of ``V`` (each value once, ascending); 1/4 for pure states."""
    k = v.shape[0] // 2
    ev = np.abs(np.linalg.eigvals(1j * symplectic_form(k) @ v))
    return np.sort(ev)[::2]


def to_db(var: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Variance to dB relative to vacuum, clamped away from log(0)."""
    ratio = np.maximum(np.asarray(var, dtype=float) / VACUUM_VARIANCE, _DB_FLOOR)
    out = 10.0 * np.log10(ratio)
    return float(out) if out.ndim == 0 else out


def variance(state: GaussianState, n: int, phi) -> Union[float, np.ndarray]:
    """Variance of ``X_n(phi)``; ``phi`` may be an array."""
    n = _check_index(state, n)
    phi = np.asarray(phi, dtype=float)
    out = 0.25 * (1 + 2 * state.nmat[n, n].real + 2 * np.real(np.exp(-2j * phi) * state.mmat[n, n]))
    return float(out) if out.ndim == 0 else out


def squeezing_db(state: GaussianState, n: int, phi) -> Union[float, np.ndarray]:
    return to_db(variance(state, n, phi))


def _best_quadrature(n_diag: float, m_diag: complex) -> Tuple[float, float]:
    var = 0.25 * (1 + 2 * n_diag - 2 * abs(m_diag))
    if m_diag == 0:
        return var, 0.0
    phi = np.mod((np.angle(m_diag) - np.pi) / 2, np.pi)
    return var, float(phi)


def max_squeezing_db(state: GaussianState, n: int) -> Tuple[float, float]:
    """Minimum over phi of the squeezing at mode ``n`` and its angle in [0, pi)."""
    n = _check_index(state, n)
    var, phi = _best_quadrature(state.nmat[n, n].real, state.mmat[n, n])
    return to_db(var), phi


def _pair_moments(state: GaussianState, n: int, m: int) -> Tuple[float, complex]:
    n, m = _check_index(state, n), _check_index(state, m)
    if n == m:
        raise InvalidModeError("two-mode quadrature needs two distinct modes")
    # moments of the mode b = (a_n + a_m) / sqrt(2)
    nb = 0.5 * (state.nmat[n, n] + state.nmat[m, m] + 2 * state.nmat[n, m].real).real
    mb = 0.5 * (state.mmat[n, n] + state.mmat[m, m] + 2 * state.mmat[n, m])
    return float(nb), complex(mb)


def two_mode_variance(state: GaussianState, n: int, m: int, phi) -> Union[float, np.ndarray]:
    """Variance of ``(X_n(phi) + X_m(phi)) / sqrt(2)``."""
    nb, mb = _pair_moments(state, n, m)
    phi = np.asarray(phi, dtype=float)
    out = 0.25 * (1 + 2 * nb + 2 * np.real(np.exp(-2j * phi) * mb))
    return float(out) if out.ndim == 0 else out


def two_mode_squeezing_db(state: GaussianState, n: int, m: int, phi) -> Union[float, np.ndarray]:
    return to_db(two_mode_variance(state, n, m, phi))


def max_two_mode_squeezing_db(state: GaussianState, n: int, m: int) -> Tuple[float, float]:
    nb, mb = _pair_moments(state, n, m)
    var, phi = _best_quadrature(nb, mb)
    return to_db(var), phi


def analytic_eigenmode_squeezing(coeffs, xi: SqueezeParam, n: int, m=None) -> float:
    """Closed-form squeezing for a squeezed collective mode.

    One mode: ``10 log10(1 - 2|c_n|^2 e^{-r} sinh r)``; pair ``(n, m)``:
    ``10 log10(1 - |c_n + c_m|^2 e^{-r} sinh r)``.
    """
    c = np.asarray(getattr(coeffs, "coeffs", coeffs), dtype=complex)
    gain = np.exp(-xi.r) * np.sinh(xi.r)
    if m is None:
        return to_db(VACUUM_VARIANCE * (1 - 2 * abs(c[n]) ** 2 * gain))
    return to_db(VACUUM_VARIANCE * (1 - abs(c[n] + c[m]) ** 2 * gain))


def photon_number(state: GaussianState, n: int) -> float:
    n = _check_index(state, n)
    return max(float(state.nmat[n, n].real), 0.0)


def write_state_csv(state: GaussianState, prefix) -> list:
    """Write ``<prefix>_{N,M}_{re,im}.csv``; returns the paths."""
    paths = []
    for name, mat in (("N", state.nmat), ("M", state.mmat)):
        for part, arr in (("re", mat.real), ("im", mat.imag)):
            path = f"{prefix}_{name}_{part}.csv"
            np.savetxt(path, arr, delimiter=",", fmt="%.17g")
            paths.append(path)
    return paths


def read_state_csv(prefix) -> GaussianState:
    def load(name):
        re = np.loadtxt(f"{prefix}_{name}_re.csv", delimiter=",", ndmin=2)
        im = np.loadtxt(f"{prefix}_{name}_im.csv", delimiter=",", ndmin=2)
        return re + 1j * im

    return GaussianState(load("N"), load("M"))
