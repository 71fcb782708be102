"""Waveguide-array Hamiltonians: SSH and edge-impurity chains.

Both lattices host an exponentially localized edge mode with the same
spatial profile ``(-alpha)**n``. The SSH mode lives on even sites only and
its propagation constant is pinned to the bare-waveguide value by chiral
symmetry; the impurity mode has no such protection.

Units: the strong SSH coupling ``v`` sets the scale (``v = 1`` by default),
propagation distances are measured in ``1/v``.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from .exceptions import InvalidConfigError, InvalidSpecError

__all__ = [
    "LatticeKind",
    "DisorderKind",
    "LatticeSpec",
    "DisorderConfig",
    "Hamiltonian",
    "EdgeMode",
    "build_hamiltonian",
    "apply_disorder",
    "diagonalize",
    "edge_mode",
    "analytic_edge_mode",
    "rotating_frame",
    "band_edges",
    "load_lattice_config",
    "write_hamiltonian_csv",
    "read_hamiltonian_csv",
]


class LatticeKind(str, enum.Enum):
    SSH = "ssh"
    IMPURITY = "impurity"


class DisorderKind(str, enum.Enum):
    HOPPING = "hopping"
    ONSITE = "onsite"


def _enum(cls, value):
    if isinstance(value, cls):
        return value
    try:
        return cls(str(value).lower())
    except ValueError:
        choices = ", ".join(m.value for m in cls)
        raise InvalidSpecError(f"unknown {cls.__name__} {value!r}; expected one of {choices}")


@dataclass(frozen=True)
class LatticeSpec:
    """Pristine lattice description.

    Attributes:
        kind: SSH (dimerized) or impurity (uniform chain with an edge defect).
        sites: number of waveguides.
        alpha: ratio of weak to strong SSH hopping, ``0 < alpha < 1``.
        v: strong SSH hopping, the unit of propagation constants.
        beta: onsite propagation constant of bare waveguides (rotating frame).
    """

    kind: LatticeKind
    sites: int
    alpha: float
    v: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", _enum(LatticeKind, self.kind))
        if int(self.sites) != self.sites or self.sites < 2:
            raise InvalidSpecError(f"sites must be an integer >= 2, got {self.sites!r}")
        object.__setattr__(self, "sites", int(self.sites))
        if not 0.0 < self.alpha < 1.0:
            raise InvalidSpecError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if self.v <= 0:
            raise InvalidSpecError(f"v must be positive, got {self.v!r}")

    @property
    def u(self) -> float:
        """Weak (intra-cell) SSH hopping."""
        return self.alpha * self.v

    @property
    def w(self) -> float:
        """Uniform hopping of the impurity chain, matched to the SSH gap."""
        return self.v * self.alpha / (1.0 - self.alpha)

    @property
    def eps0(self) -> float:
        """Edge impurity detuning giving the ``(-alpha)**n`` profile."""
        return -self.w / self.alpha


@dataclass(frozen=True)
class DisorderConfig:
    """Uniform disorder of total width ``width`` centred on pristine values."""

    kind: DisorderKind
    width: float
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", _enum(DisorderKind, self.kind))
        if not np.isfinite(self.width) or self.width < 0:
            raise InvalidConfigError(f"disorder width must be >= 0, got {self.width!r}")
        if int(self.seed) != self.seed or self.seed < 0 or self.seed >= 2**64:
            raise InvalidConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class Hamiltonian:
    """Real symmetric coupling matrix of a waveguide array."""

    matrix: np.ndarray
    spec: LatticeSpec
    disorder: Optional[DisorderConfig] = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidSpecError(f"Hamiltonian must be square, got shape {m.shape}")
        if not np.array_equal(m, m.T):
            raise InvalidSpecError("Hamiltonian must be exactly symmetric")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def sites(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class EdgeMode:
    """Normalized localized eigenmode ``A = sum_n c_n a_n``."""

    coeffs: np.ndarray
    kappa: float

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __len__(self):
        return len(self.coeffs)

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.coeffs) ** 2


def build_hamiltonian(spec: LatticeSpec) -> Hamiltonian:
    """Pristine coupling matrix for ``spec``."""
    n = spec.sites
    h = np.zeros((n, n))
    if spec.kind is LatticeKind.SSH:
        hops = np.where(np.arange(n - 1) % 2 == 0, spec.u, spec.v)
    else:
        hops = np.full(n - 1, spec.w)
    idx = np.arange(n - 1)
    h[idx, idx + 1] = hops
    h[idx + 1, idx] = hops
    h[np.diag_indices(n)] = spec.beta
    if spec.kind is LatticeKind.IMPURITY:
        h[0, 0] = spec.beta + spec.eps0
    return Hamiltonian(h, spec)


def apply_disorder(h: Hamiltonian, cfg: DisorderConfig) -> Hamiltonian:
    """Resample couplings or onsite terms uniformly on ``[p - d/2, p + d/2]``.

    Hopping disorder redraws every nonzero upper-triangular coupling and
    mirrors it; onsite disorder redraws every diagonal entry. The draw order
    is fixed, so a given seed always yields the same matrix.
    """
    if cfg.width < 0:
        raise InvalidConfigError(f"disorder width must be >= 0, got {cfg.width!r}")
    m = np.array(h.matrix)
    if cfg.width > 0:
        rng = np.random.default_rng(cfg.seed)
        half = 0.5 * cfg.width
        if cfg.kind is DisorderKind.HOPPING:
            rows, cols = np.nonzero(np.triu(m, k=1))
            vals = m[rows, cols] + rng.uniform(-half, half, size=rows.size)
            m[rows, cols] = vals
            m[cols, rows] = vals
        else:
            diag = np.diag(m) + rng.uniform(-half, half, size=m.shape[0])
            m[np.diag_indices_from(m)] = diag
    return Hamiltonian(m, h.spec, cfg)


def diagonalize(h: Union[Hamiltonian, np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in ascending order and the orthonormal eigenvector columns."""
    m = h.matrix if isinstance(h, Hamiltonian) else np.asarray(h)
    return np.linalg.eigh(m)


def band_edges(spec: LatticeSpec) -> Tuple[float, float]:
    """Bulk band limits of the infinite pristine lattice."""
    if spec.kind is LatticeKind.SSH:
        return spec.beta - spec.u - spec.v, spec.beta + spec.u + spec.v
    return spec.beta - 2 * spec.w, spec.beta + 2 * spec.w


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    ref = vec[0] if abs(vec[0]) > 1e-14 else vec[np.argmax(np.abs(vec))]
    return vec * (abs(ref) / ref)


def edge_mode(h: Hamiltonian) -> EdgeMode:
    """Localized eigenmode of a (possibly disordered) lattice.

    SSH: the eigenvalue closest to ``beta``. Impurity: the eigenvalue farthest
    from ``beta``. Ties go to the largest weight on waveguide 0. The phase is
    chosen so that ``c_0`` is real and positive.
    """
    evals, q = diagonalize(h)
    beta = h.spec.beta
    weight0 = np.abs(q[0, :]) ** 2
    if h.spec.kind is LatticeKind.SSH:
        score = -np.abs(evals - beta)
    else:
        score = np.abs(evals - beta)
    best = np.flatnonzero(np.isclose(score, score.max(), rtol=0.0, atol=1e-12))
    i = best[np.argmax(weight0[best])]
    return EdgeMode(_fix_phase(q[:, i]), float(evals[i]))


def analytic_edge_mode(spec: LatticeSpec) -> EdgeMode:
    """Semi-infinite closed form truncated to ``spec.sites`` and renormalized."""
    n = spec.sites
    c = np.zeros(n)
    if spec.kind is LatticeKind.SSH:
        cells = np.arange(0, n, 2)
        c[cells] = (-spec.alpha) ** (cells // 2)
        kappa = spec.beta
    else:
        c[:] = (-spec.alpha) ** np.arange(n)
        kappa = spec.beta + spec.eps0 + spec.w**2 / spec.eps0
    c /= np.linalg.norm(c)
    return EdgeMode(c.astype(complex), float(kappa))


def rotating_frame(spec: LatticeSpec) -> LatticeSpec:
    """Copy of ``spec`` whose pristine edge mode has propagation constant 0.

    In this frame the squeezed quadrature of light sitting in the pristine
    edge mode does not rotate with ``z``. For the SSH chain this is simply
    ``beta = 0``; the impurity chain is shifted by its edge eigenvalue.
    """
    bare = replace(spec, beta=0.0)
    if spec.kind is LatticeKind.SSH:
        return bare
    kappa = edge_mode(build_hamiltonian(bare)).kappa
    return replace(spec, beta=-kappa)


def load_lattice_config(path: Union[str, Path]) -> Tuple[LatticeSpec, Optional[DisorderConfig]]:
    """Read lattice parameters from a YAML or JSON key-value file.

    Recognised keys: ``kind, sites, alpha, beta, v`` and ``disorder.kind,
    disorder.width, disorder.seed`` (either dotted or nested).
    """
    import yaml

    with open(path) as fh:
        raw = yaml.safe_load(fh) or {}
    flat = {}
    for key, value in raw.items():
        if isinstance(value, dict):
            for sub, subval in value.items():
                flat[f"{key}.{sub}"] = subval
        else:
            flat[key] = value
    known = {"kind", "sites", "alpha", "beta", "v", "disorder.kind", "disorder.width", "disorder.seed"}
    unknown = set(flat) - known
    if unknown:
        raise InvalidConfigError(f"unknown config keys {sorted(unknown)}; allowed {sorted(known)}")
    try:
        spec = LatticeSpec(
            kind=flat["kind"],
            sites=flat["sites"],
            alpha=float(flat["alpha"]),
            v=float(flat.get("v", 1.0)),
            beta=float(flat.get("beta", 0.0)),
        )
    except KeyError as exc:
        raise InvalidConfigError(f"missing required key {exc.args[0]!r}") from None
    disorder = None
    if "disorder.kind" in flat:
        disorder = DisorderConfig(
            kind=flat["disorder.kind"],
            width=float(flat.get("disorder.width", 0.0)),
            seed=int(flat.get("disorder.seed", 0)),
        )
    return spec, disorder


def write_hamiltonian_csv(h: Hamiltonian, path: Union[str, Path]) -> None:
    """Full matrix, row-major, full float precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in h.matrix:
            writer.writerow([repr(float(x)) for x in row])


def read_hamiltonian_csv(path: Union[str, Path]) -> np.ndarray:
    with open(path, newline="") as fh:
        return np.array([[float(x) for x in row] for row in csv.reader(fh)])
