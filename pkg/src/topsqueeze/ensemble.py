"""Disorder ensembles with grouped ("sextet") statistics.

Realizations are organised as ``sextets`` groups of ``group_size`` runs.
Reported means are over all realizations; the spread is the standard
deviation of the group means, and the confidence band is mean +/- one std.
Every realization gets its own seed derived from ``(master_seed, group,
index)``, so results do not depend on how work is scheduled.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional

import numpy as np

from .exceptions import EnsembleError, InvalidConfigError
from .gaussian import to_db

__all__ = [
    "Realization",
    "EnsemblePlan",
    "EnsembleStats",
    "derive_seed",
    "run_realizations",
    "run_ensemble",
    "quadrature_phase_statistics",
    "write_stats_csv",
]

log = logging.getLogger(__name__)


def derive_seed(master_seed: int, group: int, index: int) -> int:
    """64-bit seed for one realization, independent of execution order."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(group), int(index)))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class Realization:
    group: int
    index: int
    seed: int


@dataclass(frozen=True)
class EnsemblePlan:
    """How many realizations to run and how to seed them."""

    sextets: int = 50
    group_size: int = 6
    master_seed: int = 20210601

    def __post_init__(self):
        if self.sextets < 1 or self.group_size < 1:
            raise InvalidConfigError(f"need sextets >= 1 and group_size >= 1, got {self}")

    @property
    def size(self) -> int:
        return self.sextets * self.group_size

    def realizations(self) -> List[Realization]:
        out = [
            Realization(g, i, derive_seed(self.master_seed, g, i))
            for g in range(self.sextets)
            for i in range(self.group_size)
        ]
        if len({r.seed for r in out}) != len(out):
            raise InvalidConfigError(f"seed collision in plan {self}")
        return out


@dataclass(frozen=True)
class EnsembleStats:
    mean: np.ndarray
    std: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    n_realizations: int

    @classmethod
    def from_groups(cls, grand_mean, group_values, n_realizations) -> "EnsembleStats":
        group_values = np.asarray(group_values, dtype=float)
        if group_values.shape[0] > 1:
            # shift-invariant; identical groups give exactly zero
            std = (group_values - group_values[0]).std(axis=0, ddof=1)
        else:
            std = np.zeros_like(group_values[0])
        mean = np.asarray(grand_mean, dtype=float)
        return cls(mean, std, mean - std, mean + std, n_realizations)


def _call(experiment, real: Realization):
    try:
        return np.asarray(experiment(real.seed), dtype=float)
    except Exception as exc:
        raise EnsembleError(
            f"realization (group={real.group}, index={real.index}, seed={real.seed}) failed: {exc!r}",
            seed=real.seed, group=real.group, index=real.index,
        ) from exc


def run_realizations(plan: EnsemblePlan, experiment: Callable[[int], np.ndarray], workers: int = 1) -> np.ndarray:
    """Evaluate ``experiment(seed)`` for every realization.

    Returns an array of shape ``(sextets, group_size, *trace_shape)`` ordered
    by ``(group, index)``. With ``workers > 1`` the experiment must be
    picklable (a module-level function or ``functools.partial``).
    """
    reals = plan.realizations()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_call, experiment, r) for r in reals]
            traces = [f.result() for f in futures]
    else:
        traces = [_call(experiment, r) for r in reals]
    data = np.stack(traces)
    return data.reshape((plan.sextets, plan.group_size) + data.shape[1:])


def run_ensemble(plan: EnsemblePlan, experiment: Callable[[int], np.ndarray], workers: int = 1) -> EnsembleStats:
    """Grand mean and sextet-mean spread of a per-realization trace."""
    data = run_realizations(plan, experiment, workers)
    group_means = data.mean(axis=1)
    return EnsembleStats.from_groups(group_means.mean(axis=0), group_means, plan.size)


def quadrature_phase_statistics(
    plan: EnsemblePlan,
    experiment: Callable[[int], np.ndarray],
    workers: int = 1,
    data: Optional[np.ndarray] = None,
    average: str = "variance",
) -> Dict[str, EnsembleStats]:
    """Squeezing at fixed quadratures versus maximal squeezing.

    ``experiment(seed)`` returns rows ``(var_X1, var_X2, max_db)`` over some
    axis (typically ``z``). Fixed-quadrature squeezing is the dB value of the
    ensemble-averaged variance, so realizations squeezed along different
    directions wash out; maximal squeezing averages per-realization dB.
    Pass precomputed ``data`` (as from :func:`run_realizations`) to skip
    re-running. ``average="db"`` instead averages per-realization dB values
    at the fixed quadratures, for comparison.
    """
    if average not in ("variance", "db"):
        raise InvalidConfigError(f"average must be 'variance' or 'db', got {average!r}")
    if data is None:
        data = run_realizations(plan, experiment, workers)
    if data.shape[2] != 3:
        raise InvalidConfigError(f"experiment must return 3 rows (var_X1, var_X2, max_db), got {data.shape[2]}")
    group_means = data.mean(axis=1)
    grand = data.reshape((-1,) + data.shape[2:]).mean(axis=0)
    out = {}
    for row, name in ((0, "x1_db"), (1, "x2_db")):
        if average == "variance":
            out[name] = EnsembleStats.from_groups(to_db(grand[row]), to_db(group_means[:, row]), plan.size)
        else:
            db = to_db(data[:, :, row])
            out[name] = EnsembleStats.from_groups(db.mean(axis=(0, 1)), db.mean(axis=1), plan.size)
    out["max_db"] = EnsembleStats.from_groups(grand[2], group_means[:, 2], plan.size)
    return out


def write_stats_csv(path, axis_name: str, axis, stats: Dict[str, EnsembleStats]) -> None:
    """Long-format rows ``(axis, observable, mean, std, ci_low, ci_high, n_realizations)``."""
    import csv

    axis = np.asarray(axis, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([axis_name, "observable", "mean", "std", "ci_low", "ci_high", "n_realizations"])
        for name, st in stats.items():
            for i, x in enumerate(axis):
                writer.writerow([
                    f"{x:.10g}", name,
                    f"{np.ravel(st.mean)[i]:.12g}", f"{np.ravel(st.std)[i]:.12g}",
                    f"{np.ravel(st.ci_low)[i]:.12g}", f"{np.ravel(st.ci_high)[i]:.12g}",
                    st.n_realizations,
                ])
