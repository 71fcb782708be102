"""Command-line runner: one reproducible subcommand per figure.

Examples::

    topsqueeze run fig2 --out-dir out --workers 4
    topsqueeze run --figure fig6 --override disorder.width=0.3
    topsqueeze run movie1 --frames 100
    topsqueeze validate
    topsqueeze hamiltonian lattice.yaml -o h.csv
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .ensemble import EnsemblePlan, EnsembleStats, quadrature_phase_statistics, run_realizations, write_stats_csv
from .exceptions import InvalidConfigError, TopSqueezeError
from .experiments import (
    TWO_MODE_PAIRS,
    Setup,
    collective_rows,
    collective_squeezing,
    edge_covariances,
    single_mode_propagation,
    single_mode_rows,
    two_lattice_edge_covariance,
    two_lattice_propagation,
    two_lattice_rows,
)
from .lattice import LatticeKind, apply_disorder, build_hamiltonian, load_lattice_config, write_hamiltonian_csv
from .quantum_info import PhaseGrid, WignerField, gaussian_density, wigner_fock1, wigner_gaussian, write_wigner_csv
from .teleport import TeleportResource, teleport_average

log = logging.getLogger("topsqueeze")

FIGURES = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "movie1")
OUT_DIR_ENV = "TOPSQUEEZE_OUT_DIR"

# per-figure disorder width used when no override is given
DEFAULT_WIDTH = {"fig6": 0.3}
FIG2_WIDTHS = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
# waveguides reported in the one-mode squeezing appendix figure
FIG7_SITES = {LatticeKind.SSH: (1, 2, 4), LatticeKind.IMPURITY: (1, 2)}

OVERRIDE_KEYS = {
    "alpha": float,
    "xi_r": float,
    "xi_theta": float,
    "sites": int,
    "z_max": float,
    "z_steps": int,
    "teleport_z": float,
    "disorder.width": float,
    "disorder.widths": lambda s: tuple(float(x) for x in s.split(",")),
    "grid.extent": float,
    "grid.resolution": int,
    "sextets": int,
    "group_size": int,
    "seed": int,
}

KINDS = (LatticeKind.SSH, LatticeKind.IMPURITY)
_TAG = {LatticeKind.SSH: "topo", LatticeKind.IMPURITY: "triv"}


@dataclass
class ExperimentConfig:
    figure: str
    overrides: Dict[str, object] = field(default_factory=dict)
    frames: int = 100

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise InvalidConfigError(f"unknown figure {self.figure!r}; choose from {', '.join(FIGURES)}")
        unknown = set(self.overrides) - set(OVERRIDE_KEYS)
        if unknown:
            raise InvalidConfigError(
                f"unknown override key(s) {sorted(unknown)}; valid keys: {', '.join(sorted(OVERRIDE_KEYS))}"
            )
        if self.frames < 1:
            raise InvalidConfigError("--frames must be >= 1")

    def get(self, key, default):
        return self.overrides.get(key, default)

    @property
    def setup(self) -> Setup:
        d = Setup()
        return Setup(
            alpha=self.get("alpha", d.alpha),
            r=self.get("xi_r", d.r),
            theta=self.get("xi_theta", d.theta),
            sites=self.get("sites", d.sites),
            z_max=self.get("z_max", d.z_max),
            z_steps=self.get("z_steps", d.z_steps),
            teleport_z=self.get("teleport_z", d.teleport_z),
        )

    @property
    def width(self) -> float:
        return self.get("disorder.width", DEFAULT_WIDTH.get(self.figure, 0.6))

    @property
    def plan(self) -> EnsemblePlan:
        d = EnsemblePlan()
        return EnsemblePlan(self.get("sextets", d.sextets), self.get("group_size", d.group_size), self.get("seed", d.master_seed))

    @property
    def grid(self) -> PhaseGrid:
        return PhaseGrid.symmetric(self.get("grid.extent", 6.0), self.get("grid.resolution", 241))

    def resolved(self) -> dict:
        out = {"figure": self.figure, "setup": self.setup.to_dict(), "width": self.width,
               "plan": {"sextets": self.plan.sextets, "group_size": self.plan.group_size,
                        "master_seed": self.plan.master_seed},
               "grid": {"extent": self.grid.q_max, "resolution": self.grid.resolution},
               "overrides": {k: v for k, v in sorted(self.overrides.items())}}
        if self.figure == "fig2":
            out["widths"] = list(self.get("disorder.widths", FIG2_WIDTHS))
        if self.figure == "movie1":
            out["frames"] = self.frames
        return out


def parse_override(text: str):
    if "=" not in text:
        raise InvalidConfigError(f"override {text!r} is not of the form key=value")
    key, value = text.split("=", 1)
    key = key.strip()
    if key not in OVERRIDE_KEYS:
        raise InvalidConfigError(f"unknown override key {key!r}; valid keys: {', '.join(sorted(OVERRIDE_KEYS))}")
    try:
        return key, OVERRIDE_KEYS[key](value.strip())
    except ValueError:
        raise InvalidConfigError(f"bad value for {key}: {value!r}") from None


# --- helpers -----------------------------------------------------------------

def _conditions(width):
    """(label, disorder kind, width) rows used by the propagation figures."""
    return (("pristine", None, 0.0), ("hopping", "hopping", width), ("onsite", "onsite", width))


def _plan_for(plan: EnsemblePlan, disorder) -> EnsemblePlan:
    # pristine lattices are deterministic; one realization is enough
    return plan if disorder is not None else EnsemblePlan(1, 1, plan.master_seed)


def _stats_by_row(data: np.ndarray, names: Sequence[str], n: int) -> Dict[str, EnsembleStats]:
    group_means = data.mean(axis=1)
    grand = data.reshape((-1,) + data.shape[2:]).mean(axis=0)
    return {name: EnsembleStats.from_groups(grand[i], group_means[:, i], n) for i, name in enumerate(names)}


def _stats_record(st: EnsembleStats, idx) -> dict:
    pick = lambda a: float(np.ravel(a)[idx])
    return {"mean": pick(st.mean), "std": pick(st.std)}


def _single_mode_data(cfg, kind, disorder, width, workers):
    plan = _plan_for(cfg.plan, disorder)
    fn = partial(single_mode_propagation, kind=kind, setup=cfg.setup, disorder=disorder, width=width)
    return plan, run_realizations(plan, fn, workers)


def _average_wigner(covs: np.ndarray, grid: PhaseGrid) -> WignerField:
    """Mean of zero-mean Gaussian Wigner functions for a stack of 2x2 covariances."""
    covs = covs.reshape(-1, 2, 2)
    qq, pp = grid.mesh()
    pts = np.stack([qq, pp], axis=-1)
    acc = np.zeros(qq.shape)
    for v in covs:
        acc += gaussian_density(v, pts)
    return WignerField(acc / len(covs), grid)


# --- figures -----------------------------------------------------------------

def run_fig2(cfg: ExperimentConfig, out: Path, workers: int) -> dict:
    widths = np.asarray(cfg.get("disorder.widths", FIG2_WIDTHS), dtype=float)
    setup, summary = cfg.setup, {}
    for kind in KINDS:
        names = collective_rows(kind, setup.sites)
        for disorder in ("hopping", "onsite"):
            per_width = []
            for d in widths:
                # the full plan even at d = 0, so every row counts the same realizations
                plan = cfg.plan
                fn = partial(collective_squeezing, kind=kind, setup=setup, disorder=disorder, width=float(d))
                per_width.append(_stats_by_row(run_realizations(plan, fn, workers)[..., None], names, plan.size))
            stats = {
                name: EnsembleStats(
                    *(np.concatenate([np.ravel(getattr(p[name], f)) for p in per_width])
                      for f in ("mean", "std", "ci_low", "ci_high")),
                    n_realizations=cfg.plan.size,
                )
                for name in names
            }
            write_stats_csv(out / f"fig2_{_TAG[kind]}_{disorder}.csv", "d", widths, stats)
            summary[f"{_TAG[kind]}_{disorder}"] = {
                name: [float(x) for x in stats[name].mean] for name in names[:3] + names[setup.sites:]
            }
    summary["d"] = widths.tolist()
    return summary


def _propagation_figure(cfg, out, workers, writer) -> dict:
    setup, summary = cfg.setup, {}
    for kind in KINDS:
        for label, disorder, width in _conditions(cfg.width):
            plan, data = _single_mode_data(cfg, kind, disorder, width, workers)
            key = f"{_TAG[kind]}_{label}"
            summary[key] = writer(out / f"{cfg.figure}_{key}.csv", kind, plan, data, setup)
    return summary


def _write_rows(path, kind, plan, data, setup, wanted):
    names = single_mode_rows(kind, setup.sites)
    idx = [names.index(w) for w in wanted]
    stats = _stats_by_row(data[:, :, idx], wanted, plan.size)
    write_stats_csv(path, "z", setup.zs, stats)
    return {name: _stats_record(st, -1) for name, st in stats.items()}


def run_fig3(cfg, out, workers):
    def writer(path, kind, plan, data, setup):
        return _write_rows(path, kind, plan, data, setup, [f"photons_{n}" for n in range(setup.sites)])
    return _propagation_figure(cfg, out, workers, writer)


def run_fig7(cfg, out, workers):
    def writer(path, kind, plan, data, setup):
        return _write_rows(path, kind, plan, data, setup, [f"max_db_{n}" for n in FIG7_SITES[kind]])
    return _propagation_figure(cfg, out, workers, writer)


def run_fig8(cfg, out, workers):
    def writer(path, kind, plan, data, setup):
        return _write_rows(path, kind, plan, data, setup, [f"max_db_{a},{b}" for a, b in TWO_MODE_PAIRS[kind]])
    return _propagation_figure(cfg, out, workers, writer)


def run_fig4(cfg, out, workers):
    setup, grid, plan = cfg.setup, cfg.grid, cfg.plan

    def writer(path, kind, plan, data, setup):
        names = single_mode_rows(kind, setup.sites)
        rows = data[:, :, [0, 1, names.index("max_db_0")]]
        stats = quadrature_phase_statistics(plan, None, data=rows)
        write_stats_csv(path, "z", setup.zs, stats)
        return {name: _stats_record(st, -1) for name, st in stats.items()}

    summary = _propagation_figure(cfg, out, workers, writer)

    # Wigner panels at waveguide 0 and z = z_max
    zs = [setup.z_max]
    in_cov = edge_covariances(0, LatticeKind.SSH, setup, zs=[0.0])[0]
    write_wigner_csv(wigner_gaussian(in_cov, grid), out / "fig4_wigner_input.csv")
    for kind, single_tags in ((LatticeKind.SSH, ("c",)), (LatticeKind.IMPURITY, ("e", "f"))):
        fn = partial(edge_covariances, kind=kind, setup=setup, disorder="hopping", width=cfg.width, zs=zs)
        covs = run_realizations(plan, fn, workers)[:, :, 0]
        flat = covs.reshape(-1, 2, 2)
        for i, tag in enumerate(single_tags):
            write_wigner_csv(wigner_gaussian(flat[i], grid), out / f"fig4_wigner_{_TAG[kind]}_hopping_single{tag}.csv")
        write_wigner_csv(_average_wigner(flat, grid), out / f"fig4_wigner_{_TAG[kind]}_hopping_average.csv")
    return summary


def _two_lattice_figure(cfg, out, workers, entanglement_ci: bool) -> dict:
    setup, summary = cfg.setup, {}
    names = two_lattice_rows()
    for kind in KINDS:
        for label, disorder, width in _conditions(cfg.width):
            plan = _plan_for(cfg.plan, disorder)
            fn = partial(two_lattice_propagation, kind=kind, setup=setup, disorder=disorder, width=width)
            data = run_realizations(plan, fn, workers)
            stats = quadrature_phase_statistics(plan, None, data=data[:, :, :3])
            ent = _stats_by_row(data[:, :, 3:], names[3:], plan.size)
            if entanglement_ci:
                stats = {"max_db": stats["max_db"], **ent}
            else:
                stats = {**stats, "entanglement_norm": ent["entanglement_norm"]}
            key = f"{_TAG[kind]}_{label}"
            write_stats_csv(out / f"{cfg.figure}_{key}.csv", "z", setup.zs, stats)
            summary[key] = {name: _stats_record(st, -1) for name, st in stats.items()}
    return summary


def run_fig5(cfg, out, workers):
    return _two_lattice_figure(cfg, out, workers, entanglement_ci=False)


def run_fig9(cfg, out, workers):
    return _two_lattice_figure(cfg, out, workers, entanglement_ci=True)


def run_fig6(cfg, out, workers):
    setup, grid = cfg.setup, cfg.grid
    w_in = wigner_fock1(grid)
    write_wigner_csv(w_in, out / "fig6_input.csv")
    summary = {"teleport_z": setup.teleport_z, "width": cfg.width}
    for kind in KINDS:
        for label, disorder in (("pristine", None), ("disordered", "hopping")):
            plan = _plan_for(cfg.plan, disorder)
            fn = partial(two_lattice_edge_covariance, kind=kind, setup=setup, disorder=disorder, width=cfg.width)
            covs = run_realizations(plan, fn, workers).reshape(-1, 4, 4)
            report = teleport_average(w_in, [TeleportResource(v) for v in covs])
            key = f"{label}_{_TAG[kind]}"
            write_wigner_csv(report.w_out, out / f"fig6_{key}.csv")
            summary[key] = report.summary()
    return summary


def run_movie1(cfg, out, workers):
    setup, grid = cfg.setup, cfg.grid
    zs = np.linspace(0.0, setup.z_max, cfg.frames)
    with open(out / "movie1_frames.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame", "z"])
        for i, z in enumerate(zs):
            writer.writerow([i, f"{z:.10g}"])
    summary = {"frames": cfg.frames, "panels": []}
    for kind in KINDS:
        for label, disorder, width in _conditions(cfg.width):
            plan = _plan_for(cfg.plan, disorder)
            fn = partial(edge_covariances, kind=kind, setup=setup, disorder=disorder, width=width, zs=zs)
            covs = run_realizations(plan, fn, workers).reshape(plan.size, len(zs), 2, 2)
            panel = out / f"movie1_{_TAG[kind]}_{label}"
            panel.mkdir(exist_ok=True)
            for i in range(len(zs)):
                write_wigner_csv(_average_wigner(covs[:, i], grid), panel / f"frame_{i:04d}.csv")
            summary["panels"].append(panel.name)
    return summary


RUNNERS = {
    "fig2": run_fig2, "fig3": run_fig3, "fig4": run_fig4, "fig5": run_fig5, "fig6": run_fig6,
    "fig7": run_fig7, "fig8": run_fig8, "fig9": run_fig9, "movie1": run_movie1,
}


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def run(cfg: ExperimentConfig, out_dir, workers: int = 1) -> Path:
    """Run one figure and write its data, ``summary.json`` and ``manifest.json``."""
    out = Path(out_dir) / cfg.figure
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise PermissionError(f"output directory {out} is not writable")
    log.info("running %s into %s", cfg.figure, out)
    summary = RUNNERS[cfg.figure](cfg, out, workers)
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    files = sorted(p for p in out.rglob("*") if p.is_file() and p.name != "manifest.json")
    manifest = {
        "package": "topsqueeze",
        "version": __version__,
        "config": cfg.resolved(),
        "master_seed": cfg.plan.master_seed,
        "files": {str(p.relative_to(out)): _sha256(p) for p in files},
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return out


def _cmd_run(args, parser) -> int:
    figure = args.figure_opt or args.figure
    if figure is None:
        parser.error("a figure is required (positional or --figure)")
    overrides = {}
    if args.config:
        import yaml

        with open(args.config) as fh:
            raw = yaml.safe_load(fh) or {}
        for key, value in raw.items():
            if isinstance(value, dict):
                for sub, subval in value.items():
                    overrides.update([parse_override(f"{key}.{sub}={subval}")])
            else:
                overrides.update([parse_override(f"{key}={value}")])
    for text in args.override:
        overrides.update([parse_override(text)])
    if args.seed is not None:
        overrides["seed"] = args.seed
    cfg = ExperimentConfig(figure, overrides, frames=args.frames)
    out = run(cfg, args.out_dir or os.environ.get(OUT_DIR_ENV, "topsqueeze-out"), args.workers)
    print(json.dumps(json.loads((out / "summary.json").read_text()), indent=2) if figure == "fig6" else out)
    return 0


def _cmd_validate(args, parser) -> int:
    from .validation import format_report, run_validation

    checks = run_validation()
    print(format_report(checks))
    return 0 if all(c.passed for c in checks) else 1


def _cmd_hamiltonian(args, parser) -> int:
    spec, disorder = load_lattice_config(args.config)
    h = build_hamiltonian(spec)
    if disorder is not None:
        h = apply_disorder(h, disorder)
    if args.output:
        write_hamiltonian_csv(h, args.output)
    else:
        w = csv.writer(sys.stdout)
        for row in h.matrix:
            w.writerow([repr(float(x)) for x in row])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="topsqueeze", description="Squeezed light in topological waveguide lattices.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="produce the data behind one figure")
    p_run.add_argument("figure", nargs="?", choices=FIGURES)
    p_run.add_argument("--figure", dest="figure_opt", choices=FIGURES)
    p_run.add_argument("--out-dir", help=f"output directory (default ${OUT_DIR_ENV} or ./topsqueeze-out)")
    p_run.add_argument("--workers", type=int, default=1, help="worker processes for ensembles")
    p_run.add_argument("--seed", type=int, help="master seed for disorder realizations")
    p_run.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                       help=f"repeatable; keys: {', '.join(sorted(OVERRIDE_KEYS))}")
    p_run.add_argument("--config", help="YAML/JSON file with override keys")
    p_run.add_argument("--frames", type=int, default=100, help="number of z frames for movie1")
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="run the fast self-check suite")
    p_val.set_defaults(func=_cmd_validate)

    p_ham = sub.add_parser("hamiltonian", help="export a lattice Hamiltonian from a config file as CSV")
    p_ham.add_argument("config")
    p_ham.add_argument("-o", "--output")
    p_ham.set_defaults(func=_cmd_hamiltonian)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args, parser)
    except InvalidConfigError as exc:
        parser.error(str(exc))
    except TopSqueezeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
