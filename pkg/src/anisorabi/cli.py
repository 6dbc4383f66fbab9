"""Command-line pipelines: sweeps, phase diagram, collapse fits, scaling functions, JC staircase.

Every command writes plain CSV files plus ``manifest.txt`` into ``--out-dir``.
Settings come from (lowest to highest priority) built-in defaults, a
key=value ``--config`` file, and command-line flags.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import logging
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import analytic, jc
from .collapse import (CollapseError, SweepDataset, collapse_points, collapse_residual,
                       fit_exponents, generate_dataset, locate_critical, loglog_fit,
                       soft_quantity, theory_scaling_check)
from .model import BasisSpec, ModelParams
from .scalingfn import GridError, GridSpec, moments, scaled_variables, solve_scaling_ode, universal_functions
from .solver import (CUTOFF_CEILING, ConvergenceError, energy_curvature_xi,
                     energy_slope_lambda, lowest_eigenpairs, observables)

log = logging.getLogger("anisorabi")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_IO = 4

SCHEMA_VERSION = 1
COMMANDS = ("phase-diagram", "sweep", "collapse", "scaling-fn", "jc", "compare-eff")
WORKERS_ENV = "ANISORABI_WORKERS"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str = "sweep"
    etas: tuple = (1024.0,)
    lambdas: tuple = (1.0,)
    gtilde_min: float = 0.0
    gtilde_max: float = 3.0
    gtilde_steps: int = 31
    tol: float = 1e-10
    cutoff_max: int = CUTOFF_CEILING
    workers: int = 1
    out_dir: str = "out"
    quantities: tuple = ("energy", "x2_scaled", "p2_over_eta", "gap_total")
    v_min: float = -3.0
    v_max: float = 3.0
    v_steps: int = 25
    grid_h: float = 0.002
    moments: int = 1
    mass_mode: str = "bare"
    window: float = 0.02
    window_steps: int = 21
    eta_t_min: float = -1.0
    eta_t_max: float = 5.0
    eta_t_steps: int = 121
    heff_cutoff: int = 200
    plot_script: bool = False

    def __post_init__(self):
        problems = []
        if self.command not in COMMANDS:
            problems.append(f"unknown command {self.command!r}")
        if not self.etas or not self.lambdas or not self.quantities:
            problems.append("etas, lambdas and quantities must be non-empty")
        if any(not (e > 0 and math.isfinite(e)) for e in self.etas):
            problems.append("etas must be positive")
        if any(not math.isfinite(l) for l in self.lambdas):
            problems.append("lambdas must be finite")
        if self.gtilde_steps < 1 or self.gtilde_max < self.gtilde_min:
            problems.append("g~ range is empty")
        if self.v_steps < 1 or self.v_max < self.v_min or self.eta_t_steps < 1 or self.eta_t_max < self.eta_t_min:
            problems.append("v or eta*t range is empty")
        if not (self.tol > 0 and self.grid_h > 0 and self.window > 0):
            problems.append("tol, grid_h and window must be positive")
        if self.cutoff_max < 16 or self.heff_cutoff < 8:
            problems.append("cutoffs too small")
        if self.workers < 1 or self.moments < 1 or self.window_steps < 3:
            problems.append("workers, moments must be >= 1 and window_steps >= 3")
        if self.mass_mode not in ("bare", "renormalized"):
            problems.append(f"mass_mode must be bare or renormalized, got {self.mass_mode!r}")
        if problems:
            raise ConfigError("; ".join(problems))

    # -- serialisation -------------------------------------------------
    def serialize(self) -> str:
        lines = []
        for f in fields(self):
            val = getattr(self, f.name)
            if isinstance(val, tuple):
                text = ",".join(_fmt(v) for v in val)
            else:
                text = _fmt(val)
            lines.append(f"{f.name}={text}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str, base: "RunConfig | None" = None) -> "RunConfig":
        return (base or cls()).updated(parse_pairs(text))

    def updated(self, pairs: dict) -> "RunConfig":
        kinds = {f.name: f.type for f in fields(self)}
        changes = {}
        for key, raw in pairs.items():
            key = key.replace("-", "_")
            if key not in kinds:
                raise ConfigError(f"unknown config key {key!r}")
            changes[key] = _convert(key, kinds[key], raw)
        try:
            return dataclasses.replace(self, **changes)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def config_hash(self) -> str:
        """Hash of everything that can change file contents (not workers or out_dir)."""
        body = "".join(l + "\n" for l in self.serialize().splitlines()
                       if not l.startswith(("workers=", "out_dir=")))
        return hashlib.sha256(body.encode()).hexdigest()[:16]

    def g_grid(self) -> np.ndarray:
        return np.linspace(self.gtilde_min, self.gtilde_max, self.gtilde_steps)

    def v_grid(self) -> np.ndarray:
        return np.linspace(self.v_min, self.v_max, self.v_steps)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _number(text: str) -> float:
    text = text.strip()
    if "^" in text:  # 2^10 shorthand
        base, exp = text.split("^", 1)
        return float(base) ** float(exp)
    return float(text)


def _convert(key, kind, raw: str):
    try:
        if kind == "tuple":
            items = [s.strip() for s in raw.split(",") if s.strip()]
            return tuple(items) if key == "quantities" else tuple(_number(s) for s in items)
        if kind == "float":
            return _number(raw)
        if kind == "int":
            val = _number(raw)
            if val != int(val):
                raise ValueError(f"{raw!r} is not an integer")
            return int(val)
        if kind == "bool":
            if raw.strip().lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(f"{raw!r} is not a boolean")
            return raw.strip().lower() in ("true", "1", "yes")
        return raw.strip()
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {exc}") from exc


def parse_pairs(text: str) -> dict:
    pairs = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        k, v = line.split("=", 1)
        pairs[k.strip()] = v.strip()
    return pairs


COMMAND_DEFAULTS = {
    "phase-diagram": {"etas": "2^6,2^7,2^8,2^9,2^10", "lambdas": "-1,-0.5,0,0.5,1,2",
                      "gtilde_steps": "31"},
    "collapse": {"etas": "2^6,2^7,2^8,2^9,2^10,2^11,2^12", "lambdas": "0.5,1,2"},
    "scaling-fn": {"v_min": "-6", "v_max": "6", "v_steps": "121"},
    "jc": {"lambdas": "0"},
    "compare-eff": {"etas": "2^8", "lambdas": "0.5,1,2", "gtilde_min": "0",
                    "gtilde_max": "1.2", "gtilde_steps": "13"},
}


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from exc
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1)


# -- execution helpers ----------------------------------------------------

def _pmap(fn: Callable, jobs: Sequence, workers: int) -> list:
    """Ordered map; output order never depends on the pool."""
    if workers <= 1 or len(jobs) < 2:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def _cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path: Path, header: Sequence[str], rows) -> int:
    n = 0
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(x) for x in row) + "\n")
            n += 1
    return n


def _count_rows(path: Path) -> int:
    """Data rows (header excluded) for CSV, lines otherwise."""
    with open(path) as fh:
        n = sum(1 for _ in fh)
    return max(n - 1, 0) if path.suffix == ".csv" else n


def check_writable(out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile(dir=out_dir, prefix=".probe"):
        pass


def write_manifest(out_dir: Path, cfg: RunConfig, files: Sequence[str]):
    h = cfg.config_hash()
    lines = [f"# schema_version={SCHEMA_VERSION} command={cfg.command}", "filename,rows,config_hash"]
    for name in sorted(files):
        lines.append(f"{name},{_count_rows(out_dir / name)},{h}")
    (out_dir / "manifest.txt").write_text("\n".join(lines) + "\n")


# -- commands ---------------------------------------------------------------

def cmd_sweep(cfg: RunConfig, out: Path) -> list[str]:
    points = [(e, l, g) for e in cfg.etas for l in cfg.lambdas for g in cfg.g_grid()]
    ds = generate_dataset(points, cfg.quantities, cfg.tol, cfg.workers, cfg.cutoff_max)
    ds.to_csv(out / "sweep.csv")
    return ["sweep.csv"]


def _phase_row(job):
    eta, lam, g, tol, cutoff_max = job
    p = ModelParams(eta, g, lam)
    obs = observables(p, tol, cutoff_max=cutoff_max)
    curv = energy_curvature_xi(p).value if lam != -1 else math.nan
    slope = energy_slope_lambda(p).value
    pp = analytic.phase_point(lam, g)
    return (eta, lam, g, obs.x2_scaled, obs.p2_over_eta, curv, slope, pp.phase,
            pp.order_parameter, analytic.critical_coupling(lam))


def _boundary(cfg: RunConfig, lam: float):
    gc = analytic.critical_coupling(lam)
    eta = max(cfg.etas)
    if lam == 0:
        xi0 = jc.level_crossings(eta, 1, "exact")[0]
        return (lam, gc, 2 * xi0, 0.0, "jc_crossing")
    if len(cfg.etas) < 4:
        return (lam, gc, math.nan, math.nan, "unavailable")
    grid = gc * np.linspace(1 - cfg.window, 1 + cfg.window, cfg.window_steps)
    q = soft_quantity(lam)
    ds = generate_dataset([(e, lam, g) for e in cfg.etas for g in grid], (q,),
                          min(cfg.tol, 1e-10), cfg.workers, cfg.cutoff_max)
    est = locate_critical(ds, q, lam)
    return (lam, gc, est.g_c, est.error, "loglog_curvature")


def cmd_phase_diagram(cfg: RunConfig, out: Path) -> list[str]:
    eta = max(cfg.etas)
    jobs = [(eta, l, float(g), cfg.tol, cfg.cutoff_max) for l in cfg.lambdas for g in cfg.g_grid()]
    rows = _pmap(_phase_row, jobs, cfg.workers)
    write_csv(out / "phase_diagram.csv",
              ["eta", "lambda", "g_tilde", "x2_scaled", "p2_over_eta", "curvature_xi",
               "slope_lambda", "phase_analytic", "order_parameter_analytic", "g_c_analytic"], rows)
    write_csv(out / "phase_boundary.csv", ["lambda", "g_c_analytic", "g_c_numeric", "g_c_error", "method"],
              [_boundary(cfg, l) for l in cfg.lambdas])
    return ["phase_diagram.csv", "phase_boundary.csv"]


def curve_for(v_values, n_list=(1,), h=0.002, margin=0.5):
    lo = math.floor((min(v_values) - margin) * 10) / 10
    hi = math.ceil((max(v_values) + margin) * 10) / 10
    samples = np.round(np.arange(round(lo * 10), round(hi * 10) + 1) * 0.1, 10)
    return universal_functions(samples, n_list, h)


def cmd_collapse(cfg: RunConfig, out: Path) -> list[str]:
    if any(l == 0 for l in cfg.lambdas):
        raise ConfigError("collapse needs lambda != 0 (the effective mass diverges on the JC line)")
    if len(cfg.etas) < 4:
        raise ConfigError("collapse needs at least 4 eta values")
    scan_rows, reports, all_records, theory_rows = [], [], [], []
    for lam in cfg.lambdas:
        gc = analytic.critical_coupling(lam)
        q = soft_quantity(lam)
        grid = gc * np.linspace(1 - cfg.window, 1 + cfg.window, cfg.window_steps)
        scan = generate_dataset([(e, lam, g) for e in cfg.etas for g in grid], (q,),
                                cfg.tol, cfg.workers, cfg.cutoff_max)
        crit = locate_critical(scan, q, lam)
        for g, c in zip(crit.couplings, crit.curvatures):
            fit = loglog_fit(scan, g, q, lam)
            scan_rows.append((lam, q, g, c, fit.curvature_se, fit.slope, fit.slope_se))
        nearest = min(crit.couplings, key=lambda g: abs(g - crit.g_c))
        slope = loglog_fit(scan, nearest, q, lam).slope

        ds = generate_dataset(collapse_points(lam, cfg.etas, cfg.v_grid(), crit.g_c, "renormalized"),
                              (q, "x2", "p2"), cfg.tol, cfg.workers, cfg.cutoff_max)
        all_records += ds.records
        fit = fit_exponents(ds, q, init=(crit.g_c, 0.5, -slope / 2),
                            mass_mode=cfg.mass_mode, lam=lam)
        reports.append((lam, crit, slope, fit))

        check_ds = SweepDataset(ds.select("x2") + ds.select("p2"))
        vs = [scaled_variables(ModelParams(r.eta, r.g_tilde, r.lam)).v for r in check_ds.records]
        curve = curve_for(vs, (1,), cfg.grid_h)
        tc = theory_scaling_check(check_ds, curve)
        theory_rows += [(*pt[:5], pt[5], pt[6], abs(pt[5] / pt[6] - 1)) for pt in tc.points]

    SweepDataset(all_records).to_csv(out / "collapse_dataset.csv")
    write_csv(out / "curvature_scan.csv",
              ["lambda", "quantity", "g_tilde", "curvature", "curvature_se", "slope", "slope_se"], scan_rows)
    write_csv(out / "theory_check.csv",
              ["eta", "lambda", "g_tilde", "quantity", "v", "measured", "predicted", "rel_dev"],
              theory_rows)

    lines = []
    for lam, crit, slope, fit in reports:
        lines += [f"[lambda={lam!r}]",
                  f"g_c_analytic = {analytic.critical_coupling(lam)!r}",
                  f"g_c_curvature = {crit.g_c!r}", f"g_c_curvature_error = {crit.error!r}",
                  f"critical_slope = {slope!r}"]
        lines += fit.report().splitlines()
        lines.append("")
    nonzero = SweepDataset(all_records)
    if len({r.lam for r in nonzero.select("x2_scaled")}) > 1:
        # pooled multi-lambda collapse at the analytic critical point and exponents
        for mode in ("bare", "renormalized"):
            res = collapse_residual(nonzero, "x2_scaled", None, 1 / 3, 1 / 3, mode)
            lines.append(f"pooled_residual_{mode} = {float(res)!r}")
    if theory_rows:
        dev = np.array([r[-1] for r in theory_rows])
        lines += [f"theory_max_rel_dev = {float(dev.max())!r}", f"theory_mean_rel_dev = {float(dev.mean())!r}"]
    (out / "collapse_fit.txt").write_text("\n".join(lines) + "\n")
    return ["collapse_dataset.csv", "curvature_scan.csv", "theory_check.csv", "collapse_fit.txt"]


def _asymptotes(v: float):
    if v >= 0:
        return -v * v + math.sqrt(v), 2 * v
    return math.sqrt(-v / 2), 1 / (2 * math.sqrt(-2 * v))


def _scaling_checks(job):
    v, h = job
    E0, phi, grid = solve_scaling_ode(v, GridSpec.default(v, h))
    x1, p1 = moments(phi, grid, 1)
    x2, _ = moments(phi, grid, 2)
    d = 1e-3
    ep = solve_scaling_ode(v + d, GridSpec.with_spacing(grid.half_width, grid.spacing))[0]
    em = solve_scaling_ode(v - d, GridSpec.with_spacing(grid.half_width, grid.spacing))[0]
    e_asym, x_asym = _asymptotes(v)
    return (v, E0, p1 + 2 * v * x1 - x2, (ep - em) / (2 * d) + x1, e_asym, x_asym)


def cmd_scaling_fn(cfg: RunConfig, out: Path) -> list[str]:
    vs = np.round(cfg.v_grid(), 10)
    curve = universal_functions(vs, tuple(range(1, cfg.moments + 1)), cfg.grid_h)
    curve.to_csv(out / "scaling_curve.csv")
    rows = _pmap(_scaling_checks, [(float(v), cfg.grid_h) for v in vs], cfg.workers)
    write_csv(out / "scaling_checks.csv",
              ["v", "e0", "virial_residual", "hellmann_feynman_residual", "e0_asymptote", "x1_asymptote"], rows)
    return ["scaling_curve.csv", "scaling_checks.csv"]


def _jc_full(job):
    eta, eta_t, tol, cutoff_max = job
    t = eta_t / eta
    obs = observables(ModelParams(eta, 2 * (1 + t), 0.0), tol, cutoff_max=cutoff_max)
    q0 = 0 if eta_t < 0 else math.floor(eta_t) + 1
    return (eta, t, 1 + t, q0, obs.x2, obs.p2, jc.jc_scaling_function(1, eta_t))


def cmd_jc(cfg: RunConfig, out: Path) -> list[str]:
    eta = max(cfg.etas)
    eta_t = np.linspace(cfg.eta_t_min, cfg.eta_t_max, cfg.eta_t_steps)
    files = []
    for n in range(1, cfg.moments + 1):
        name = f"jc_staircase_n{n}.csv"
        jc.write_staircase_csv(out / name, jc.staircase_table(eta, eta_t / eta, n))
        files.append(name)
    q_max = max(1, math.ceil(cfg.eta_t_max) + 1)
    lead, exact = jc.level_crossings(eta, q_max, "leading"), jc.level_crossings(eta, q_max, "exact")
    write_csv(out / "jc_crossings.csv", ["eta", "q", "xi_leading", "xi_exact", "diff_times_eta2"],
              [(eta, q, a, b, (b - a) * eta**2) for q, (a, b) in enumerate(zip(lead, exact))])
    rows = _pmap(_jc_full, [(eta, float(x), cfg.tol, cfg.cutoff_max) for x in eta_t], cfg.workers)
    write_csv(out / "jc_full.csv", ["eta", "t", "xi", "q0", "x2_full", "p2_full", "x2_staircase"], rows)
    return files + ["jc_crossings.csv", "jc_full.csv"]


def _eff_row(job):
    eta, lam, g, tol, n_max, cutoff_max = job
    p = ModelParams(eta, g, lam)
    e_full = observables(p, tol, cutoff_max=cutoff_max).energy
    if max(abs(p.xi), abs(p.xi_prime)) >= 1:
        return (eta, lam, g, e_full, math.nan, math.nan, math.nan)
    basis = BasisSpec(n_max, with_spin=False)
    e2 = lowest_eigenpairs(analytic.sw2_heff(p, basis), 1).values[0]
    e4 = lowest_eigenpairs(analytic.sw4_heff(p, basis), 1).values[0]
    er = analytic.resummed_heff_ground(p, n_max)[0][0]
    return (eta, lam, g, e_full, float(e2), float(e4), float(er))


def cmd_compare_eff(cfg: RunConfig, out: Path) -> list[str]:
    eta = max(cfg.etas)
    jobs = [(eta, l, float(g), cfg.tol, cfg.heff_cutoff, cfg.cutoff_max) for l in cfg.lambdas for g in cfg.g_grid()]
    rows = _pmap(_eff_row, jobs, cfg.workers)
    write_csv(out / "compare_eff.csv", ["eta", "lambda", "g_tilde", "e_full", "e_sw2", "e_sw4", "e_resummed"], rows)
    return ["compare_eff.csv"]


RUNNERS = {
    "phase-diagram": cmd_phase_diagram,
    "sweep": cmd_sweep,
    "collapse": cmd_collapse,
    "scaling-fn": cmd_scaling_fn,
    "jc": cmd_jc,
    "compare-eff": cmd_compare_eff,
}

PLOT_COLUMNS = {
    "phase-diagram": ("phase_diagram.csv", 3, 4),
    "sweep": ("sweep.csv", 3, 5),
    "collapse": ("theory_check.csv", 5, 8),
    "scaling-fn": ("scaling_curve.csv", 1, 3),
    "jc": ("jc_full.csv", 2, 5),
    "compare-eff": ("compare_eff.csv", 3, 4),
}


def write_plot_script(out: Path, command: str) -> str:
    name, xcol, ycol = PLOT_COLUMNS[command]
    script = (f"# gnuplot -p {command.replace('-', '_')}.gp\n"
              "set datafile separator ','\nset key autotitle columnhead\n"
              f"plot '{name}' using {xcol}:{ycol} with points\n")
    fname = f"{command.replace('-', '_')}.gp"
    (out / fname).write_text(script)
    return fname


def run(cfg: RunConfig) -> list[str]:
    out = Path(cfg.out_dir)
    check_writable(out)
    files = RUNNERS[cfg.command](cfg, out)
    (out / "config.txt").write_text(cfg.serialize())
    files.append("config.txt")
    if cfg.plot_script:
        files.append(write_plot_script(out, cfg.command))
    write_manifest(out, cfg, files)
    return files


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value settings file")
    common.add_argument("--eta", help="comma-separated eta values (2^k allowed)")
    common.add_argument("--lambda", dest="lam", help="comma-separated anisotropies")
    common.add_argument("--gtilde-min", type=str)
    common.add_argument("--gtilde-max", type=str)
    common.add_argument("--gtilde-steps", type=str)
    common.add_argument("--tol", type=str)
    common.add_argument("--cutoff-max", type=str)
    common.add_argument("--workers", type=str, help=f"worker processes (default ${WORKERS_ENV} or CPU count)")
    common.add_argument("--out-dir", type=str)
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any other config key")
    common.add_argument("-v", "--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="anisorabi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def resolve_config(args) -> RunConfig:
    cfg = RunConfig(command=args.command, workers=default_workers())
    cfg = cfg.updated(parse_pairs("\n".join(f"{k}={v}" for k, v in COMMAND_DEFAULTS.get(args.command, {}).items())))
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        pairs = parse_pairs(text)
        pairs.pop("command", None)
        cfg = cfg.updated(pairs)
    flags = {"etas": args.eta, "lambdas": args.lam, "gtilde_min": args.gtilde_min,
             "gtilde_max": args.gtilde_max, "gtilde_steps": args.gtilde_steps, "tol": args.tol,
             "cutoff_max": args.cutoff_max, "workers": args.workers, "out_dir": args.out_dir}
    pairs = {k: v for k, v in flags.items() if v is not None}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        pairs[k.strip()] = v.strip()
    return cfg.updated(pairs)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # argparse exits with code 2 on bad usage
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        files = run(cfg)
    except (ConvergenceError, GridError) as exc:
        log.error("convergence failure: %s", exc)
        return EXIT_CONVERGENCE
    except OSError as exc:
        log.error("I/O failure: %s", exc)
        return EXIT_IO
    except (ConfigError, CollapseError, analytic.DomainError, ValueError) as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    print(f"wrote {len(files)} files to {cfg.out_dir} (config {cfg.config_hash()})")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
