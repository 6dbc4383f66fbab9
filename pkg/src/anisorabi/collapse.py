"""Finite-eta scaling analysis: log-log curvature, critical point, data collapse.

Exponent convention. A quantity is assumed to scale as

    Q = M^(-beta/nu) F(t M^(1/nu)),     t = g~/g~_c - 1,

with M the bare mass eta^2 (or the renormalised M_lambda). For
Q = <x~^2> both ratios are 1/3. :func:`loglog_fit` regresses ln Q on
ln eta, so its slope at criticality is -2 beta/nu.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import minimize

from .analytic import critical_coupling
from .model import ModelParams
from .scalingfn import ScalingCurve, scaled_variables
from .solver import CUTOFF_CEILING, ConvergenceError, observables

HEADER = ["eta", "lambda", "g_tilde", "quantity", "value"]


class CollapseError(ValueError):
    pass


@dataclass(frozen=True)
class Record:
    eta: float
    lam: float
    g_tilde: float
    quantity: str
    value: float

    @property
    def key(self):
        return (self.quantity, self.lam, self.eta, self.g_tilde)


@dataclass
class SweepDataset:
    records: list[Record]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for r in self.records:
            k = (r.eta, r.lam, r.g_tilde, r.quantity)
            if k in seen:
                raise CollapseError(f"duplicate record {k}")
            if not math.isfinite(r.value):
                raise CollapseError(f"non-finite value at {k}")
            seen.add(k)
        self.records = sorted(self.records, key=lambda r: r.key)

    def select(self, quantity: str, lam: float | None = None, g_tilde: float | None = None,
               etas: Iterable[float] | None = None) -> list[Record]:
        etas = None if etas is None else set(etas)
        return [r for r in self.records
                if r.quantity == quantity
                and (lam is None or r.lam == lam)
                and (g_tilde is None or r.g_tilde == g_tilde)
                and (etas is None or r.eta in etas)]

    def scaled(self, factor: float) -> "SweepDataset":
        return SweepDataset([Record(r.eta, r.lam, r.g_tilde, r.quantity, r.value * factor)
                             for r in self.records], dict(self.metadata))

    def without_eta(self, eta: float) -> "SweepDataset":
        return SweepDataset([r for r in self.records if r.eta != eta], dict(self.metadata))

    def to_csv(self, path: str | Path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(HEADER)
            for r in self.records:
                w.writerow([repr(float(r.eta)), repr(float(r.lam)), repr(float(r.g_tilde)),
                            r.quantity, repr(float(r.value))])

    @classmethod
    def from_csv(cls, path: str | Path) -> "SweepDataset":
        with open(path) as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != HEADER:
                raise CollapseError(f"unexpected header {header}")
            recs = [Record(float(e), float(l), float(g), q, float(v)) for e, l, g, q, v in reader]
        return cls(recs)


def soft_quantity(lam: float) -> str:
    """Observable that diverges at the transition: <x~^2> for lam > 0, <p^2>/eta for lam < 0."""
    if lam == 0:
        raise CollapseError("both quadratures are soft on the JC line")
    return "x2_scaled" if lam > 0 else "p2_over_eta"


def _observe(args):
    eta, lam, g, quantities, tol, cutoff_max = args
    obs = observables(ModelParams(eta, g, lam), tol, cutoff_max=cutoff_max).as_dict()
    return [Record(eta, lam, g, q, float(obs[q])) for q in quantities]


def generate_dataset(points: Sequence[tuple[float, float, float]],
                     quantities: Sequence[str] = ("x2_scaled",), tol: float = 1e-10,
                     workers: int = 1, cutoff_max: int = CUTOFF_CEILING) -> SweepDataset:
    """Solve the full model at (eta, lam, g~) points; output order is by key, not completion."""
    jobs = [(float(e), float(l), float(g), tuple(quantities), tol, cutoff_max)
            for e, l, g in points]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_observe, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        chunks = [_observe(j) for j in jobs]
    settings = json.dumps({"tol": tol, "quantities": list(quantities)}, sort_keys=True)
    meta = {"solver": "parity-sector tridiagonal", "tol": tol,
            "settings_hash": hashlib.sha256(settings.encode()).hexdigest()[:16]}
    return SweepDataset([r for c in chunks for r in c], meta)


@dataclass(frozen=True)
class LogLogFit:
    slope: float
    curvature: float
    slope_se: float
    curvature_se: float


def _loglog(etas, values) -> LogLogFit:
    etas, values = np.asarray(etas, float), np.asarray(values, float)
    if len(np.unique(etas)) < 4:
        raise CollapseError("need at least 4 distinct eta values")
    if np.any(values <= 0):
        raise CollapseError("log-log fit needs positive values")
    x, y = np.log(etas), np.log(values)
    x_c = x - x.mean()
    coef, cov = np.polyfit(x_c, y, 2, cov="unscaled")
    resid = y - np.polyval(coef, x_c)
    dof = max(len(x) - 3, 1)
    cov = cov * float(resid @ resid) / dof
    return LogLogFit(slope=float(coef[1]), curvature=float(coef[0]),
                     slope_se=float(math.sqrt(max(cov[1, 1], 0))),
                     curvature_se=float(math.sqrt(max(cov[0, 0], 0))))


def loglog_fit(dataset: SweepDataset, g_tilde: float, quantity: str, lam: float | None = None) -> LogLogFit:
    """Quadratic fit of ln Q against ln eta (centred) at one coupling.

    ``slope`` is the linear coefficient at the mean ln eta.
    """
    recs = dataset.select(quantity, lam, g_tilde)
    return _loglog([r.eta for r in recs], [r.value for r in recs])


@dataclass(frozen=True)
class CriticalEstimate:
    g_c: float
    error: float
    couplings: tuple[float, ...]
    curvatures: tuple[float, ...]


def locate_critical(dataset: SweepDataset, quantity: str, lam: float,
                    g_grid: Sequence[float] | None = None) -> CriticalEstimate:
    """Coupling where the log-log curvature changes sign.

    With several sign changes the one closest to the steepest curvature
    rise is used; the error is half the bracketing grid cell.
    """
    if g_grid is None:
        g_grid = sorted({r.g_tilde for r in dataset.select(quantity, lam)})
    g_grid = np.asarray(sorted(g_grid), float)
    curv = np.array([loglog_fit(dataset, g, quantity, lam).curvature for g in g_grid])
    idx = np.where(np.sign(curv[:-1]) * np.sign(curv[1:]) < 0)[0]
    if len(idx) == 0:
        raise CollapseError(f"no curvature sign change for lam={lam} in [{g_grid[0]}, {g_grid[-1]}]")
    j = idx[np.argmax(curv[idx + 1] - curv[idx])]
    g0, g1, c0, c1 = g_grid[j], g_grid[j + 1], curv[j], curv[j + 1]
    root = g0 - c0 * (g1 - g0) / (c1 - c0)
    return CriticalEstimate(float(root), float((g1 - g0) / 2), tuple(g_grid), tuple(curv))


def _mass(r: Record, mass_mode: str) -> float:
    if mass_mode == "bare":
        return r.eta**2
    if mass_mode == "renormalized":
        if r.lam == 0:
            raise CollapseError("M_lambda is undefined at lam = 0")
        a = abs(r.lam)
        return r.eta**2 * (1 + a) ** 2 / (4 * a)
    raise ValueError(f"unknown mass_mode {mass_mode!r}")


def _reduced(r: Record, g_c) -> float:
    if g_c is None:
        gc = critical_coupling(r.lam)
    elif isinstance(g_c, Mapping):
        gc = g_c[r.lam]
    else:
        gc = g_c
    return r.g_tilde / gc - 1


def rescale(records: Sequence[Record], g_c, one_over_nu: float, beta_over_nu: float,
            mass_mode: str = "bare"):
    """(series id, v, ln y) arrays with v = t M^(1/nu), y = M^(beta/nu) Q."""
    series, v, ln_y = [], [], []
    for r in records:
        if r.value <= 0:
            raise CollapseError("collapse needs positive values")
        m = _mass(r, mass_mode)
        series.append((r.eta, r.lam))
        v.append(_reduced(r, g_c) * m**one_over_nu)
        ln_y.append(beta_over_nu * math.log(m) + math.log(r.value))
    return series, np.array(v), np.array(ln_y)


COINCIDE_TOL = 1e-9


def collapse_residual(dataset: SweepDataset, quantity: str, g_c, one_over_nu: float,
                      beta_over_nu: float, mass_mode: str = "bare",
                      lam: float | None = None) -> float:
    """Mean squared deviation of ln y from a master curve built from the other series.

    For a point of series s, every other series contributes its neighbours
    bracketing v (or the coincident point). The master value is a
    least-squares line through these pooled neighbours, evaluated at v.
    Every series gets equal weight, whatever its v spacing. Working in ln y
    makes the residual blind to the normalisation of Q. A lone series has
    no partners and scores 0; series that never overlap score +inf.
    """
    recs = dataset.select(quantity, lam)
    series, v, ln_y = rescale(recs, g_c, one_over_nu, beta_over_nu, mass_mode)
    groups = {}
    for i, key in enumerate(series):
        groups.setdefault(key, []).append(i)
    sorted_groups = {}
    for key, idx in groups.items():
        idx = np.array(idx)
        order = np.argsort(v[idx], kind="stable")
        sorted_groups[key] = (v[idx][order], ln_y[idx][order])
    if len(sorted_groups) < 2:
        return 0.0
    total, count = 0.0, 0
    for i in range(len(v)):
        nv, ny = [], []
        for key, (gv, gy) in sorted_groups.items():
            if key == series[i]:
                continue
            j = int(np.searchsorted(gv, v[i]))
            # coincidence up to the rounding of the g -> v round trip
            hit = [k for k in (j - 1, j) if 0 <= k < len(gv) and abs(gv[k] - v[i]) <= COINCIDE_TOL * (1 + abs(v[i]))]
            if hit:
                nv.append(gv[hit[0]]), ny.append(gy[hit[0]])
            elif 0 < j < len(gv):
                nv += [gv[j - 1], gv[j]]
                ny += [gy[j - 1], gy[j]]
        if not nv:
            continue
        nv, ny = np.array(nv) - v[i], np.array(ny)
        if np.ptp(nv) == 0:
            fit = ny.mean()
        else:
            fit = np.polyfit(nv, ny, 1)[1]
        total += (ln_y[i] - fit) ** 2
        count += 1
    return total / count if count else math.inf


@dataclass(frozen=True)
class CollapseFit:
    g_c: float
    beta_over_nu: float
    one_over_nu: float
    residual: float
    se_estimates: dict
    used_mass: str
    iterations: int

    def report(self) -> str:
        d = asdict(self)
        se = d.pop("se_estimates")
        lines = [f"{k} = {v!r}" for k, v in d.items()]
        lines += [f"se_{k} = {v!r}" for k, v in sorted(se.items())]
        return "\n".join(lines) + "\n"


def _minimise(dataset, quantity, init, mass_mode, lam, xatol):
    def obj(z):
        g, inv_nu, b = z
        if g <= 0 or inv_nu <= 0:
            return math.inf
        return collapse_residual(dataset, quantity, g, inv_nu, b, mass_mode, lam=lam)

    x0 = np.asarray(init, float)
    simplex = np.array([x0, x0 + [0.002 * x0[0], 0, 0], x0 + [0, 0.03, 0], x0 + [0, 0, 0.03]])
    res = minimize(obj, x0, method="Nelder-Mead",
                   options={"xatol": xatol, "fatol": 1e-12, "maxiter": 4000,
                            "initial_simplex": simplex})
    if not res.success:
        raise ConvergenceError(f"simplex did not converge: {res.message}", float(res.fun))
    return res


def fit_exponents(dataset: SweepDataset, quantity: str, init=None, mass_mode: str = "bare",
                  lam: float | None = None, error_bars: bool = True, xatol: float = 1e-5) -> CollapseFit:
    """Simplex fit of (g~_c, 1/nu, beta/nu) minimising :func:`collapse_residual`.

    ``init`` defaults to the curvature root and the critical log-log slope.
    Uncertainties are the max spread over leave-one-eta-out refits.
    """
    recs = dataset.select(quantity, lam)
    etas = sorted({r.eta for r in recs})
    if len(etas) < 3:
        raise CollapseError("need at least 3 eta values")
    if init is None:
        if lam is None:
            raise CollapseError("automatic init needs a single lam")
        crit = locate_critical(dataset, quantity, lam)
        nearest = min({r.g_tilde for r in recs}, key=lambda g: abs(g - crit.g_c))
        slope = loglog_fit(dataset, nearest, quantity, lam).slope
        init = (crit.g_c, 0.3, -slope / 2)
    res = _minimise(dataset, quantity, init, mass_mode, lam, xatol)
    g, inv_nu, b = (float(z) for z in res.x)
    se = {}
    if error_bars:
        fits = [_minimise(dataset.without_eta(e), quantity, res.x, mass_mode, lam, xatol).x
                for e in etas]
        spread = np.max(np.abs(np.array(fits) - res.x), axis=0)
        se = {"g_c": float(spread[0]), "one_over_nu": float(spread[1]), "beta_over_nu": float(spread[2])}
    return CollapseFit(g, b, inv_nu, float(res.fun), se, mass_mode, int(res.nit))


@dataclass(frozen=True)
class TheoryCheck:
    max_rel_dev: float
    mean_rel_dev: float
    points: tuple  # (eta, lam, g~, quantity, v, measured, predicted)


def theory_scaling_check(dataset: SweepDataset, curve: ScalingCurve, n: int = 1,
                         quantities: Sequence[str] = ("x2", "p2")) -> TheoryCheck:
    """Relative deviation of <x^2n>, <p^2n> from length^(+-n) X_n(v), P_n(v).

    For lam < 0 the roles of x and p are exchanged (soft quadrature is p).
    ``x2``/``p2`` records hold the raw moments <x^2>, <p^2> (n = 1).
    """
    rows = []
    for q in quantities:
        for r in dataset.select(q):
            if r.lam == 0:
                raise CollapseError("no lam = 0 records in the universal check")
            sv = scaled_variables(ModelParams(r.eta, r.g_tilde, r.lam))
            soft = q[0] == sv.soft
            if soft:
                pred = sv.length**n * float(curve.x(n, sv.v))
            else:
                pred = sv.length**-n * float(curve.p(n, sv.v))
            rows.append((r.eta, r.lam, r.g_tilde, q, sv.v, r.value, pred))
    if not rows:
        raise CollapseError("no matching records")
    dev = np.array([abs(m / p - 1) for *_, m, p in rows])
    return TheoryCheck(float(dev.max()), float(dev.mean()), tuple(rows))


def collapse_points(lam: float, etas: Sequence[float], v_values: Sequence[float],
                    g_c: float | None = None, mass_mode: str = "bare"):
    """(eta, lam, g~) points at fixed scaled couplings v around g~_c."""
    g_c = critical_coupling(lam) if g_c is None else g_c
    pts = []
    for eta in etas:
        m = _mass(Record(eta, lam, g_c, "", 1.0), mass_mode)
        for v in v_values:
            pts.append((float(eta), float(lam), float(g_c * (1 + v * m ** (-1 / 3)))))
    return pts
