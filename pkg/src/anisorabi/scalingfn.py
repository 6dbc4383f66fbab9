"""Universal quartic-well eigenproblem and the scaled-variable bookkeeping.

    (-1/2 d^2/du^2 - v u^2 + u^4/4) phi_0 = E_0(v) phi_0

is discretised with second-order central differences on a uniform grid
and solved as a symmetric tridiagonal problem.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg as sla
from scipy.interpolate import CubicSpline

from .model import ModelParams

DEFAULT_H = 0.001
MAX_EXPANSIONS = 6
BOUNDARY_DECAY = 1e-8


class GridError(RuntimeError):
    pass


@dataclass(frozen=True)
class GridSpec:
    half_width: float
    points: int

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        if self.points < 201 or self.points % 2 == 0:
            raise ValueError(f"points must be odd and >= 201, got {self.points}")

    @property
    def spacing(self) -> float:
        return 2 * self.half_width / (self.points - 1)

    @property
    def u(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.points)

    @classmethod
    def with_spacing(cls, half_width: float, h: float) -> "GridSpec":
        n = int(math.ceil(2 * half_width / h))
        n += n % 2  # n intervals even -> odd point count, u = 0 on the grid
        return cls(half_width, max(n + 1, 201))

    @classmethod
    def default(cls, v: float, h: float = DEFAULT_H) -> "GridSpec":
        """Box of half width max(8, 3 sqrt(2 max(v, 1)) + 4); wells sit at |u| = sqrt(2v)."""
        half = max(8.0, 3 * math.sqrt(2 * max(v, 1.0)) + 4)
        return cls.with_spacing(half, h)

    def expanded(self) -> "GridSpec":
        return GridSpec.with_spacing(2 * self.half_width, self.spacing)


def _solve_on(v: float, grid: GridSpec):
    """Even-sector ground state on u >= 0, mirrored onto the full grid.

    The ground state is even, so phi_{-1} = phi_1 folds the central
    difference at u = 0 into a half-line chain; weighting phi_0 by 1/sqrt(2)
    keeps it symmetric. The spectrum equals the even part of the full grid
    problem, while parity holds exactly (a full-grid solve would mix in the
    odd partner of a deep double-well doublet at rounding level).
    """
    mid = grid.points // 2
    u = grid.u[mid:-1]  # u = 0 ... last interior point; Dirichlet wall at +L
    h = grid.spacing
    d = 1.0 / h**2 - v * u**2 + u**4 / 4
    e = np.full(len(u) - 1, -0.5 / h**2)
    e[0] = -1.0 / (math.sqrt(2) * h**2)
    (E0,), psi = sla.eigh_tridiagonal(d, e, select="i", select_range=(0, 0))
    half = psi[:, 0].copy()
    half[0] *= math.sqrt(2)
    if half.sum() < 0:
        half = -half
    phi = np.concatenate([[0.0], half[:0:-1], half, [0.0]])
    phi /= math.sqrt(np.trapezoid(phi**2, dx=h))
    return float(E0), phi


def solve_scaling_ode(v: float, grid: GridSpec | None = None):
    """Ground energy E_0(v) and normalised phi_0 samples on the (possibly expanded) grid.

    Returns ``(E0, phi, grid)``; the grid is expanded until |phi| at the
    outermost interior points falls below 1e-8 max|phi|.
    """
    grid = grid or GridSpec.default(v)
    for _ in range(MAX_EXPANSIONS + 1):
        E0, phi = _solve_on(v, grid)
        edge = max(abs(phi[1]), abs(phi[-2]))
        if edge < BOUNDARY_DECAY * np.max(np.abs(phi)):
            return E0, phi, grid
        grid = grid.expanded()
    raise GridError(f"ground state at v={v} not decayed at |u|={grid.half_width}")


def _derivative(f, h, n):
    for _ in range(n):
        f = np.gradient(f, h, edge_order=2)
    return f


def moments(phi: np.ndarray, grid: GridSpec, n: int):
    """(X_n, P_n) of a sampled ground state by trapezoidal quadrature."""
    u, h = grid.u, grid.spacing
    norm = np.trapezoid(phi**2, dx=h)
    x_n = np.trapezoid(phi**2 * u ** (2 * n), dx=h) / norm
    p_n = np.trapezoid(_derivative(phi, h, n) ** 2, dx=h) / norm
    return float(x_n), float(p_n)


@dataclass(frozen=True)
class ScalingCurve:
    v_samples: np.ndarray
    e0: np.ndarray
    xn: Mapping[int, np.ndarray]
    pn: Mapping[int, np.ndarray]
    grid_spacing: float
    convergence_estimate: np.ndarray = field(repr=False)

    def x(self, n: int, v):
        """Interpolated X_n(v); raises outside the tabulated range."""
        return self._interp(self.xn[n], v)

    def p(self, n: int, v):
        return self._interp(self.pn[n], v)

    def _interp(self, table, v):
        v = np.asarray(v, dtype=float)
        lo, hi = self.v_samples[0], self.v_samples[-1]
        if np.any(v < lo - 1e-12) or np.any(v > hi + 1e-12):
            raise ValueError(f"v outside tabulated range [{lo}, {hi}]")
        return CubicSpline(self.v_samples, table)(v)

    def to_csv(self, path: str | Path):
        ns = sorted(self.xn)
        header = ["v", "e0"] + [f"{k}{n}" for n in ns for k in ("x", "p")]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for i, v in enumerate(self.v_samples):
                row = [v, self.e0[i]] + [t[n][i] for n in ns for t in (self.xn, self.pn)]
                w.writerow([repr(float(x)) for x in row])

    @classmethod
    def from_csv(cls, path: str | Path) -> "ScalingCurve":
        with open(path) as fh:
            rows = list(csv.reader(fh))
        header, data = rows[0], np.array(rows[1:], dtype=float)
        xn = {int(c[1:]): data[:, i] for i, c in enumerate(header) if c.startswith("x")}
        pn = {int(c[1:]): data[:, i] for i, c in enumerate(header) if c.startswith("p")}
        return cls(data[:, 0], data[:, 1], xn, pn, float("nan"), np.full(len(data), np.nan))


def universal_functions(v_samples: Sequence[float], n_list: Sequence[int] = (1,),
                        h: float = DEFAULT_H) -> ScalingCurve:
    """Tabulate E_0, X_n, P_n; the convergence estimate is |E_0(h) - E_0(2h)| / 3."""
    v_samples = np.asarray(sorted(v_samples), dtype=float)
    if any(n < 1 for n in n_list):
        raise ValueError("moment orders must be >= 1")
    e0 = np.empty(len(v_samples))
    conv = np.empty(len(v_samples))
    xn = {n: np.empty(len(v_samples)) for n in n_list}
    pn = {n: np.empty(len(v_samples)) for n in n_list}
    for i, v in enumerate(v_samples):
        E0, phi, grid = solve_scaling_ode(v, GridSpec.default(v, h))
        coarse, _, _ = solve_scaling_ode(v, GridSpec.with_spacing(grid.half_width, 2 * grid.spacing))
        e0[i], conv[i] = E0, abs(E0 - coarse) / 3
        for n in n_list:
            xn[n][i], pn[n][i] = moments(phi, grid, n)
    return ScalingCurve(v_samples, e0, xn, pn, h, conv)


def default_v_samples():
    return np.round(np.arange(-60, 61) * 0.1, 10)


@dataclass(frozen=True)
class ScaledVariables:
    """Maps a parameter point onto (u, v).

    ``length`` is eta M^-1/3, so <q^2n> = length^n X_n(v) for the soft
    quadrature q and <conj^2n> = length^-n P_n(v) for its conjugate.
    ``soft`` names the soft quadrature: "x" for lam > 0, "p" for lam < 0.
    """

    mass: float
    t: float
    v: float
    u_scale: float
    length: float
    soft: str


def scaled_variables(params: ModelParams) -> ScaledVariables:
    lam = params.lam
    if lam == 0:
        raise ValueError("effective mass is not defined at lam = 0")
    if lam > 0:
        mass, t, soft = params.m_lambda, params.t, "x"
    else:
        mass, t, soft = params.replace(lam=-lam).m_lambda, params.t_prime, "p"
    return ScaledVariables(
        mass=mass,
        t=t,
        v=t * mass ** (1 / 3),
        u_scale=mass ** (1 / 6) / math.sqrt(params.eta),
        length=params.eta * mass ** (-1 / 3),
        soft=soft,
    )


def energy_expansion(params: ModelParams, curve: ScalingCurve | None = None) -> float:
    """Ground energy -1/2 + (1 - lam)/(2 eta (1 + lam)) + M^-2/3 E_0(t M^1/3)."""
    if params.lam <= 0:
        raise ValueError("energy expansion requires lam > 0")
    sv = scaled_variables(params)
    if curve is not None:
        e0 = float(CubicSpline(curve.v_samples, curve.e0)(sv.v))
    else:
        e0 = solve_scaling_ode(sv.v)[0]
    lam = params.lam
    return -0.5 + (1 - lam) / (2 * params.eta * (1 + lam)) + sv.mass ** (-2 / 3) * e0
