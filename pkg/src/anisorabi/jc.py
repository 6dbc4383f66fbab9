"""Jaynes-Cummings (lambda = 0) limit.

At lam = 0 the excitation number q is conserved and H splits into 2x2
blocks {|q,-x>, |q-1,+x>}. The lower eigenvalue of block q is

    E_JC(q) = q/eta - 1/2 sqrt((1 - 1/eta)^2 + 4 xi^2 q / eta)

which is exact in the coordinate gauge of :mod:`anisorabi.model`.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

CROSSING_XTOL = 1e-12


def _check_eta(eta):
    if eta <= 1:
        raise ValueError(f"eta must exceed 1, got {eta}")


def jc_energy(q, xi, eta):
    """Lower-branch energy of excitation sector q (vectorised over q)."""
    _check_eta(eta)
    q = np.asarray(q)
    if np.any(q < 0):
        raise ValueError("q must be non-negative")
    out = q / eta - 0.5 * np.sqrt((1 - 1 / eta) ** 2 + 4 * xi**2 * q / eta)
    return out if out.ndim else float(out)


def jc_mixing(q: int, xi: float, eta: float) -> tuple[float, float]:
    """Amplitudes (alpha_q, beta_q) of the lower state alpha|q,-x> + beta|q-1,+x>."""
    _check_eta(eta)
    if q == 0:
        return 1.0, 0.0
    half_gap = (1 - 1 / eta) / 2
    coupling = xi * math.sqrt(q / eta)
    theta = 0.5 * math.atan2(coupling, half_gap)
    return math.cos(theta), -math.sin(theta)


@dataclass(frozen=True)
class JcPoint:
    eta: float
    xi: float
    q0: int
    energy: float
    crossings: tuple[float, ...]


def jc_ground(xi: float, eta: float, q_max: int | None = None) -> JcPoint:
    """Ground excitation number; ties go to the smaller q."""
    _check_eta(eta)
    if q_max is None:
        q_max = int(max(16, 4 * eta * max(xi**2 - 1, 0.0) + 16))
    q = np.arange(q_max + 1)
    e = jc_energy(q, xi, eta)
    q0 = int(np.argmin(e))  # argmin returns the first minimiser
    if q0 == q_max:
        raise ValueError(f"minimiser at q_max={q_max}; increase q_max")
    return JcPoint(eta, xi, q0, float(e[q0]), tuple(level_crossings(eta, min(q_max, 8), "leading")))


def _crossing_exact(q: int, eta: float) -> float:
    f = lambda xi: jc_energy(q + 1, xi, eta) - jc_energy(q, xi, eta)
    centre = 1 + q / eta
    return brentq(f, centre - 2 / eta, centre + 2 / eta, xtol=CROSSING_XTOL)


def level_crossings(eta: float, q_max: int, mode: str = "exact") -> list[float]:
    """Couplings xi_q (q = 0..q_max-1) where the ground sector moves q -> q+1."""
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    if mode == "leading":
        return [1 + q / eta for q in range(q_max)]
    if mode == "exact":
        return [_crossing_exact(q, eta) for q in range(q_max)]
    raise ValueError(f"unknown mode {mode!r}")


DELANNOY_LIMIT = 2**63 - 1


@lru_cache(maxsize=None)
def _delannoy(m: int, n: int) -> int:
    if m == 0 or n == 0:
        return 1
    return _delannoy(m - 1, n) + _delannoy(m, n - 1) + _delannoy(m - 1, n - 1)


def delannoy(m: int, n: int, limit: int | None = DELANNOY_LIMIT) -> int:
    """Delannoy number D(m, n); raises OverflowError above ``limit`` (None disables)."""
    if m < 0 or n < 0:
        raise ValueError("m, n must be non-negative")
    # fill the table bottom-up so deep recursion never happens
    for k in range(0, max(m, n) + 1, 64):
        _delannoy(min(k, m), min(k, n))
    d = _delannoy(m, n)
    if limit is not None and d > limit:
        raise OverflowError(f"D({m},{n}) exceeds {limit}")
    return d


def double_factorial(k: int) -> int:
    return math.prod(range(k, 0, -2)) if k > 0 else 1


def jc_scaling_function(n: int, eta_t: float) -> float:
    """<x^2n> = <p^2n> staircase versus eta t, with theta(0) = 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    steps = 0 if eta_t < 0 else math.floor(eta_t) + 1
    # telescoping sum: 1 + sum_{q < steps} (D(n,q+1) - D(n,q)) = D(n, steps)
    return double_factorial(2 * n - 1) / 2**n * delannoy(n, steps)


def fock_moment(q: int, n: int) -> float:
    """<q| x^2n |q> by explicit matrix powers (independent of the Delannoy route)."""
    size = q + n + 1
    a = np.diag(np.sqrt(np.arange(1, size, dtype=float)), 1)
    x = (a + a.T) / math.sqrt(2)
    vec = np.zeros(size)
    vec[q] = 1.0
    for _ in range(n):
        vec = x @ vec
    return float(vec @ vec)


def staircase_table(eta: float, t_values: Sequence[float], n: int = 1):
    """Rows (eta, t, xi, q0, x2n) with q0 from the theta(0) = 1 convention."""
    rows = []
    for t in t_values:
        eta_t = eta * t
        q0 = 0 if eta_t < 0 else math.floor(eta_t) + 1
        rows.append((eta, float(t), 1 + float(t), q0, jc_scaling_function(n, eta_t)))
    return rows


def write_staircase_csv(path: str | Path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["eta", "t", "xi", "q0", "x2n"])
        for eta, t, xi, q0, val in rows:
            w.writerow([repr(float(eta)), repr(t), repr(xi), q0, repr(float(val))])
