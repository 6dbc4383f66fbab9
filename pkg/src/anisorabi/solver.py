"""Ground-state eigensolves, cutoff control and energy derivatives.

Two routes are provided:

* :func:`lowest_eigenpairs` works on any :class:`TruncatedOperator`
  (dense LAPACK below ``DENSE_THRESHOLD``, Lanczos above it);
* :func:`observables` exploits the parity structure of H: each parity
  sector is a real tridiagonal chain, solved with ``eigh_tridiagonal``.
  This is what makes eta ~ 2^12 superradiant points cheap.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, asdict

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from .model import BasisSpec, ModelParams, TruncatedOperator, sector_chain

log = logging.getLogger(__name__)

DENSE_THRESHOLD = 2048
CUTOFF_CEILING = 2**19


class ConvergenceError(RuntimeError):
    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


@dataclass(frozen=True)
class EigenResult:
    k: int
    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    basis: BasisSpec


@dataclass(frozen=True)
class Observables:
    energy: float
    energy_per_omega_scaled: float
    x2: float
    p2: float
    x2_scaled: float
    p2_over_eta: float
    sx: float
    szx: float
    syp: float
    gap_total: float
    gap_parity: float
    ground_parity: int
    cutoff_used: int
    converged: bool

    def as_dict(self):
        return asdict(self)


def _residuals(matrix, values, vectors):
    r = matrix @ vectors - vectors * values
    return np.linalg.norm(r, axis=0)


def lowest_eigenpairs(op: TruncatedOperator, k: int = 1, tol: float = 1e-9,
                      dense_threshold: int = DENSE_THRESHOLD, maxiter: int | None = None) -> EigenResult:
    dim = op.basis.dim
    if not 0 < k < dim:
        raise ValueError(f"need 0 < k < dim={dim}, got k={k}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if dim <= dense_threshold:
        values, vectors = sla.eigh(op.dense(), subset_by_index=(0, k - 1))
    else:
        # fixed start vector keeps Lanczos deterministic
        v0 = np.linspace(1.0, 2.0, dim)
        try:
            values, vectors = spla.eigsh(op.matrix, k=k, which="SA", tol=tol * 1e-2,
                                         v0=v0, maxiter=maxiter or 50 * dim)
        except spla.ArpackNoConvergence as exc:
            best = None
            if len(exc.eigenvalues):
                best = float(np.max(_residuals(op.matrix, exc.eigenvalues, exc.eigenvectors)))
            raise ConvergenceError(f"Lanczos did not converge for {op.label} (dim={dim})", best) from exc
        order = np.argsort(values)
        values, vectors = values[order], vectors[:, order]
    res = _residuals(op.matrix, values, vectors)
    if np.any(res > tol * max(1.0, np.max(np.abs(values)))):
        raise ConvergenceError(f"residual {res.max():.2e} above tol {tol:.1e}", float(res.max()))
    return EigenResult(k, values, vectors, res, op.basis)


def sector_lowest(params: ModelParams, n_max: int, parity: int, k: int = 2):
    """k lowest eigenpairs of one parity sector (values, vectors, spins)."""
    d, e, spins = sector_chain(params, n_max, parity)
    k = min(k, n_max + 1)
    values, vectors = sla.eigh_tridiagonal(d, e, select="i", select_range=(0, k - 1))
    return values, vectors, spins


def _chain_expectations(c, spins, eta):
    """<x^2>, <p^2>, <sigma_x>, <sigma_z x>, <sigma_y p> of a real chain vector."""
    n = np.arange(len(c))
    w = c * c
    diag = float(np.dot(w, n + 0.5))
    two = float(np.dot(c[:-2] * c[2:], np.sqrt((n[:-2] + 1) * (n[:-2] + 2))))
    one_amp = c[:-1] * c[1:] * np.sqrt((n[:-1] + 1) / 2)
    x2 = diag + two
    p2 = diag - two
    sx = float(np.dot(w, spins))
    szx = 2 * float(np.sum(one_amp))
    syp = 2 * float(np.dot(one_amp, spins[:-1]))
    return x2, p2, sx, szx, syp


def _solve_point(params: ModelParams, n_max: int):
    lo_e, lo_v, lo_s = sector_lowest(params, n_max, -1)
    hi_e, hi_v, hi_s = sector_lowest(params, n_max, +1)
    if lo_e[0] <= hi_e[0]:
        gs_par, e, v, s, other = -1, lo_e, lo_v, lo_s, hi_e
    else:
        gs_par, e, v, s, other = 1, hi_e, hi_v, hi_s, lo_e
    x2, p2, sx, szx, syp = _chain_expectations(v[:, 0], s, params.eta)
    scale = params.capital_omega
    gap_total = min(e[1], other[0]) - e[0]
    gap_parity = e[1] - e[0]
    return Observables(
        energy=float(e[0]),
        energy_per_omega_scaled=float(e[0]) / scale,
        x2=x2, p2=p2,
        x2_scaled=x2 / params.eta, p2_over_eta=p2 / params.eta,
        sx=sx, szx=szx, syp=syp,
        gap_total=float(gap_total) / scale, gap_parity=float(gap_parity) / scale,
        ground_parity=gs_par, cutoff_used=n_max, converged=False,
    )


def seed_cutoff(params: ModelParams) -> int:
    """Initial Fock cutoff from the classical order parameter."""
    xi_eff = max(abs(params.xi), abs(params.xi_prime))
    x0_sq = 0.0 if xi_eff <= 1 else (xi_eff**2 - xi_eff**-2) / 2
    return int(max(16, math.ceil(8 * params.eta * x0_sq)))


def _changes(a: Observables, b: Observables) -> float:
    rel = lambda u, v: abs(u - v) / max(abs(v), 1e-300)
    return max(rel(a.x2, b.x2), rel(a.p2, b.p2), abs(a.energy - b.energy))


def adapt_cutoff(params: ModelParams, tol_obs: float = 1e-10, cutoff_max: int = CUTOFF_CEILING,
                 seed: int | None = None) -> int:
    """Smallest doubling of the seed cutoff whose observables agree with the next doubling.

    <x^2> and <p^2> are compared relatively, E0 absolutely (Omega units).
    """
    if tol_obs <= 0:
        raise ValueError("tol_obs must be positive")
    n = seed if seed is not None else seed_cutoff(params)
    if n > cutoff_max:
        raise ConvergenceError(f"seed cutoff {n} exceeds ceiling {cutoff_max} at {params}")
    prev = _solve_point(params, n)
    while 2 * n <= cutoff_max:
        cur = _solve_point(params, 2 * n)
        if _changes(prev, cur) < tol_obs:
            return n
        n, prev = 2 * n, cur
    raise ConvergenceError(f"cutoff ceiling {cutoff_max} reached without convergence at {params}")


def observables(params: ModelParams, tol: float = 1e-10, n_max_hint: int | None = None,
                cutoff_max: int = CUTOFF_CEILING) -> Observables:
    """Converged ground-state observables at one parameter point."""
    n = adapt_cutoff(params, tol, cutoff_max, seed=n_max_hint)
    obs = _solve_point(params, n)
    return Observables(**{**obs.as_dict(), "converged": True})


def ground_energy(params: ModelParams, tol: float = 1e-10, n_max_hint: int | None = None) -> float:
    return observables(params, tol, n_max_hint).energy_per_omega_scaled


@dataclass(frozen=True)
class Derivative:
    value: float
    step: float


def _richardson_derivative(f, x0, step, order, max_halvings=6, rtol=1e-2):
    def stencil(h):
        if order == 1:
            return (f(x0 + h) - f(x0 - h)) / (2 * h)
        return (f(x0 + h) - 2 * f(x0) + f(x0 - h)) / h**2

    h = step
    est = stencil(h)
    for _ in range(max_halvings):
        finer = stencil(h / 2)
        if abs(finer - est) <= rtol * max(abs(finer), 1e-12):
            return Derivative(finer, h / 2)
        h, est = h / 2, finer
    log.warning("finite difference not settled after %d halvings (step %g)", max_halvings, h)
    return Derivative(est, h)


def energy_curvature_xi(params: ModelParams, step: float = 1e-3, tol: float = 1e-12) -> Derivative:
    """d^2 E_gs / d xi^2 at fixed lambda and eta."""
    if step <= 0:
        raise ValueError("step must be positive")
    lam, eta = params.lam, params.eta
    f = lambda xi: ground_energy(ModelParams.from_xi(eta, xi, lam), tol)
    return _richardson_derivative(f, params.xi, step, 2)


def energy_slope_lambda(params: ModelParams, step: float = 1e-3, tol: float = 1e-12) -> Derivative:
    """d E_gs / d lambda at fixed g~ and eta."""
    if step <= 0:
        raise ValueError("step must be positive")
    f = lambda lam: ground_energy(params.replace(lam=lam), tol)
    return _richardson_derivative(f, params.lam, step, 1)
