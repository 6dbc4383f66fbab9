"""Closed-form eta -> infinity results and effective Hamiltonians.

Step functions use theta(0) = 0, so the order parameter and the energy
correction vanish exactly at xi = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .model import BasisSpec, ModelParams, TruncatedOperator

__all__ = [
    "PhasePoint", "phase_point", "normal_gap", "critical_coupling", "landau_branches",
    "order_parameter", "gs_energy_classical", "lambda_slope_jump", "superradiant_expectations",
    "effective_mass", "alpha_coefficients", "boson_operators", "resummed_heff_ground",
    "sw2_heff", "sw4_heff", "DomainError",
]


class DomainError(ValueError):
    """Argument outside the region where a closed form applies."""


def normal_gap(xi: float, xi_prime: float) -> float:
    """Normal-phase excitation gap in units of 1/eta."""
    if not (0 <= abs(xi) <= 1 and 0 <= abs(xi_prime) <= 1):
        raise DomainError(f"(xi, xi')=({xi}, {xi_prime}) is outside the normal phase")
    return math.sqrt((1 - xi**2) * (1 - xi_prime**2))


def critical_coupling(lam: float) -> float:
    return 2 / (1 + abs(lam))


def landau_branches(x_tilde, xi):
    """Classical-oscillator energies (E+, E-) at rescaled coordinate x~."""
    x_tilde = np.asarray(x_tilde, dtype=float)
    root = np.sqrt(1 + 2 * xi**2 * x_tilde**2)
    return (x_tilde**2 + root) / 2, (x_tilde**2 - root) / 2


def order_parameter(xi: float) -> float:
    """Positive broken-symmetry minimum x~_0 (0 for xi <= 1)."""
    if xi < 0:
        raise DomainError("xi must be non-negative")
    if xi <= 1:
        return 0.0
    return math.sqrt((xi**2 - xi**-2) / 2)


def gs_energy_classical(xi: float) -> float:
    if xi < 0:
        raise DomainError("xi must be non-negative")
    if xi <= 1:
        return -0.5
    return -0.5 - (xi**2 + xi**-2 - 2) / 4


def gs_energy_curvature_classical(xi: float) -> float:
    """d^2 E_gs / d xi^2 of the classical energy (0 below threshold)."""
    if xi <= 1:
        return 0.0
    return -0.5 * (1 + 3 * xi**-4)


def lambda_slope_jump(xi: float, g_tilde: float) -> tuple[float, float]:
    """One-sided d E_gs / d lambda at lambda -> 0+ and 0- (fixed g~)."""
    s = (xi - xi**-3) * g_tilde / 4 if xi > 1 else 0.0
    return -s, s


@dataclass(frozen=True)
class PhasePoint:
    lam: float
    g_tilde: float
    xi: float
    xi_prime: float
    phase: str
    order_parameter: float
    gap: float
    gs_energy: float


def phase_point(lam: float, g_tilde: float) -> PhasePoint:
    """Classify (lam, g~) and attach the eta -> infinity observables.

    ``order_parameter`` is x~_0^2 in the x phase and the p analogue in the
    p phase; ``gap`` is nan inside a superradiant phase.
    """
    xi, xi_p = g_tilde * (1 + lam) / 2, g_tilde * (1 - lam) / 2
    if abs(xi) <= 1 and abs(xi_p) <= 1:
        return PhasePoint(lam, g_tilde, xi, xi_p, "normal", 0.0, normal_gap(xi, xi_p), -0.5)
    if lam > 0:
        phase, soft = "superradiant_x", xi
    elif lam < 0:
        phase, soft = "superradiant_p", xi_p
    else:
        # JC line: both quadratures soft; x~_0^2 is half the lam != 0 value
        phase, soft = "superradiant_x", xi
        return PhasePoint(lam, g_tilde, xi, xi_p, "jc", order_parameter(soft) ** 2 / 2,
                          math.nan, gs_energy_classical(soft))
    return PhasePoint(lam, g_tilde, xi, xi_p, phase, order_parameter(soft) ** 2,
                      math.nan, gs_energy_classical(soft))


def superradiant_expectations(params: ModelParams) -> dict[str, float]:
    """Leading large-eta ground-state values in the x-type superradiant phase.

    Keys: ``x2_scaled`` = <x^2>/eta, ``p2``, ``szx_scaled`` = <sigma_z x>/sqrt(eta),
    ``syp`` = <sigma_y p> (which decays like eta^-1/2).
    """
    lam, xi, eta = params.lam, params.xi, params.eta
    if lam <= 0 or xi <= 1:
        raise DomainError("requires lam > 0 and xi > 1")
    root = math.sqrt(xi**4 - 1)
    return {
        "x2_scaled": (xi**2 - xi**-2) / 2,
        "p2": (1 + lam) / (4 * math.sqrt(lam)) * root / xi**2,
        "szx_scaled": -(xi - xi**-3) / math.sqrt(2),
        "syp": xi**-3 / math.sqrt(2 * eta) * (1 - (1 - lam) / (2 * math.sqrt(lam)) * root),
    }


@dataclass(frozen=True)
class EffectiveMass:
    kinetic_factor: float
    mass: float


def effective_mass(lam: float, xi: float, eta: float = 1.0) -> EffectiveMass:
    """Kinetic factor c = 1 - xi'^2 / sqrt(1 + 2 xi^2 x~_0^2) and mass eta^2 / c."""
    if lam <= 0:
        raise DomainError("effective mass requires lam > 0")
    xi_p = xi * (1 - lam) / (1 + lam)
    x0 = order_parameter(xi)
    c = 1 - xi_p**2 / math.sqrt(1 + 2 * xi**2 * x0**2)
    return EffectiveMass(c, eta**2 / c)


def alpha_coefficients(n: int) -> float:
    """n-th coefficient of sqrt(1/4 + V^2) = sum_n alpha_n V^(2n)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return 0.5
    # (2n - 3)!! with (-1)!! = 1
    dfact = math.prod(range(2 * n - 3, 0, -2)) if n > 1 else 1
    return (-2) ** (n - 1) * dfact / math.factorial(n)


def boson_operators(n_max: int, pad: int = 4):
    """Truncated (x^2, p^2, x, p) for photons 0..n_max.

    Squares are formed in a basis padded by ``pad`` levels and then cut, so
    x^2 and p^2 carry no truncation artefact inside 0..n_max. ``p`` is
    returned as the real antisymmetric matrix -i p.
    """
    big = n_max + 1 + pad
    a = np.diag(np.sqrt(np.arange(1, big)), 1)
    x = (a + a.T) / math.sqrt(2)
    ip = (a.T - a) / math.sqrt(2)  # p = i * ip
    x2 = (x @ x)[: n_max + 1, : n_max + 1]
    p2 = -(ip @ ip)[: n_max + 1, : n_max + 1]
    return x2, p2, x[: n_max + 1, : n_max + 1], ip[: n_max + 1, : n_max + 1]


def resummed_heff_ground(params: ModelParams, n_max: int = 200, k: int = 1):
    """Lowest eigenpairs of (p^2 + x^2)/(2 eta) - sqrt(1/4 + (xi^2 x^2 + xi'^2 p^2 - xi xi')/(2 eta)).

    The square root is taken spectrally; returns (energies, vectors, (x2, p2)).
    """
    eta, xi, xi_p = params.eta, params.xi, params.xi_prime
    x2, p2, _, _ = boson_operators(n_max)
    one = np.eye(n_max + 1)
    inner = 0.25 * one + (xi**2 * x2 + xi_p**2 * p2 - xi * xi_p * one) / (2 * eta)
    w, u = np.linalg.eigh(inner)
    if w.min() < -1e-12:
        raise DomainError(f"inner operator not positive semidefinite (min eigenvalue {w.min():.3e})")
    root = (u * np.sqrt(np.clip(w, 0, None))) @ u.T
    h = (x2 + p2) / (2 * eta) - root
    h = (h + h.T) / 2  # spectral sqrt is symmetric only to rounding
    e, v = sla.eigh(h, subset_by_index=(0, k - 1))
    return e, v, (x2, p2)


def _photon_only(basis: BasisSpec):
    if basis.with_spin:
        raise ValueError("effective Hamiltonians need a photon-only basis (with_spin=False)")


def _sw_pieces(params: ModelParams, n_max: int):
    eta, g, lam = params.eta, params.g_tilde, params.lam
    x2, p2, _, _ = boson_operators(n_max, pad=8)
    one = np.eye(n_max + 1)
    h0 = -0.5 * one + (x2 + p2) / (2 * eta)
    second = -(g**2 / 8) * eta / (eta**2 - 1) * (
        (1 + lam) ** 2 * x2 + (1 - lam) ** 2 * p2 - (1 - lam**2) * one
        + (1 - lam**2) / eta * (x2 + p2) - (1 + lam**2) / eta * one
    )
    return h0, second, x2, p2, one


def sw2_heff(params: ModelParams, basis: BasisSpec) -> TruncatedOperator:
    """Unperturbed plus full second-order Schrieffer-Wolff term (sigma_x = -1 block)."""
    _photon_only(basis)
    if params.eta == 1:
        raise DomainError("second-order denominator eta^2 - 1 vanishes at eta = 1")
    h0, second, *_ = _sw_pieces(params, basis.n_max)
    return TruncatedOperator(basis, sp.csr_matrix(h0 + second), "H_sw2")


def sw4_heff(params: ModelParams, basis: BasisSpec) -> TruncatedOperator:
    """sw2_heff plus the leading fourth-order term g~^4/(64 eta^2) [..]^2.

    Acts on photons only; pass a ``BasisSpec(n_max, with_spin=False)``.
    """
    if params.eta == 1:
        raise DomainError("second-order denominator eta^2 - 1 vanishes at eta = 1")
    _photon_only(basis)
    g, lam, eta = params.g_tilde, params.lam, params.eta
    n = basis.n_max
    # square formed in a padded basis, then cut
    pad = n + 8
    x2b, p2b, _, _ = boson_operators(pad, pad=8)
    a_big = (1 + lam) ** 2 * x2b + (1 - lam) ** 2 * p2b - (1 - lam**2) * np.eye(pad + 1)
    fourth = g**4 / (64 * eta**2) * (a_big @ a_big)[: n + 1, : n + 1]
    h0, second, *_ = _sw_pieces(params, n)
    return TruncatedOperator(basis, sp.csr_matrix(h0 + second + fourth), "H_sw4")
