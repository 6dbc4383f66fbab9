"""Anisotropic quantum Rabi Hamiltonian in a truncated Fock x spin basis.

Energies are in units of the two-level splitting (Omega = 1) and use the
coordinate gauge

    H = (p^2 + x^2) / (2 eta) + sigma_x / 2
        + g~ [(1 + lam) sigma_z x + (1 - lam) sigma_y p] / sqrt(8 eta),

i.e. the oscillator carries its zero-point energy (a^dag a + 1/2) / eta.

Basis ordering (frozen): photon-major, spin innermost, with the spin
expressed in the sigma_x eigenbasis ``(+x, -x)``::

    row(n, s) = 2 * n + (0 if s == +1 else 1)

In this basis sigma_x is diagonal and every coupling term is real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

__all__ = [
    "ModelParams",
    "BasisSpec",
    "TruncatedOperator",
    "CutoffError",
    "build_hamiltonian",
    "build_parity",
    "dual_transform",
    "coupling_amplitudes",
    "sector_chain",
]


class CutoffError(ValueError):
    """Raised when a Fock cutoff is too small for the requested construction."""


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless parameter point (eta, g~, lambda).

    ``capital_omega`` is only an overall energy scale; operators built from
    the params are multiplied by it, everything else is Omega-free.
    """

    eta: float
    g_tilde: float
    lam: float
    capital_omega: float = 1.0

    def __post_init__(self):
        for name in ("eta", "g_tilde", "lam", "capital_omega"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite, got {getattr(self, name)!r}")
        if self.eta <= 0 or self.capital_omega <= 0:
            raise ValueError("eta and capital_omega must be positive")

    @classmethod
    def from_raw(cls, omega: float, capital_omega: float, g: float, lam: float) -> "ModelParams":
        """Convert physical (omega, Omega, g, lambda) into the internal bundle."""
        if not (omega > 0 and capital_omega > 0):
            raise ValueError("omega and capital_omega must be positive")
        g_c0 = math.sqrt(omega * capital_omega) / 2
        return cls(eta=capital_omega / omega, g_tilde=g / g_c0, lam=lam, capital_omega=capital_omega)

    @classmethod
    def from_xi(cls, eta: float, xi: float, lam: float) -> "ModelParams":
        """Parameter point at rescaled coupling xi = g~ (1 + lam) / 2."""
        if lam == -1:
            raise ValueError("xi does not fix g~ at lam = -1")
        return cls(eta=eta, g_tilde=2 * xi / (1 + lam), lam=lam)

    @property
    def omega(self) -> float:
        return self.capital_omega / self.eta

    @property
    def g_c0(self) -> float:
        return math.sqrt(self.omega * self.capital_omega) / 2

    @property
    def g(self) -> float:
        return self.g_tilde * self.g_c0

    @property
    def xi(self) -> float:
        return self.g_tilde * (1 + self.lam) / 2

    @property
    def xi_prime(self) -> float:
        return self.g_tilde * (1 - self.lam) / 2

    @property
    def t(self) -> float:
        return self.xi - 1

    @property
    def t_prime(self) -> float:
        return self.xi_prime - 1

    @property
    def big_m(self) -> float:
        """Bare mass M = eta^2."""
        return self.eta**2

    @property
    def m_lambda(self) -> float:
        """Renormalised mass eta^2 (1 + lam)^2 / (4 lam); lam > 0 only."""
        if self.lam <= 0:
            raise ValueError(f"m_lambda is defined only for lam > 0 (got lam={self.lam})")
        return self.eta**2 * (1 + self.lam) ** 2 / (4 * self.lam)

    def replace(self, **changes) -> "ModelParams":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class BasisSpec:
    """Photon numbers 0..n_max times the two sigma_x eigenstates.

    ``with_spin=False`` is the photon-only basis used by the projected
    effective Hamiltonians.
    """

    n_max: int
    with_spin: bool = True

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 0:
            raise ValueError(f"n_max must be a non-negative integer, got {self.n_max!r}")

    @property
    def dim(self) -> int:
        return (2 if self.with_spin else 1) * (self.n_max + 1)

    @staticmethod
    def index(n: int, s: int) -> int:
        return 2 * n + (0 if s > 0 else 1)

    @cached_property
    def photon(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_max + 1), 2)

    @cached_property
    def spin(self) -> np.ndarray:
        """sigma_x eigenvalue of every row."""
        return np.tile(np.array([1, -1]), self.n_max + 1)


@dataclass(frozen=True)
class TruncatedOperator:
    basis: BasisSpec
    matrix: sp.csr_matrix = field(repr=False)
    label: str = ""

    @property
    def shape(self):
        return self.matrix.shape

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()


def coupling_amplitudes(params: ModelParams) -> tuple[float, float]:
    """Hopping prefactors (from |n,-x> to |n+1,+x>, from |n,+x> to |n+1,-x>).

    The matrix element is the prefactor times sqrt((n + 1) / 2). The first
    is the counter-rotating channel (vanishes at lam = 0), the second the
    rotating one.
    """
    c_x = params.g_tilde * (1 + params.lam) / math.sqrt(8 * params.eta)
    c_p = params.g_tilde * (1 - params.lam) / math.sqrt(8 * params.eta)
    # sigma_y p is real: <n+1,+|sigma_y p|n,-> = -sqrt((n+1)/2), <n+1,-|.|n,+> = +sqrt((n+1)/2)
    return c_x - c_p, c_x + c_p


def build_hamiltonian(params: ModelParams, basis: BasisSpec) -> TruncatedOperator:
    if not basis.with_spin:
        raise ValueError("the full Hamiltonian needs the Fock x spin basis")
    if basis.n_max < 2:
        raise CutoffError(f"n_max must be >= 2, got {basis.n_max}")
    n = np.arange(basis.n_max + 1)
    s = basis.spin
    diag = (basis.photon + 0.5) / params.eta + 0.5 * s
    c_minus, c_plus = coupling_amplitudes(params)
    amp = np.sqrt((n[:-1] + 1) / 2)
    rows = np.concatenate([2 * n[:-1] + 1, 2 * n[:-1]])  # (n,-) and (n,+)
    cols = np.concatenate([2 * (n[:-1] + 1), 2 * (n[:-1] + 1) + 1])  # (n+1,+) and (n+1,-)
    vals = np.concatenate([c_minus * amp, c_plus * amp])
    off = sp.coo_matrix((vals, (rows, cols)), shape=(basis.dim, basis.dim))
    h = sp.diags(diag) + off + off.T
    h = params.capital_omega * h
    return TruncatedOperator(basis, sp.csr_matrix(h), "H")


def build_parity(basis: BasisSpec) -> TruncatedOperator:
    """Pi = sigma_x (-1)^(a^dag a); diagonal in the frozen basis."""
    d = basis.spin * (-1.0) ** basis.photon
    return TruncatedOperator(basis, sp.csr_matrix(sp.diags(d)), "parity")


def dual_transform(basis: BasisSpec) -> TruncatedOperator:
    """U = exp(-i pi/2 a^dag a) exp(-i pi/4 sigma_x), with U^dag H(-lam) U = H(lam)."""
    # exact quarter-turn phases, avoids cos(pi/2) rounding
    quarter = np.array([1, -1j, -1, 1j])
    photon_phase = quarter[basis.photon % 4]
    spin_phase = np.exp(-0.25j * np.pi * basis.spin)
    return TruncatedOperator(basis, sp.csr_matrix(sp.diags(photon_phase * spin_phase)), "U")


def sector_chain(params: ModelParams, n_max: int, parity: int):
    """Tridiagonal form of H restricted to one parity sector.

    Since every coupling moves (n, s) to (n +- 1, -s), the sector with parity
    ``parity`` is the chain n = 0..n_max with spin s_n = parity * (-1)^n.
    Returns (diagonal, offdiagonal, spins).
    """
    if parity not in (1, -1):
        raise ValueError("parity must be +1 or -1")
    n = np.arange(n_max + 1)
    spins = parity * (1 - 2 * (n % 2))
    diag = (n + 0.5) / params.eta + 0.5 * spins
    c_minus, c_plus = coupling_amplitudes(params)
    amp = np.sqrt((n[:-1] + 1) / 2)
    off = np.where(spins[:-1] < 0, c_minus, c_plus) * amp
    return params.capital_omega * diag, params.capital_omega * off, spins
