"""Quantum phase transitions of the anisotropic quantum Rabi model."""

from .model import BasisSpec, ModelParams, TruncatedOperator, build_hamiltonian, build_parity, dual_transform
from .solver import Observables, observables, lowest_eigenpairs

__version__ = "0.1.0"
