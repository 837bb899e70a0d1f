"""Symmetry-protected many-body Ramsey interferometry on collective spins.

Dense Dicke-basis numerics for dc/ac Ramsey protocols, quantum lock-in
sequences and their closed-form oracles.
"""
from . import analytics, evolution, protocols, spin, states
from .errors import (
    ContractError,
    DegenerateSlopeError,
    DomainError,
    NumericalConsistencyError,
    SpdmbiError,
    StepSizeError,
    UnsupportedDomainError,
)
from .spin import TOL, SpinSystem, collective_operator, evolve_unitary, expectation, ladder_coefficient, rotation
from .states import ghz, is_exchange_eigenstate, spin_cat, spin_coherent, symmetry_class
from .table import SpectrumTable, parallel_map

__version__ = "0.1.0"

__all__ = [
    "ContractError",
    "DegenerateSlopeError",
    "DomainError",
    "NumericalConsistencyError",
    "SpdmbiError",
    "SpectrumTable",
    "SpinSystem",
    "StepSizeError",
    "TOL",
    "UnsupportedDomainError",
    "analytics",
    "collective_operator",
    "evolution",
    "evolve_unitary",
    "expectation",
    "ghz",
    "is_exchange_eigenstate",
    "ladder_coefficient",
    "parallel_map",
    "protocols",
    "rotation",
    "spin",
    "spin_cat",
    "spin_coherent",
    "states",
    "symmetry_class",
]
