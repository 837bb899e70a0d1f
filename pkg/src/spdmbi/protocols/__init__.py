"""Measurement protocols: dc Ramsey, ac amplitude, lock-in, preparation."""
from .ac import (
    AcProtocolParams,
    ac_final_state,
    ac_full_time_domain,
    ac_phase,
    ac_readout,
    ac_signal,
    ac_signal_series,
)
from .dc import DcProtocolParams, build_dc_schedule, dc_final_state, dc_spectrum, parse_state_kind
from .lockin import (
    LockinParams,
    default_dtau_grid,
    effective_hamiltonian,
    fourier_coeffs,
    lockin_effective,
    lockin_entangled_signal,
    lockin_full,
    lockin_full_point,
    lockin_phase,
    lockin_phase_numeric,
)
from .preparation import imperfect_preparation, preparation_rabi_condition

__all__ = [
    "AcProtocolParams",
    "DcProtocolParams",
    "LockinParams",
    "ac_final_state",
    "ac_full_time_domain",
    "ac_phase",
    "ac_readout",
    "ac_signal",
    "ac_signal_series",
    "build_dc_schedule",
    "dc_final_state",
    "dc_spectrum",
    "default_dtau_grid",
    "effective_hamiltonian",
    "fourier_coeffs",
    "imperfect_preparation",
    "lockin_effective",
    "lockin_entangled_signal",
    "lockin_full",
    "lockin_full_point",
    "lockin_phase",
    "lockin_phase_numeric",
    "parse_state_kind",
    "preparation_rabi_condition",
]
