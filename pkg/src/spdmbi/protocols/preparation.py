"""Input states prepared by an imperfect pi/2 pulse about y from ``|J,J>``."""
from __future__ import annotations

import numpy as np

from ..errors import DomainError
from ..spin import _as_system, collective_operator, evolve_unitary, rotation

__all__ = ["imperfect_preparation", "preparation_rabi_condition"]


def imperfect_preparation(omega_p, epsilon, chi, delta, sys) -> np.ndarray:
    """State after a pi/2-y preparation pulse.

    ``omega_p = inf`` (or ``None``) gives the duration-error branch
    ``exp(-i (pi/2)(1 + epsilon) Jy) |J,J>`` exactly. A finite ``omega_p``
    evolves under ``chi Jz^2 + delta Jz + omega_p Jy`` for
    ``t_p = (1 + epsilon) pi / (2 omega_p)``.
    """
    sys = _as_system(sys)
    top = sys.basis(sys.j)
    if omega_p is None or np.isinf(omega_p):
        return rotation(sys, "y", (np.pi / 2) * (1 + epsilon)) @ top
    if not omega_p > 0:
        raise DomainError("omega_p must be > 0")
    tp = (1 + epsilon) * np.pi / (2 * omega_p)
    h = (
        chi * collective_operator(sys, "Jz2")
        + delta * collective_operator(sys, "Jz")
        + omega_p * collective_operator(sys, "Jy")
    )
    return evolve_unitary(top, h, tp)


def preparation_rabi_condition(N: int, chi: float, delta: float = 0.0) -> float:
    """Scale ``pi chi N^2 / 8 + pi |delta| N / 4`` that ``omega_p`` must greatly exceed."""
    return np.pi * chi * N**2 / 8 + np.pi * abs(delta) * N / 4
