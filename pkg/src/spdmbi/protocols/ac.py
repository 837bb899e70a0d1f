"""ac-amplitude sensing by dc-field modulation.

A train of pi pulses at the nodes of the ac field rectifies it during the
first ``t_n = 2 n pi / omega``; a free interval of equal length then lets the
dc bias accumulate the opposite phase. The lock-in point ``phi = 0`` sits at
``B_dc = 2 B_ac / pi``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..errors import DomainError
from ..spin import SpinSystem, collective_operator, expectation, propagator, rotation
from ..states import make_state
from .dc import parse_state_kind

__all__ = [
    "AcProtocolParams",
    "ac_phase",
    "ac_final_state",
    "ac_full_time_domain",
    "ac_readout",
    "ac_signal",
    "ac_signal_series",
]


@dataclass(frozen=True)
class AcProtocolParams:
    b_ac: float = 1.0
    b_dc: float = 2.0 / np.pi
    omega_sig: float = 200 * np.pi
    gamma_g: float = 20 * np.pi
    n_cycles: int = 1
    n_max: int = 1
    chi: float = 0.0
    n_particles: int = 20

    def __post_init__(self):
        if not self.omega_sig > 0:
            raise DomainError("omega_sig must be > 0")
        if int(self.n_cycles) != self.n_cycles or self.n_cycles < 1:
            raise DomainError("n_cycles must be an integer >= 1")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise DomainError("n_max must be an integer >= 1")
        SpinSystem(self.n_particles)

    @property
    def phi(self) -> float:
        return ac_phase(self.b_ac, self.b_dc, self.omega_sig, self.gamma_g)

    def t_n(self, n: int | None = None) -> float:
        n = self.n_cycles if n is None else n
        return 2 * n * np.pi / self.omega_sig

    def at_modulation(self, x: float) -> "AcProtocolParams":
        """Params with ``B_dc`` set so that ``(pi B_dc / 2 - B_ac) / B_ac = x``."""
        return replace(self, b_dc=2 * self.b_ac * (1 + x) / np.pi)


def ac_phase(b_ac, b_dc, omega, gamma_g):
    """``phi = (2 pi gamma_g / omega)(B_dc - 2 B_ac / pi)``."""
    return 2 * np.pi * gamma_g / omega * (b_dc - 2 * b_ac / np.pi)


def ac_final_state(p: AcProtocolParams, psi_in: np.ndarray, n: int | None = None) -> np.ndarray:
    """``exp(-2i chi t_n Jz^2) exp(-i n phi Jz) exp(i pi Jx) |in>`` before readout."""
    n = p.n_cycles if n is None else n
    N = len(psi_in) - 1
    m = collective_operator(N, "Jz").diagonal().real
    psi = rotation(N, "x", -np.pi) @ psi_in
    return np.exp(-1j * (2 * p.chi * p.t_n(n) * m * m + n * p.phi * m)) * psi


def ac_full_time_domain(p: AcProtocolParams, psi_in: np.ndarray, n: int | None = None, dt: float | None = None):
    """Time-domain oracle for :func:`ac_final_state`.

    Stage one applies ``2n - 1`` instantaneous pi pulses about x at the nodes
    ``k pi / omega``; stage two is free evolution. Between pulses the
    Hamiltonian ``chi Jz^2 + gamma_g (B_dc + B_ac sin(omega t)) Jz`` is
    diagonal, and the sinusoid is sampled at the midpoints of steps no longer
    than ``dt`` (default ``2 pi / (200 omega)``).
    """
    n = p.n_cycles if n is None else n
    w = p.omega_sig
    dt = 2 * np.pi / (200 * w) if dt is None else dt
    N = len(psi_in) - 1
    m = collective_operator(N, "Jz").diagonal().real
    ux = rotation(N, "x", np.pi)
    tau = np.pi / w
    tn = p.t_n(n)

    def free(psi, t0, t1):
        k = max(1, int(np.ceil((t1 - t0) / dt - 1e-9)))
        t = t0 + (np.arange(k) + 0.5) * (t1 - t0) / k
        field = np.sum(p.b_dc + p.b_ac * np.sin(w * t)) * (t1 - t0) / k
        return np.exp(-1j * (p.chi * (t1 - t0) * m * m + p.gamma_g * field * m)) * psi

    psi = np.asarray(psi_in, dtype=complex)
    for k in range(2 * n):
        psi = free(psi, k * tau, (k + 1) * tau)
        if k < 2 * n - 1:
            psi = ux @ psi
    return free(psi, tn, 2 * tn)


def ac_readout(N: int, kind: str) -> np.ndarray:
    """``exp(-i pi/2 Jx)`` for ``HalfPiX``, ``exp(-i pi/2 Jx^2)`` for ``TwistX``."""
    if kind == "HalfPiX":
        return rotation(N, "x", np.pi / 2)
    if kind == "TwistX":
        return propagator(collective_operator(N, "Jx2"), np.pi / 2)
    raise DomainError(f"readout must be HalfPiX or TwistX, got {kind!r}")


def _default_readout(kind: str) -> str:
    return "HalfPiX" if kind == "SCS" else "TwistX"


def ac_signal_series(p: AcProtocolParams, state_kind, readout: str | None = None, full: bool = False, psi_in=None):
    """``J_{z,n}`` for ``n = 1..n_max``; ``full=True`` uses the time-domain oracle."""
    kind, theta = parse_state_kind(state_kind)
    N = p.n_particles
    if psi_in is None:
        psi_in = make_state(N, kind, theta)
    u = ac_readout(N, readout or _default_readout(kind))
    jz = collective_operator(N, "Jz")
    evolve = ac_full_time_domain if full else ac_final_state
    return np.array([expectation(u @ evolve(p, psi_in, n), jz) for n in range(1, p.n_max + 1)])


def ac_signal(p: AcProtocolParams, state_kind, readout: str | None = None, full: bool = False, psi_in=None):
    """``(J_{z,n}, J~_z)``: the signal at ``n = n_cycles`` and its average over ``n = 1..n_max``."""
    kind, theta = parse_state_kind(state_kind)
    N = p.n_particles
    if psi_in is None:
        psi_in = make_state(N, kind, theta)
    u = ac_readout(N, readout or _default_readout(kind))
    jz = collective_operator(N, "Jz")
    evolve = ac_full_time_domain if full else ac_final_state
    jzn = expectation(u @ evolve(p, psi_in, p.n_cycles), jz)
    avg = ac_signal_series(p, (kind, theta), readout, full, psi_in).mean()
    return jzn, float(avg)
