"""Ramsey protocols I, II and III for a static detuning."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..evolution import (
    InstantRotation,
    NoiseModel,
    PulseSchedule,
    Segment,
    evolve_schedule,
    evolve_schedule_open,
)
from ..spin import SpinSystem, collective_operator, density_matrix, expectation
from ..states import make_state
from ..table import SpectrumTable, parallel_map

__all__ = ["DcProtocolParams", "build_dc_schedule", "dc_final_state", "dc_spectrum", "parse_state_kind"]

_PROTOCOLS = {"I": "I", "II": "II", "III": "III", "1": "I", "2": "II", "3": "III"}


@dataclass(frozen=True)
class DcProtocolParams:
    """Parameters of a dc Ramsey run.

    ``omega=None`` means ideal (instantaneous) pulses. ``t_r=None`` defaults to
    ``pi / (2 chi_r)``, the value that turns the readout into a quarter twist.
    """

    protocol: str = "I"
    n_particles: int = 20
    chi: float = 0.0
    chi_r: float = 0.0
    T: float = 1.0
    t_r: float | None = None
    omega: float | None = None
    epsilon: float = 0.0
    gamma_z: float = 0.0

    def __post_init__(self):
        p = _PROTOCOLS.get(str(self.protocol).upper())
        if p is None:
            raise DomainError(f"protocol must be I, II or III, got {self.protocol!r}")
        object.__setattr__(self, "protocol", p)
        SpinSystem(self.n_particles)
        if not self.T > 0:
            raise DomainError("interrogation time T must be > 0")
        if p != "I" and not self.chi_r > 0:
            raise DomainError(f"protocol {p} needs chi_r > 0")
        if self.omega is not None and not self.omega > 0:
            raise DomainError("omega must be > 0 (or None for ideal pulses)")
        if self.gamma_z < 0:
            raise DomainError("gamma_z must be >= 0")
        if self.t_r is not None and self.t_r < 0:
            raise DomainError("t_r must be >= 0")

    @property
    def readout_time(self) -> float:
        if self.t_r is not None:
            return self.t_r
        return np.pi / (2 * self.chi_r) if self.chi_r > 0 else 0.0

    @property
    def ideal(self) -> bool:
        return self.omega is None


def build_dc_schedule(p: DcProtocolParams, delta: float) -> PulseSchedule:
    """Executable schedule for one detuning.

    Finite pulses last ``(1 + epsilon) angle / omega`` and keep ``delta`` and
    the current nonlinearity switched on.
    """
    sched = PulseSchedule().then(Segment(p.T, p.chi, delta, label="interrogation"))
    chi_pulse = p.chi if p.protocol == "I" else p.chi_r

    def pulse(s, axis, angle):
        if p.ideal:
            return s.then(InstantRotation(0, axis, angle))
        dur = (1 + p.epsilon) * angle / p.omega
        return s.then(Segment(dur, chi_pulse, delta, p.omega, axis, label="pulse"))

    def wait(s, t):
        return s.then(Segment(t, p.chi_r, delta, label="readout"))

    tr = p.readout_time
    if p.protocol == "I":
        return pulse(sched, "x", np.pi / 2)
    if p.protocol == "II":
        sched = pulse(sched, "x", np.pi / 2)
        sched = wait(sched, tr)
        return pulse(sched, "-x", np.pi / 2)
    sched = pulse(sched, "y", np.pi / 2)
    sched = wait(sched, tr / 2)
    sched = pulse(sched, "-y", np.pi)
    sched = wait(sched, tr / 2)
    return pulse(sched, "y", np.pi / 2)


def parse_state_kind(kind):
    """Accept ``'SCS'``, ``'GHZ'``, ``'CAT:0.39'`` or a ``(kind, theta)`` tuple."""
    if isinstance(kind, tuple):
        return kind[0].upper(), kind[1]
    s = str(kind).strip()
    if ":" in s:
        name, th = s.split(":", 1)
        try:
            return name.strip().upper(), float(th)
        except ValueError:
            raise DomainError(f"bad state angle in {kind!r}") from None
    if s.upper() == "CAT":
        raise DomainError("CAT state needs an angle, e.g. 'cat:0.3927'")
    return s.upper(), None


def dc_final_state(p: DcProtocolParams, psi0: np.ndarray, delta: float, noise: NoiseModel | None = None):
    """Final pure state, or density matrix when dephasing is on."""
    sched = build_dc_schedule(p, delta)
    if noise is None and p.gamma_z > 0:
        noise = NoiseModel(dephasing_rate=p.gamma_z)
    if noise is not None and noise.dephasing_rate > 0:
        return evolve_schedule_open(density_matrix(psi0), sched, noise)
    return evolve_schedule(psi0, sched)


def dc_spectrum(
    p: DcProtocolParams,
    state_kind,
    deltas,
    noise: NoiseModel | None = None,
    workers: int | None = None,
    psi0: np.ndarray | None = None,
) -> SpectrumTable:
    """``<Jz>_f`` and ``<Jz^2>_f`` on a detuning grid."""
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    if deltas.size == 0:
        raise DomainError("detuning grid is empty")
    n = p.n_particles
    if psi0 is None:
        kind, theta = parse_state_kind(state_kind)
        psi0 = make_state(n, kind, theta)
    jz, jz2 = collective_operator(n, "Jz"), collective_operator(n, "Jz2")

    def one(d):
        out = dc_final_state(p, psi0, d, noise)
        return expectation(out, jz), expectation(out, jz2)

    res = np.array(parallel_map(one, deltas, workers))
    return SpectrumTable(
        {"delta": deltas, "jz": res[:, 0], "jz2": res[:, 1]},
        meta={"protocol": p.protocol, "state": str(state_kind), "n": n},
    )
