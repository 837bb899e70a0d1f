"""Pulse schedules, closed and open evolution, stochastic noise.

A :class:`PulseSchedule` is a list of piecewise-constant segments with
Hamiltonian ``chi Jz^2 + delta Jz + rabi J_axis`` plus instantaneous rotations
sitting on segment boundaries (the infinitely strong pulse limit).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ContractError, DomainError, NumericalConsistencyError, StepSizeError
from .spin import (
    TOL,
    _as_system,
    check_density_matrix,
    check_hermitian,
    collective_operator,
    rotation,
)

__all__ = [
    "AXES",
    "Segment",
    "InstantRotation",
    "PulseSchedule",
    "NoiseModel",
    "NoiseTrajectory",
    "segment_hamiltonian",
    "impulse_matrix",
    "evolve_schedule",
    "schedule_propagator",
    "evolve_schedule_open",
    "lindblad_evolve",
    "dephase_diagonal",
    "lindblad_rhs",
    "dissipator_covariance_check",
    "noise_trajectory",
]

AXES = ("x", "y", "z", "-x", "-y", "-z", "none")


def _split_axis(axis: str):
    """``'-y'`` -> (-1, 'y')."""
    if axis not in AXES:
        raise DomainError(f"axis must be one of {AXES}, got {axis!r}")
    if axis.startswith("-"):
        return -1.0, axis[1:]
    return 1.0, axis


@dataclass(frozen=True)
class Segment:
    """Constant-Hamiltonian interval. ``label`` tags the protocol stage."""

    duration: float
    chi: float = 0.0
    delta: float = 0.0
    rabi: float = 0.0
    axis: str = "none"
    label: str = ""

    def __post_init__(self):
        _split_axis(self.axis)
        if not np.isfinite(self.duration) or self.duration < 0:
            raise DomainError(f"segment duration must be finite and >= 0, got {self.duration}")
        if self.axis == "none" and self.rabi != 0:
            raise DomainError("a segment with axis='none' must have rabi = 0")


@dataclass(frozen=True)
class InstantRotation:
    """``exp(-i angle J_axis)`` applied at boundary ``position`` (0 = before segment 0)."""

    position: int
    axis: str
    angle: float

    def __post_init__(self):
        if self.axis == "none":
            raise DomainError("an impulse needs a rotation axis")
        _split_axis(self.axis)


@dataclass(frozen=True)
class PulseSchedule:
    segments: tuple = ()
    impulses: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        object.__setattr__(self, "impulses", tuple(self.impulses))
        n = len(self.segments)
        for imp in self.impulses:
            if not 0 <= imp.position <= n:
                raise DomainError(f"impulse position {imp.position} outside 0..{n}")

    @property
    def total_duration(self) -> float:
        return float(sum(s.duration for s in self.segments))

    def then(self, item) -> "PulseSchedule":
        """Return a new schedule with a segment or an impulse appended at the end."""
        if isinstance(item, Segment):
            return replace(self, segments=self.segments + (item,))
        if isinstance(item, InstantRotation):
            imp = replace(item, position=len(self.segments))
            return replace(self, impulses=self.impulses + (imp,))
        raise ContractError(f"cannot append {type(item).__name__} to a schedule")

    def steps(self):
        """Segments and impulses in execution order."""
        by_pos = {}
        for imp in self.impulses:
            by_pos.setdefault(imp.position, []).append(imp)
        for k, seg in enumerate(self.segments):
            yield from by_pos.get(k, [])
            yield seg
        yield from by_pos.get(len(self.segments), [])

    def slice(self, start: int, stop: int | None = None) -> "PulseSchedule":
        """Sub-schedule of segments ``start:stop`` with the impulses strictly inside
        or on its boundaries."""
        stop = len(self.segments) if stop is None else stop
        segs = self.segments[start:stop]
        imps = tuple(
            replace(i, position=i.position - start)
            for i in self.impulses
            if start <= i.position <= stop
        )
        return PulseSchedule(segs, imps)


@dataclass(frozen=True)
class NoiseModel:
    """Collective ``Jz`` dephasing plus optional white detuning noise.

    ``dephasing_labels`` restricts dephasing to segments with those labels;
    ``None`` applies it to every segment.
    """

    dephasing_rate: float = 0.0
    dephasing_operator: str = "Jz"
    white_noise_sigma: float = 0.0
    seed: int = 0
    ensemble_size: int = 200
    dephasing_labels: tuple | None = ("interrogation",)

    def __post_init__(self):
        if self.dephasing_rate < 0 or self.white_noise_sigma < 0:
            raise DomainError("noise rates must be >= 0")
        if self.ensemble_size < 1:
            raise DomainError("ensemble_size must be >= 1")
        if self.dephasing_operator != "Jz":
            raise DomainError("only collective Jz dephasing is supported")

    def dephases(self, seg: Segment) -> bool:
        if self.dephasing_rate == 0:
            return False
        return self.dephasing_labels is None or seg.label in self.dephasing_labels


def segment_hamiltonian(sys, seg: Segment, extra_delta: float = 0.0) -> np.ndarray:
    n = _as_system(sys).n_particles
    h = seg.chi * collective_operator(n, "Jz2") + (seg.delta + extra_delta) * collective_operator(n, "Jz")
    if seg.rabi:
        sgn, ax = _split_axis(seg.axis)
        h = h + sgn * seg.rabi * collective_operator(n, "J" + ax)
    return h


def impulse_matrix(sys, imp: InstantRotation) -> np.ndarray:
    sgn, ax = _split_axis(imp.axis)
    return rotation(sys, ax, sgn * imp.angle)


def _segment_apply(n: int, seg: Segment, psi: np.ndarray) -> np.ndarray:
    if seg.duration == 0:
        return psi
    if seg.rabi == 0:
        m = collective_operator(n, "Jz").diagonal().real
        ph = np.exp(-1j * seg.duration * (seg.chi * m * m + seg.delta * m))
        return ph[:, None] * psi
    w, v = np.linalg.eigh(segment_hamiltonian(n, seg))
    return v @ (np.exp(-1j * seg.duration * w)[:, None] * (v.conj().T @ psi))


def evolve_schedule(state: np.ndarray, sched: PulseSchedule) -> np.ndarray:
    """Run ``state`` (a vector, or a matrix whose columns are states) through ``sched``."""
    state = np.asarray(state, dtype=complex)
    vec = state.ndim == 1
    psi = state.reshape(state.shape[0], -1)
    n = psi.shape[0] - 1
    if n < 1:
        raise ContractError("state must have dimension >= 2")
    norm0 = np.linalg.norm(psi, axis=0)
    for step in sched.steps():
        if isinstance(step, Segment):
            psi = _segment_apply(n, step, psi)
        else:
            psi = impulse_matrix(n, step) @ psi
    if np.abs(np.linalg.norm(psi, axis=0) - norm0).max() > TOL.norm * max(1.0, norm0.max()):
        raise NumericalConsistencyError("norm drifted during schedule evolution")
    return psi[:, 0] if vec else psi


def schedule_propagator(sys, sched: PulseSchedule) -> np.ndarray:
    """The unitary implemented by ``sched``."""
    dim = _as_system(sys).dim
    return evolve_schedule(np.eye(dim, dtype=complex), sched)


# ---------------------------------------------------------------- open systems


def lindblad_rhs(rho: np.ndarray, h: np.ndarray, gamma: float, lop: np.ndarray) -> np.ndarray:
    """``-i[H, rho] + gamma (L rho L^dag - {L^dag L, rho}/2)``."""
    out = -1j * (h @ rho - rho @ h)
    if gamma:
        ld = lop.conj().T
        ldl = ld @ lop
        out = out + gamma * (lop @ rho @ ld - 0.5 * (ldl @ rho + rho @ ldl))
    return out


def _auto_dt(h: np.ndarray, gamma: float, lop: np.ndarray) -> float:
    # spectral radii bound the generator; keep ||.|| dt <= 0.05
    rate = np.abs(np.linalg.eigvalsh(h)).max()
    if gamma:
        rate += gamma * np.abs(np.linalg.eigvalsh(lop.conj().T @ lop)).max()
    return 0.05 / rate if rate > 0 else np.inf


def lindblad_evolve(
    rho: np.ndarray,
    h: np.ndarray,
    noise: NoiseModel,
    t: float,
    dt: float | None = None,
) -> np.ndarray:
    """Fixed-step RK4 integration of the master equation with ``Jz`` dephasing.

    ``dt=None`` picks ``dt`` with ``||generator|| dt <= 0.05``. The step is
    shrunk so that an integer number of steps covers ``t`` exactly.
    """
    rho = np.asarray(rho, dtype=complex)
    check_hermitian(h)
    if rho.shape != h.shape:
        raise ContractError(f"dimension mismatch: rho {rho.shape} vs h {h.shape}")
    if t < 0:
        raise DomainError("t must be >= 0")
    if t == 0:
        return rho.copy()
    n = h.shape[0] - 1
    lop = collective_operator(n, noise.dephasing_operator)
    gamma = noise.dephasing_rate
    if dt is None:
        dt = _auto_dt(h, gamma, lop)
    if dt <= 0:
        raise DomainError("dt must be > 0")
    steps = max(1, int(np.ceil(t / min(dt, t) - 1e-12)))
    hstep = t / steps
    for _ in range(steps):
        k1 = lindblad_rhs(rho, h, gamma, lop)
        k2 = lindblad_rhs(rho + 0.5 * hstep * k1, h, gamma, lop)
        k3 = lindblad_rhs(rho + 0.5 * hstep * k2, h, gamma, lop)
        k4 = lindblad_rhs(rho + hstep * k3, h, gamma, lop)
        rho = rho + (hstep / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    rho = 0.5 * (rho + rho.conj().T)
    lo = np.linalg.eigvalsh(rho).min()
    if lo < -1e-6:
        raise StepSizeError(f"positivity lost (min eigenvalue {lo:.2e}); reduce dt")
    check_density_matrix(rho)
    return rho


def dephase_diagonal(rho: np.ndarray, seg: Segment, gamma: float) -> np.ndarray:
    """Exact solution for ``H = chi Jz^2 + delta Jz`` with ``Jz`` dephasing:
    ``rho_kl -> rho_kl exp(-i (E_k - E_l) t - gamma (m_k - m_l)^2 t / 2)``."""
    n = rho.shape[0] - 1
    m = collective_operator(n, "Jz").diagonal().real
    e = seg.chi * m * m + seg.delta * m
    dm = m[:, None] - m[None, :]
    t = seg.duration
    return rho * np.exp(-1j * (e[:, None] - e[None, :]) * t - 0.5 * gamma * dm**2 * t)


def evolve_schedule_open(
    rho: np.ndarray,
    sched: PulseSchedule,
    noise: NoiseModel,
    dt: float | None = None,
    rk4: bool = False,
) -> np.ndarray:
    """Density-matrix version of :func:`evolve_schedule`.

    Segments selected by ``noise.dephases`` carry ``Jz`` dephasing. When such a
    segment has no drive its generator is diagonal and the master equation is
    solved exactly, entry by entry; otherwise (or with ``rk4=True``) it is
    integrated with :func:`lindblad_evolve`. Everything else is an exact
    unitary conjugation.
    """
    rho = np.asarray(rho, dtype=complex)
    n = rho.shape[0] - 1
    for step in sched.steps():
        if isinstance(step, InstantRotation):
            u = impulse_matrix(n, step)
            rho = u @ rho @ u.conj().T
        elif noise.dephases(step) and step.rabi == 0 and not rk4:
            rho = dephase_diagonal(rho, step, noise.dephasing_rate)
        elif noise.dephases(step):
            rho = lindblad_evolve(rho, segment_hamiltonian(n, step), noise, step.duration, dt)
        else:
            u = _segment_apply(n, step, np.eye(n + 1, dtype=complex))
            rho = u @ rho @ u.conj().T
    return rho


def dissipator_covariance_check(
    noise: NoiseModel,
    sys,
    trials: int = 5,
    operator: str | np.ndarray | None = None,
    tol: float = 1e-10,
) -> bool:
    """Check ``U_ex^dag D[rho] U_ex = D[U_ex^dag rho U_ex]`` on random density matrices.

    ``operator`` overrides the jump operator (a name or a matrix), e.g. ``"Jplus"``
    to see the identity fail for a one-sided channel.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    sys = _as_system(sys)
    gamma = noise.dephasing_rate
    if gamma == 0:
        return True
    if operator is None:
        operator = noise.dephasing_operator
    lop = collective_operator(sys, operator) if isinstance(operator, str) else np.asarray(operator)
    u = rotation(sys, "x", np.pi)
    ud = u.conj().T
    zero = np.zeros_like(lop)
    rng = np.random.default_rng(noise.seed)
    for _ in range(trials):
        a = rng.normal(size=(sys.dim, sys.dim)) + 1j * rng.normal(size=(sys.dim, sys.dim))
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        lhs = ud @ lindblad_rhs(rho, zero, gamma, lop) @ u
        rhs = lindblad_rhs(ud @ rho @ u, zero, gamma, lop)
        scale = max(1.0, np.abs(lhs).max())
        if np.abs(lhs - rhs).max() > tol * scale:
            return False
    return True


@dataclass(frozen=True)
class NoiseTrajectory:
    """Piecewise-constant sample path: ``values[k]`` holds on ``[k dt, (k+1) dt)``."""

    dt: float
    values: np.ndarray = field(repr=False)

    def __call__(self, t):
        k = np.clip(np.floor(np.asarray(t) / self.dt).astype(int), 0, len(self.values) - 1)
        return self.values[k]

    def integral(self, t0: float, t1: float) -> float:
        """Exact integral of the path over ``[t0, t1]``."""
        edges = np.arange(len(self.values) + 1) * self.dt
        cum = np.concatenate([[0.0], np.cumsum(self.values * self.dt)])
        return float(np.interp(t1, edges, cum) - np.interp(t0, edges, cum))


def noise_trajectory(noise: NoiseModel, duration: float, dt: float, index: int = 0) -> NoiseTrajectory:
    """White-noise path ``sigma * g_k`` with ``g_k ~ N(0, 1)``.

    Trajectory ``index`` draws from ``default_rng(seed ^ index)`` so ensembles are
    reproducible and independent of how they are scheduled across workers.
    """
    if dt <= 0:
        raise DomainError("dt must be > 0")
    if duration < 0:
        raise DomainError("duration must be >= 0")
    k = max(1, int(np.ceil(duration / dt - 1e-12)))
    if noise.white_noise_sigma == 0:
        return NoiseTrajectory(dt, np.zeros(k))
    rng = np.random.default_rng(int(noise.seed) ^ int(index))
    return NoiseTrajectory(dt, noise.white_noise_sigma * rng.standard_normal(k))
