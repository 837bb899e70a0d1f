"""Many-body quantum lock-in: pi-pulse trains as a frequency reference.

Pulses are square, of width ``T_Omega`` and area pi, centred at
``(l - lambda) tau_r`` for ``l = 1..L`` (``lambda = 0`` for PDD, ``1/2`` for
CPMG). The spectrum is recorded against ``(tau_r - tau_s) / tau_s`` with
``tau_s = pi / omega_s``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import DomainError
from ..evolution import NoiseModel, noise_trajectory
from ..spin import collective_operator, expectation, propagator, rotation
from ..states import make_state
from ..table import SpectrumTable, parallel_map
from .dc import parse_state_kind

__all__ = [
    "LockinParams",
    "fourier_coeffs",
    "default_dtau_grid",
    "lockin_full",
    "lockin_full_point",
    "lockin_effective",
    "effective_hamiltonian",
    "lockin_phase",
    "lockin_phase_numeric",
    "lockin_entangled_signal",
]

_LAMBDA = {"PDD": 0.0, "CPMG": 0.5}


@dataclass(frozen=True)
class LockinParams:
    sequence: str = "CPMG"
    pulse_axis: str = "y"
    L: int = 100
    tau_r: float | None = None
    t_omega: float = 0.0
    omega_s: float = 200 * np.pi
    b_ac: float = 1.0
    chi: float = 0.0
    gamma_g: float = 1.0
    n_particles: int = 20
    substeps: int = 16
    noise: NoiseModel = field(default_factory=NoiseModel)

    def __post_init__(self):
        if self.sequence not in _LAMBDA:
            raise DomainError(f"sequence must be PDD or CPMG, got {self.sequence!r}")
        if self.pulse_axis not in ("x", "y"):
            raise DomainError(f"pulse_axis must be x or y, got {self.pulse_axis!r}")
        if int(self.L) != self.L or self.L < 1:
            raise DomainError("L must be an integer >= 1")
        if not self.omega_s > 0:
            raise DomainError("omega_s must be > 0")
        if self.t_omega < 0 or self.t_omega >= self.tau:
            raise DomainError("pulse width must satisfy 0 <= T_Omega < tau_r")

    @property
    def tau_s(self) -> float:
        return np.pi / self.omega_s

    @property
    def tau(self) -> float:
        return self.tau_s if self.tau_r is None else self.tau_r

    @property
    def lam(self) -> float:
        return _LAMBDA[self.sequence]

    def at_dtau(self, dtau_rel: float) -> "LockinParams":
        return replace(self, tau_r=self.tau_s * (1 + dtau_rel))


def default_dtau_grid(L: int, points: int = 2001, width: float = 2.0) -> np.ndarray:
    """Symmetric grid of ``(tau_r - tau_s)/tau_s`` over ``+-width/L``; the
    resonance narrows as ``1/L``."""
    return np.linspace(-width / L, width / L, points)


def fourier_coeffs(t_omega: float, tau_r: float, k_max: int = 99):
    """``(a_k, b_k)`` for ``k = 1..k_max`` with ``cos(alpha) = sum a_k cos(k w_r t)``
    and ``sin(alpha) = sum b_k sin(k w_r t)`` for a CPMG train of width ``T_Omega``.

    The bracket is 0/0 where ``k T_Omega = tau_r``; its limit is substituted.
    """
    if not 0 <= t_omega < tau_r:
        raise DomainError("need 0 <= T_Omega < tau_r")
    k = np.arange(1, k_max + 1, dtype=float)
    r = k * t_omega / tau_r
    pref = 2 * (1 - (-1.0) ** k) / (k * np.pi)
    first = np.sin(k * np.pi / 2 - np.pi * r / 2)
    second = np.zeros_like(k)
    if t_omega > 0:
        sing = np.isclose(r, 1.0, rtol=0, atol=1e-9)
        rr = np.where(sing, 2.0, r)
        second = rr**2 * np.cos((k + 1) * np.pi / 2 + np.pi * rr / 2) / (rr**2 - 1)
        second = np.where(sing, -np.pi / 4 * np.sin((k + 2) * np.pi / 2), second)
    a = pref * (first + second)
    b = k * t_omega * a / tau_r
    return a, b


def _pulse_centres(p: LockinParams) -> np.ndarray:
    return (np.arange(1, p.L + 1) - p.lam) * p.tau


def _signal_integral(p: LockinParams, t0, t1):
    """``int gamma B_ac sin(omega_s t) dt`` over ``[t0, t1]``."""
    w = p.omega_s
    return p.gamma_g * p.b_ac * (np.cos(w * t0) - np.cos(w * t1)) / w


def lockin_full_point(p: LockinParams, psi_in: np.ndarray, trajectory: int | None = None) -> float:
    """``<Jz>`` after the full square-pulse sequence and a pi/2-x readout.

    Free intervals are diagonal and integrated exactly. Pulses are split into
    ``substeps`` slices with the signal (and noise) frozen at each midpoint.
    The run ends at ``L tau_r`` or at the end of the last pulse, whichever is
    later.
    """
    N = len(psi_in) - 1
    m = collective_operator(N, "Jz").diagonal().real
    jz = collective_operator(N, "Jz")
    jax = collective_operator(N, "J" + p.pulse_axis)
    centres = _pulse_centres(p)
    half = p.t_omega / 2
    t_end = max(p.L * p.tau, centres[-1] + half)
    noise = p.noise
    traj = None
    if noise.white_noise_sigma > 0 and trajectory is not None:
        traj = noise_trajectory(noise, t_end, p.tau_s / 20, trajectory)

    def drift(t0, t1):
        ph = _signal_integral(p, t0, t1)
        if traj is not None:
            ph = ph + traj.integral(t0, t1)
        return np.exp(-1j * (p.chi * (t1 - t0) * m * m + ph * m))

    psi = np.asarray(psi_in, dtype=complex)
    if p.t_omega == 0:
        ux = rotation(N, p.pulse_axis, np.pi)
        t = 0.0
        for c in centres:
            psi = ux @ (drift(t, c) * psi)
            t = c
        psi = drift(t, t_end) * psi
    else:
        k = p.substeps
        h = p.t_omega / k
        frac = (np.arange(k) + 0.5) / k
        rabi = np.pi / p.t_omega
        mids = (centres[:, None] - half + frac[None, :] * p.t_omega).ravel()
        field = p.gamma_g * p.b_ac * np.sin(p.omega_s * mids)
        if traj is not None:
            field = field + traj(mids)
        hz = p.chi * m * m
        hs = np.zeros((mids.size, N + 1, N + 1), dtype=complex)
        hs += rabi * jax
        idx = np.arange(N + 1)
        hs[:, idx, idx] += hz[None, :] + field[:, None] * m[None, :]
        w, v = np.linalg.eigh(hs)
        us = v @ (np.exp(-1j * h * w)[..., None] * np.conj(np.swapaxes(v, -1, -2)))
        t = 0.0
        for i, c in enumerate(centres):
            psi = drift(t, c - half) * psi
            for j in range(k):
                psi = us[i * k + j] @ psi
            t = c + half
        psi = drift(t, t_end) * psi
    psi = rotation(N, "x", np.pi / 2) @ psi
    return expectation(psi, jz)


def _input_state(p: LockinParams, state_kind):
    kind, theta = parse_state_kind(state_kind)
    return make_state(p.n_particles, kind, theta)


def lockin_full(p: LockinParams, state_kind="SCS", deltas_tau=None, workers=None, psi_in=None) -> SpectrumTable:
    """Full time-domain lock-in spectrum against ``(tau_r - tau_s)/tau_s``.

    With white noise the signal is the mean over ``noise.ensemble_size``
    trajectories; trajectory ``i`` is seeded with ``seed ^ i``.
    """
    if deltas_tau is None:
        deltas_tau = default_dtau_grid(p.L)
    deltas_tau = np.asarray(deltas_tau, dtype=float)
    psi = _input_state(p, state_kind) if psi_in is None else psi_in
    noisy = p.noise.white_noise_sigma > 0

    def one(d):
        q = p.at_dtau(d)
        if not noisy:
            return lockin_full_point(q, psi)
        vals = [lockin_full_point(q, psi, i) for i in range(p.noise.ensemble_size)]
        return float(np.mean(vals))

    sig = parallel_map(one, deltas_tau, workers)
    return SpectrumTable({"dtau_rel": deltas_tau, "signal_full": sig}, meta={"model": "full"})


def effective_hamiltonian(p: LockinParams, variant: str, k_max: int = 2001) -> np.ndarray:
    """Time-averaged toggling-frame Hamiltonian for one ``tau_r``.

    ``x = L omega_s delta_tau``; the drive factors use their ``x -> 0`` limits.
    """
    N = p.n_particles
    jz, jz2 = collective_operator(N, "Jz"), collective_operator(N, "Jz2")
    ws = p.omega_s
    dtau = p.tau - p.tau_s
    x = p.L * ws * dtau
    gb = p.gamma_g * p.b_ac
    if variant == "CP_ideal":
        half = ws * dtau / 2
        drive = (2 * gb / (p.L * np.pi)) * (np.sin(x / 2) ** 2 / np.sin(half) if half else 0.0)
        return p.chi * jz2 + drive * jz
    if variant == "PDD_ideal":
        drive = (2 * gb / (p.L * np.pi)) * (np.sin(x) / (ws * dtau) if dtau else p.L)
        return p.chi * jz2 + drive * jz
    if variant not in ("CP_finiteWidth_x", "CP_finiteWidth_y"):
        raise DomainError(f"unknown effective variant {variant!r}")
    a, b = fourier_coeffs(p.t_omega, p.tau, k_max)
    a_s, b_s = np.sum(a**2), np.sum(b**2)
    cos_term = np.sin(x / 2) ** 2 / (x / 2) if x else 0.0
    sin_term = np.sinc(x / np.pi)
    if variant == "CP_finiteWidth_x":
        jy, jy2 = collective_operator(N, "Jy"), collective_operator(N, "Jy2")
        return (p.chi / 2) * (a_s * jz2 + b_s * jy2) + (a[0] * gb / 2) * cos_term * jz + (b[0] * gb / 2) * sin_term * jy
    jx, jx2 = collective_operator(N, "Jx"), collective_operator(N, "Jx2")
    return (p.chi / 2) * (a_s * jz2 + b_s * jx2) + (a[0] * gb / 2) * cos_term * jz - (b[0] * gb / 2) * sin_term * jx


def _variant_axis(variant: str, p: LockinParams) -> str:
    return "x" if variant == "CP_finiteWidth_x" else ("y" if variant == "CP_finiteWidth_y" else p.pulse_axis)


def lockin_effective(p: LockinParams, variant: str, state_kind="SCS", deltas_tau=None, psi_in=None) -> SpectrumTable:
    """Spectrum from a time-independent effective Hamiltonian over ``L tau_r``.

    The toggling frame is undone at the end (``L`` pi pulses), then the same
    pi/2-x readout as :func:`lockin_full` is applied.
    """
    if deltas_tau is None:
        deltas_tau = default_dtau_grid(p.L)
    deltas_tau = np.asarray(deltas_tau, dtype=float)
    if np.any(np.abs(deltas_tau) > 0.1):
        raise DomainError("effective Hamiltonians need |omega_s - omega_r| << omega_s")
    psi = _input_state(p, state_kind) if psi_in is None else psi_in
    N = p.n_particles
    jz = collective_operator(N, "Jz")
    ro = rotation(N, "x", np.pi / 2)
    frame = rotation(N, _variant_axis(variant, p), p.L * np.pi)
    out = []
    for d in deltas_tau:
        q = p.at_dtau(d)
        h = effective_hamiltonian(q, variant)
        out.append(expectation(ro @ frame @ propagator(h, q.L * q.tau) @ psi, jz))
    return SpectrumTable({"dtau_rel": deltas_tau, "signal_eff": out}, meta={"model": variant})


def lockin_phase(gamma_g: float, b_ac: float, omega: float, dtau: float, n: int) -> float:
    """Accumulated phase after ``t_n = 2 n tau_m`` of a CPMG train with spacing
    ``tau_m = tau + dtau`` (ideal pulses).

    ``(2 gamma B / omega) sin^2(2 n u) (1 + sin u) / sin u`` with
    ``u = omega dtau / 2``; equal to :func:`lockin_phase_numeric`.
    """
    u = omega * dtau / 2
    if u == 0:
        return 0.0
    return 2 * gamma_g * b_ac / omega * np.sin(2 * n * u) ** 2 * (1 + np.sin(u)) / np.sin(u)


def lockin_phase_numeric(gamma_g: float, b_ac: float, omega: float, dtau: float, n: int) -> float:
    """Direct piecewise integral of ``gamma B sin(omega t) cos(alpha(t))``."""
    tm = np.pi / omega + dtau
    edges = np.concatenate([[0.0], (np.arange(1, 2 * n + 1) - 0.5) * tm, [2 * n * tm]])
    sign = (-1.0) ** np.arange(len(edges) - 1)
    seg = (np.cos(omega * edges[:-1]) - np.cos(omega * edges[1:])) / omega
    return float(gamma_g * b_ac * np.sum(sign * seg))


def lockin_entangled_signal(N: int, state_kind, phi_L, theta: float | None = None):
    """Closed-form lock-in signals ``(J_{z,n}, J~_z)`` for SCS, CAT and GHZ input.

    ``phi_L`` is one phase or the sequence ``phi_{L,1..n_m}``; ``J_{z,n}`` is
    taken at the last entry and ``J~_z`` is the mean over all of them.
    SCS: ``(N/2) sin(phi)``. CAT/GHZ (twist readout, even N):
    ``(-1)^{J+1} sum_{m>=1} m S_m^2 sin(2 m phi)``, which is
    ``(-1)^{J+1} (N/2) sin(N phi)`` for GHZ.
    """
    from ..analytics import cat_weights

    kind, th = parse_state_kind(state_kind)
    th = theta if th is None else th
    phis = np.atleast_1d(np.asarray(phi_L, dtype=float))
    if kind == "SCS":
        vals = (N / 2) * np.sin(phis)
    else:
        if N % 2:
            raise DomainError("cat/GHZ lock-in closed form needs even N")
        ms, s2 = cat_weights(N, 0.0 if kind == "GHZ" else th)
        J = N // 2
        sign = (-1.0) ** (J + 1)
        vals = sign * np.sum(ms[None, :] * s2[None, :] * np.sin(2 * np.outer(phis, ms)), axis=1)
    return float(vals[-1]), float(vals.mean())
