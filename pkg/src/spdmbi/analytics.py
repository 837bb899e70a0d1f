"""Closed-form signals, precisions and quantum Fisher information.

These are the oracles the matrix numerics are checked against. Cat-state sums
use ``S_m = sqrt(2) c_m`` where ``c_m`` are the coefficients of the exactly
normalized state, so ``sum_{m>=1} S_m^2 = 1`` (even N). This is the
``1/sqrt(2)`` convention with the branch overlap folded into the weights;
pass ``normalization="sqrt2"`` to use ``S_m = C_m + C_{-m}`` verbatim.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSlopeError, DomainError, UnsupportedDomainError
from .spin import collective_operator, expectation, ladder_coefficient
from .states import _coherent_amplitudes, make_state

__all__ = [
    "PrecisionPoint",
    "cat_amplitudes",
    "cat_weights",
    "jz_scs_closed",
    "jz2_scs_closed",
    "cat_closed_II",
    "cat_closed_III",
    "ac_closed_signals",
    "qfi_variance",
    "qfi_derivative",
    "qcrb",
    "precision_error_prop",
    "precision_curve",
    "precision_scs_closed",
    "precision_cat_closed",
    "precision_ac_closed",
    "precision_ac_scs_closed",
    "scaling_scan",
    "fit_exponent",
]


@dataclass(frozen=True)
class PrecisionPoint:
    n_particles: int
    delta_or_phi: float
    precision: float
    qcrb: float
    method: str = "ErrorProp"
    stencil: float | None = None


def _need_even(N: int, what: str) -> None:
    if N % 2:
        raise UnsupportedDomainError(f"{what} is only defined for even N (got N={N}); use the numerics")


def cat_amplitudes(N: int, theta: float, normalization: str = "exact") -> np.ndarray:
    """``S_m`` on the descending grid ``m = J..-J``."""
    c = _coherent_amplitudes(N, theta)
    s = c + c[::-1]
    if normalization == "exact":
        return np.sqrt(2) * s / np.linalg.norm(s)
    if normalization == "sqrt2":
        return s
    raise DomainError(f"normalization must be 'exact' or 'sqrt2', got {normalization!r}")


def cat_weights(N: int, theta: float, normalization: str = "exact"):
    """``(m, S_m^2)`` for ``m = 1..J`` (even N)."""
    _need_even(N, "cat weights")
    J = N // 2
    s = cat_amplitudes(N, theta, normalization)
    ms = np.arange(1, J + 1, dtype=float)
    return ms, s[J - ms.astype(int)] ** 2


# ----------------------------------------------------------- coherent states


def jz_scs_closed(N, chi, delta, T):
    """Protocol I with an equatorial coherent state: ``(N/2) sin(dT) cos^{N-1}(chi T)``."""
    return (N / 2) * np.sin(np.asarray(delta) * T) * np.cos(chi * T) ** (N - 1)


def jz2_scs_closed(N, chi, delta, T):
    """``N(N+1)/8 - N(N-1)/8 cos^{N-2}(2 chi T) cos(2 dT)``."""
    return N * (N + 1) / 8 - N * (N - 1) / 8 * np.cos(2 * chi * T) ** (N - 2) * np.cos(2 * np.asarray(delta) * T)


def precision_scs_closed(N, chi, delta, T, gamma_g=1.0):
    """``F_SCS / (gamma T sqrt(N))`` for protocol I.

    The slope of the signal carries ``cos^{N-1}(chi T)``, so that is the
    factor in the denominator of ``F_SCS``.
    """
    c1 = np.cos(chi * T)
    c2 = np.cos(2 * chi * T)
    s2 = np.sin(delta * T) ** 2
    num = 0.5 * (N + 1 - (N - 1) * c2 ** (N - 2)) - s2 * (N * c1 ** (2 * N - 2) - (N - 1) * c2 ** (N - 2))
    den = abs(c1 ** (N - 1) * np.cos(delta * T))
    if den < 1e-14:
        raise DegenerateSlopeError("signal slope vanishes; precision undefined")
    return float(np.sqrt(max(num, 0.0)) / den / (gamma_g * T * np.sqrt(N)))


# ---------------------------------------------------------------- cat states


def cat_closed_III(N, theta, delta, T, normalization="exact"):
    """Protocol III with ideal pulses: ``(<Jz>, <Jz^2>)``, independent of chi."""
    ms, s2 = cat_weights(N, theta, normalization)
    J = N // 2
    d = np.atleast_1d(np.asarray(delta, dtype=float))
    jz = (-1.0) ** (J + 1) * np.sum(ms * s2 * np.sin(2 * np.outer(d * T, ms)), axis=1)
    jz2 = np.full_like(d, np.sum(ms**2 * s2))
    if np.ndim(delta) == 0:
        return float(jz[0]), float(jz2[0])
    return jz, jz2


def cat_closed_II(N, theta, chi, delta, T, t_r, normalization="exact"):
    """Protocol II with ideal pulses and a quarter twist (``chi_r t_r = pi/2``).

    ``t_r`` enters only through the readout rotation ``delta t_r``. The
    half-integer sums run over ``m' = 1/2..J-1/2`` and pair neighbouring
    ``S_{m' -+ 1/2}`` with the ladder factor ``lambda+_{m'-1/2}``.
    """
    _need_even(N, "protocol-II closed form")
    J = N // 2
    s = cat_amplitudes(N, theta, normalization)

    def S(m):
        return s[int(round(J - m))]

    def lam(m):
        return ladder_coefficient(J, m, "+")

    d = np.atleast_1d(np.asarray(delta, dtype=float))
    ms = np.arange(1, J + 1, dtype=float)
    sm2 = np.array([S(m) ** 2 for m in ms])
    mp = np.arange(J) + 0.5  # m' = 1/2 .. J - 1/2
    pair = np.array([lam(q - 0.5) * S(q - 0.5) * S(q + 0.5) for q in mp])
    sgn_p = (-1.0) ** (J - 0.5 - mp)

    c_r, s_r = np.cos(d * t_r), np.sin(d * t_r)
    jz = c_r * (-1.0) ** (J + 1) * np.sum((-1.0) ** ms * ms * sm2 * np.sin(2 * np.outer(d * T, ms)), axis=1)
    jz = jz - s_r * np.sum(sgn_p * np.sin(2 * chi * T * mp) * pair * np.cos(2 * np.outer(d * T, mp)), axis=1)

    full_m = np.arange(-J + 1, J + 1, dtype=float)
    diag = sum((J * (J + 1) - m * (m - 1)) * S(m) ** 2 for m in full_m)
    off_m = np.arange(-J, J - 1, dtype=float)
    off = sum(np.cos(4 * chi * T * (m + 1)) * lam(m + 1) * lam(m) * S(m) * S(m + 2) for m in off_m)
    cross = np.sum(2 * mp * pair * np.sin(2 * chi * T * mp))
    jz2 = (
        c_r**2 * np.sum(ms**2 * sm2)
        + 0.5 * np.sin(2 * d * t_r) * np.sin(d * T) * cross
        + 0.25 * s_r**2 * (diag + off * np.cos(2 * d * T))
    )
    if np.ndim(delta) == 0:
        return float(jz[0]), float(jz2[0])
    return jz, jz2


def precision_cat_closed(N, theta, delta, T, gamma_g=1.0, normalization="exact"):
    """``F~(theta) / (gamma T)`` for protocol III."""
    ms, s2 = cat_weights(N, theta, normalization)
    jz, jz2 = cat_closed_III(N, theta, delta, T, normalization)
    den = abs(np.sum(2 * ms**2 * s2 * np.cos(2 * ms * delta * T)))
    if den < 1e-14:
        raise DegenerateSlopeError("signal slope vanishes; precision undefined")
    return float(np.sqrt(max(jz2 - jz**2, 0.0)) / den / (gamma_g * T))


# ------------------------------------------------------------------- ac field


def ac_closed_signals(state_kind, N, theta, n, n_m, phi, chi=0.0, omega=200 * np.pi, normalization="exact"):
    """``(J_{z,n}, J~_z)`` with ``J~_z = (1/n_m) sum_{n'=1}^{n_m} J_{z,n'}``.

    Coherent state (pi/2-x readout): ``(N/2) sin(n phi) cos^{N-1}(2 chi t_n)``.
    Cat/GHZ (twist readout): ``(-1)^{J+1} sum m S_m^2 sin(2 m n phi)``. The
    averages use the telescoped sine sums and fall back to direct summation
    where a ``sin`` denominator vanishes.
    """
    kind = state_kind.upper()
    if kind == "SCS":
        t = 2 * np.pi * np.arange(1, n_m + 1) / omega
        series = (N / 2) * np.sin(np.arange(1, n_m + 1) * phi) * np.cos(2 * chi * t) ** (N - 1)
        jzn = (N / 2) * np.sin(n * phi) * np.cos(2 * chi * 2 * np.pi * n / omega) ** (N - 1)
        if chi == 0 and abs(np.sin(phi / 2)) > 1e-12:
            avg = (N / 2) * (np.cos(phi / 2) - np.cos((2 * n_m + 1) * phi / 2)) / (2 * np.sin(phi / 2)) / n_m
        else:
            avg = series.mean()
        return float(jzn), float(avg)
    if kind not in ("CAT", "GHZ"):
        raise DomainError(f"unknown state kind {state_kind!r}")
    ms, s2 = cat_weights(N, 0.0 if kind == "GHZ" else theta, normalization)
    sign = (-1.0) ** (N // 2 + 1)
    jzn = sign * np.sum(ms * s2 * np.sin(2 * ms * n * phi))
    den = np.sin(ms * phi)
    if np.all(np.abs(den) > 1e-12):
        avg = sign * np.sum(ms * s2 * (np.cos(ms * phi) - np.cos((2 * n_m + 1) * ms * phi)) / (2 * den)) / n_m
    else:
        nn = np.arange(1, n_m + 1)
        avg = sign * np.sum(ms * s2 * np.sin(2 * np.outer(nn * phi, ms))) / n_m
    return float(jzn), float(avg)


def precision_ac_closed(N, theta, n, phi, omega, gamma_g, normalization="exact"):
    """``Delta B_ac = F~(theta) omega / (4 n gamma_g)`` for cat/GHZ input."""
    ms, s2 = cat_weights(N, theta, normalization)
    J = N // 2
    jzn = (-1.0) ** (J + 1) * np.sum(ms * s2 * np.sin(2 * ms * n * phi))
    den = abs(np.sum(2 * ms**2 * s2 * np.cos(2 * ms * n * phi)))
    if den < 1e-14:
        raise DegenerateSlopeError("signal slope vanishes; precision undefined")
    f = np.sqrt(max(np.sum(ms**2 * s2) - jzn**2, 0.0)) / den
    return float(f * omega / (4 * n * gamma_g))


def precision_ac_scs_closed(N, n, phi, omega, gamma_g, chi=0.0):
    """Coherent-state ac precision; ``omega / (4 n gamma_g sqrt(N))`` at ``chi = 0``."""
    tn = 2 * np.pi * n / omega
    c1 = np.cos(2 * chi * tn)
    c2 = np.cos(4 * chi * tn)
    jz = (N / 2) * np.sin(n * phi) * c1 ** (N - 1)
    jz2 = N * (N + 1) / 8 - N * (N - 1) / 8 * c2 ** (N - 2) * np.cos(2 * n * phi)
    den = abs((N / 2) * np.cos(n * phi) * c1 ** (N - 1)) * 4 * n * gamma_g / omega
    if den < 1e-14:
        raise DegenerateSlopeError("signal slope vanishes; precision undefined")
    return float(np.sqrt(max(jz2 - jz**2, 0.0)) / den)


# ------------------------------------------------------------ Fisher information


def qfi_variance(state, T, gamma_g=1.0):
    """Pure-state QFI for a ``gamma B T Jz`` phase: ``4 T^2 gamma^2 Var(Jz)``."""
    N = len(state) - 1
    jz = expectation(state, collective_operator(N, "Jz"))
    jz2 = expectation(state, collective_operator(N, "Jz2"))
    return 4 * T**2 * gamma_g**2 * (jz2 - jz**2)


def qfi_derivative(state, T, gamma_g=1.0, h=1e-5, evolution=None, b0=0.0):
    """``4(<dPsi|dPsi> - |<dPsi|Psi>|^2)`` with a central difference in ``B``.

    ``evolution(B)`` returns ``|Psi(B)>``; by default it is
    ``exp(-i gamma B T Jz) |state>``.
    """
    state = np.asarray(state, dtype=complex)
    if evolution is None:
        m = collective_operator(len(state) - 1, "Jz").diagonal().real

        def evolution(b):
            return np.exp(-1j * gamma_g * b * T * m) * state

    psi = evolution(b0)
    dpsi = (evolution(b0 + h) - evolution(b0 - h)) / (2 * h)
    return float(4 * (np.vdot(dpsi, dpsi).real - abs(np.vdot(dpsi, psi)) ** 2))


def qcrb(f_q, nu=1):
    """``1 / sqrt(nu F_Q)``."""
    if not f_q > 0:
        raise DomainError("Fisher information must be > 0")
    if int(nu) != nu or nu < 1:
        raise DomainError("nu must be an integer >= 1")
    return 1.0 / np.sqrt(nu * f_q)


# ----------------------------------------------------------- error propagation


def precision_error_prop(spectrum, at=0.0, gamma_g=1.0, stencil_h=None, x="delta"):
    """``sqrt(<Jz^2> - <Jz>^2) / (gamma |d<Jz>/d delta|)`` from a tabulated spectrum.

    The slope is a central difference over ``at +- stencil_h``; both points
    must lie on the grid (default stencil: the local grid spacing).
    """
    xs = np.asarray(spectrum[x])
    i = int(np.argmin(np.abs(xs - at)))
    scale = max(1.0, abs(at))
    if abs(xs[i] - at) > 1e-9 * scale:
        raise DomainError(f"evaluation point {at} is not on the grid")
    if stencil_h is None:
        if i == 0 or i == len(xs) - 1:
            raise DomainError("evaluation point must be interior to the grid")
        stencil_h = 0.5 * (xs[i + 1] - xs[i - 1])
    lo = int(np.argmin(np.abs(xs - (at - stencil_h))))
    hi = int(np.argmin(np.abs(xs - (at + stencil_h))))
    tol = 1e-9 * max(1.0, abs(stencil_h))
    if abs(xs[lo] - (at - stencil_h)) > tol or abs(xs[hi] - (at + stencil_h)) > tol or lo == hi:
        raise DomainError("stencil points are not on the grid")
    jz, jz2 = np.asarray(spectrum["jz"]), np.asarray(spectrum["jz2"])
    slope = (jz[hi] - jz[lo]) / (xs[hi] - xs[lo])
    if abs(slope) < 1e-14:
        raise DegenerateSlopeError(f"slope {slope:.2e} at {at}: the signal is flat there")
    var = max(jz2[i] - jz[i] ** 2, 0.0)
    return float(np.sqrt(var) / (gamma_g * abs(slope)))


def precision_curve(spectrum, gamma_g=1.0):
    """Error-propagation precision at every interior grid point (``nan`` where flat)."""
    xs = np.asarray(spectrum["delta"])
    jz, jz2 = np.asarray(spectrum["jz"]), np.asarray(spectrum["jz2"])
    out = np.full(len(xs), np.nan)
    if len(xs) < 3:
        return out
    slope = (jz[2:] - jz[:-2]) / (xs[2:] - xs[:-2])
    var = np.maximum(jz2[1:-1] - jz[1:-1] ** 2, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.sqrt(var) / (gamma_g * np.abs(slope))
    p[np.abs(slope) < 1e-14] = np.nan
    out[1:-1] = p
    return out


def fit_exponent(ns, values) -> float:
    """Least-squares slope of ``log(values)`` against ``log(ns)``."""
    return float(np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(values, float)), 1)[0])


def scaling_scan(state_kind, protocol, Ns, chi=0.0, T=1.0, gamma_g=1.0, chi_r=None, h=None, workers=None):
    """Error-propagation precision at ``delta = 0`` for each N, and the fitted exponent.

    ``chi_r`` defaults to ``chi`` (or ``0.04 pi`` when ``chi = 0``) for the
    twist protocols. The stencil defaults to ``1e-3 / (N T)``, well inside the
    fringe even for GHZ input.
    """
    from .protocols.dc import DcProtocolParams, dc_spectrum, parse_state_kind
    from .table import parallel_map

    Ns = [int(n) for n in Ns]
    if len(Ns) < 5:
        raise DomainError("scaling_scan needs at least 5 particle numbers")
    kind, theta = parse_state_kind(state_kind)
    if chi_r is None:
        chi_r = chi if chi > 0 else 0.04 * np.pi

    def one(N):
        p = DcProtocolParams(protocol, N, chi, chi_r if str(protocol) not in ("I", "1") else 0.0, T)
        hh = h if h is not None else 1e-3 / (N * T)
        psi = make_state(N, kind, theta)
        spec = dc_spectrum(p, None, [-hh, 0.0, hh], psi0=psi, workers=1)
        prec = precision_error_prop(spec, 0.0, gamma_g, hh)
        return PrecisionPoint(N, 0.0, prec, qcrb(qfi_variance(psi, T, gamma_g)), "ErrorProp", hh)

    pts = parallel_map(one, Ns, workers)
    return pts, fit_exponent(Ns, [p.precision for p in pts])
