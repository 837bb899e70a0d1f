"""Input-state factories and exchange-symmetry classification."""
from __future__ import annotations

import warnings
from enum import Enum

import numpy as np
from scipy.special import gammaln

from .errors import DomainError
from .spin import _as_system, rotation

__all__ = [
    "Symmetry",
    "spin_coherent",
    "spin_cat",
    "ghz",
    "cat_threshold",
    "symmetry_class",
    "is_exchange_eigenstate",
    "make_state",
]


class Symmetry(str, Enum):
    SYMMETRIC = "Symmetric"
    ANTISYMMETRIC = "Antisymmetric"
    NONE = "None"


def _coherent_amplitudes(n: int, theta: float) -> np.ndarray:
    """Real binomial amplitudes for phi = 0, descending m."""
    j = n / 2
    m = j - np.arange(n + 1)
    up = (j + m).astype(int)  # powers of cos(theta/2)
    dn = (j - m).astype(int)  # powers of sin(theta/2)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    # exact endpoints: log(0) would poison every entry with NaN
    if s == 0.0:
        out = np.zeros(n + 1)
        out[0] = 1.0
        return out
    if theta == np.pi:
        out = np.zeros(n + 1)
        out[-1] = 1.0
        return out
    logb = 0.5 * (gammaln(n + 1) - gammaln(up + 1) - gammaln(dn + 1))
    sign = np.where(c < 0, (-1.0) ** up, 1.0)  # c >= 0 on [0, pi] up to round-off
    return sign * np.exp(logb + up * np.log(abs(c)) + dn * np.log(s))


def spin_coherent(sys, theta: float, phi: float = 0.0) -> np.ndarray:
    """Spin coherent state pointing along (theta, phi).

    ``C_m = sqrt(binom(2J, J+m)) cos^{J+m}(theta/2) sin^{J-m}(theta/2) e^{-i m phi}``,
    with the binomial evaluated in log-space.
    """
    sys = _as_system(sys)
    if not (0.0 <= theta <= np.pi):
        raise DomainError(f"theta must lie in [0, pi], got {theta}")
    if not (0.0 <= phi < 2 * np.pi):
        raise DomainError(f"phi must lie in [0, 2pi), got {phi}")
    amp = _coherent_amplitudes(sys.n_particles, theta)
    return amp * np.exp(-1j * sys.m * phi)


def cat_threshold(sys) -> float:
    """Largest theta for which the two branches are quasi-orthogonal.

    ``theta_c = asin(2 {[(J-1)!]^2 / (2 (2J)!)}^{1/(2J)})``; only defined for J >= 1.
    """
    sys = _as_system(sys)
    j = sys.j
    if j < 1:
        return float("nan")
    x = 2 * np.exp((2 * gammaln(j) - np.log(2) - gammaln(2 * j + 1)) / (2 * j))
    return float(np.arcsin(min(x, 1.0)))


def spin_cat(sys, theta: float) -> np.ndarray:
    """Superposition of coherent states at theta and pi - theta, exactly normalized.

    The coefficients are ``(C_m + C_{-m}) / sqrt(norm)`` so ``C_m = C_{-m}``
    holds bit for bit. A warning is issued beyond the quasi-orthogonality
    threshold, where the state stops being a genuine cat.
    """
    sys = _as_system(sys)
    if not (0.0 <= theta <= np.pi / 2):
        raise DomainError(f"theta must lie in [0, pi/2], got {theta}")
    tc = cat_threshold(sys)
    if np.isfinite(tc) and theta > tc:
        warnings.warn(
            f"theta={theta:.4f} exceeds the cat threshold {tc:.4f} for N={sys.n_particles}; "
            "closed forms assuming orthogonal branches will be inaccurate",
            stacklevel=2,
        )
    c = _coherent_amplitudes(sys.n_particles, theta)
    s = c + c[::-1]
    return (s / np.linalg.norm(s)).astype(complex)


def ghz(sys) -> np.ndarray:
    """``(|J,J> + |J,-J>)/sqrt(2)``."""
    sys = _as_system(sys)
    v = np.zeros(sys.dim, dtype=complex)
    v[0] = v[-1] = 1 / np.sqrt(2)
    return v


def make_state(sys, kind: str, theta: float | None = None) -> np.ndarray:
    """Dispatch on a state label: ``SCS`` (equatorial), ``GHZ`` or ``CAT`` (needs theta)."""
    k = kind.upper()
    if k == "SCS":
        return spin_coherent(sys, np.pi / 2, 0.0)
    if k == "GHZ":
        return ghz(sys)
    if k == "CAT":
        if theta is None:
            raise DomainError("CAT state needs theta")
        return spin_cat(sys, theta)
    raise DomainError(f"unknown state kind {kind!r}")


def symmetry_class(state: np.ndarray, tol: float = 1e-10) -> Symmetry:
    """Classify coefficients as ``C_m = +C_{-m}``, ``C_m = -C_{-m}`` or neither."""
    c = np.asarray(state)
    r = c[::-1]
    if np.abs(c - r).max() <= tol:
        return Symmetry.SYMMETRIC
    # odd dim has a middle m = 0 entry; c + r there is 2*C_0, so it is covered
    if np.abs(c + r).max() <= tol:
        return Symmetry.ANTISYMMETRIC
    return Symmetry.NONE


def is_exchange_eigenstate(state: np.ndarray, tol: float = 1e-10):
    """Test whether ``U_ex^dag |psi>`` is proportional to ``|psi>``.

    Returns ``(flag, eigenvalue)``; the eigenvalue is ``None`` when flag is false.
    """
    c = np.asarray(state, dtype=complex)
    n = len(c) - 1
    u = rotation(n, "x", np.pi).conj().T
    out = u @ c
    lam = np.vdot(c, out) / np.vdot(c, c)
    if np.abs(out - lam * c).max() <= tol:
        return True, complex(lam)
    return False, None
