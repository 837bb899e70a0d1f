"""Collective spin-J operators in the Dicke basis.

Basis ordering is fixed to descending magnetic number: index ``k`` holds
``|J, m = J - k>``, so ``Jz`` is ``diag(J, J-1, ..., -J)``.

Operators and states are plain ``numpy`` arrays. Operators handed out by
:func:`collective_operator` are cached and read-only, so they can be shared
between threads without copying.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ContractError, DomainError, NumericalConsistencyError

__all__ = [
    "TOL",
    "Tolerances",
    "SpinSystem",
    "ladder_coefficient",
    "collective_operator",
    "rotation",
    "propagator",
    "evolve_unitary",
    "expectation",
    "density_matrix",
    "check_hermitian",
    "check_unitary",
    "check_density_matrix",
]

OPERATOR_NAMES = ("Jx", "Jy", "Jz", "Jplus", "Jminus", "Jz2", "Jx2", "Jy2")


@dataclass
class Tolerances:
    """Default numerical tolerances; mutate ``TOL`` to loosen them for large sweeps."""

    hermitian: float = 1e-12
    unitary: float = 1e-10
    norm: float = 1e-10
    imag: float = 1e-10
    trace: float = 1e-8
    positivity: float = 1e-8


TOL = Tolerances()


@dataclass(frozen=True)
class SpinSystem:
    """``N`` spin-1/2 particles restricted to the symmetric sector ``J = N/2``."""

    n_particles: int

    def __post_init__(self):
        if int(self.n_particles) != self.n_particles or self.n_particles < 1:
            raise DomainError(f"n_particles must be a positive integer, got {self.n_particles!r}")

    @property
    def j(self) -> float:
        return self.n_particles / 2

    @property
    def dim(self) -> int:
        return self.n_particles + 1

    @property
    def m(self) -> np.ndarray:
        """Magnetic numbers in basis order (descending)."""
        return _m_values(self.n_particles)

    def index(self, m: float) -> int:
        k = self.j - m
        if abs(m) > self.j or abs(k - round(k)) > 1e-12:
            raise DomainError(f"m={m} is not a valid magnetic number for J={self.j}")
        return int(round(k))

    def basis(self, m: float) -> np.ndarray:
        """The Dicke state ``|J, m>``."""
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(m)] = 1.0
        return v

    def op(self, which: str) -> np.ndarray:
        return collective_operator(self, which)


def _as_system(sys) -> SpinSystem:
    return sys if isinstance(sys, SpinSystem) else SpinSystem(int(sys))


@lru_cache(maxsize=None)
def _m_values(n: int) -> np.ndarray:
    m = n / 2 - np.arange(n + 1, dtype=float)
    m.setflags(write=False)
    return m


def ladder_coefficient(j: float, m: float, sign: str) -> float:
    """``sqrt(j(j+1) - m(m +/- 1))``, the matrix element of ``J+/-`` on ``|j, m>``.

    Exactly zero at the ends of the ladder.
    """
    if sign not in ("+", "-"):
        raise DomainError(f"sign must be '+' or '-', got {sign!r}")
    if abs(m) > j + 1e-12:
        raise DomainError(f"|m|={abs(m)} exceeds j={j}")
    s = 1 if sign == "+" else -1
    if (s > 0 and m >= j) or (s < 0 and m <= -j):
        return 0.0
    return float(np.sqrt(j * (j + 1) - m * (m + s)))


@lru_cache(maxsize=None)
def _operators(n: int) -> dict:
    j = n / 2
    m = _m_values(n)
    jp = np.zeros((n + 1, n + 1), dtype=complex)
    for k in range(1, n + 1):
        # J+ |m_k> = lambda |m_k + 1> and m_k + 1 sits at index k - 1
        jp[k - 1, k] = ladder_coefficient(j, m[k], "+")
    jm = jp.T.copy()
    jz = np.diag(m).astype(complex)
    jx = (jp + jm) / 2
    jy = (jp - jm) / 2j
    ops = {
        "Jplus": jp,
        "Jminus": jm,
        "Jx": jx,
        "Jy": jy,
        "Jz": jz,
        "Jx2": jx @ jx,
        "Jy2": jy @ jy,
        "Jz2": jz @ jz,
    }
    for a in ops.values():
        a.setflags(write=False)
    return ops


def collective_operator(sys, which: str) -> np.ndarray:
    """Dense matrix of a collective operator (``Jx``, ``Jy``, ``Jz``, ``Jplus``,
    ``Jminus`` or one of the squares ``Jx2``, ``Jy2``, ``Jz2``)."""
    if which not in OPERATOR_NAMES:
        raise DomainError(f"unknown operator {which!r}; expected one of {OPERATOR_NAMES}")
    return _operators(_as_system(sys).n_particles)[which]


@lru_cache(maxsize=None)
def _axis_eig(n: int, axis: str):
    if axis == "z":
        vals = _m_values(n).copy()
        vecs = np.eye(n + 1, dtype=complex)
    else:
        vals, vecs = np.linalg.eigh(_operators(n)["J" + axis])
        # the spectrum of any spin component is exactly {-J, ..., J}
        vals = np.round(2 * vals) / 2
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return vals, vecs


def rotation(sys, axis: str, angle: float) -> np.ndarray:
    """``exp(-i * angle * J_axis)``."""
    if axis not in ("x", "y", "z"):
        raise DomainError(f"axis must be x, y or z, got {axis!r}")
    if not np.isfinite(angle):
        raise DomainError("rotation angle must be finite")
    n = _as_system(sys).n_particles
    if angle == 0:
        return np.eye(n + 1, dtype=complex)
    vals, vecs = _axis_eig(n, axis)
    if axis == "z":
        return np.diag(np.exp(-1j * angle * vals))
    return (vecs * np.exp(-1j * angle * vals)) @ vecs.conj().T


def check_hermitian(h: np.ndarray, tol: float | None = None) -> None:
    tol = TOL.hermitian if tol is None else tol
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {h.shape}")
    # scale-aware: generators like chi*Jz^2 at N=100 carry entries ~1e3
    scale = max(1.0, float(np.abs(h).max()))
    if np.abs(h - h.conj().T).max() > tol * scale:
        raise ContractError("generator is not Hermitian")


def check_unitary(u: np.ndarray, tol: float | None = None) -> None:
    tol = TOL.unitary if tol is None else tol
    err = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
    if err > tol:
        raise NumericalConsistencyError(f"matrix deviates from unitarity by {err:.2e}")


def _is_diagonal(h: np.ndarray) -> bool:
    return not np.any(h - np.diag(np.diagonal(h)))


def propagator(h: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i h t)`` for Hermitian ``h`` via eigendecomposition."""
    check_hermitian(h)
    if _is_diagonal(h):
        return np.diag(np.exp(-1j * t * np.diagonal(h).real))
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * t * w)) @ v.conj().T


def evolve_unitary(state: np.ndarray, h: np.ndarray, t: float) -> np.ndarray:
    """Apply ``exp(-i h t)`` to a state vector (or to each column of a matrix)."""
    state = np.asarray(state, dtype=complex)
    check_hermitian(h)
    if state.shape[0] != h.shape[0]:
        raise ContractError(f"dimension mismatch: state {state.shape[0]} vs generator {h.shape[0]}")
    if t == 0:
        return state.copy()
    if _is_diagonal(h):
        ph = np.exp(-1j * t * np.diagonal(h).real)
        out = ph * state if state.ndim == 1 else ph[:, None] * state
    else:
        w, v = np.linalg.eigh(h)
        out = v @ (np.exp(-1j * t * w)[:, None] * (v.conj().T @ state.reshape(len(w), -1)))
        out = out.reshape(state.shape)
    if state.ndim == 1:
        _check_norm(out, np.linalg.norm(state))
    return out


def _check_norm(out: np.ndarray, expected: float) -> None:
    if abs(np.linalg.norm(out) - expected) > TOL.norm:
        raise NumericalConsistencyError("norm not preserved by unitary evolution")


def density_matrix(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    return np.outer(state, state.conj())


def expectation(state: np.ndarray, op: np.ndarray) -> float:
    """``<psi|op|psi>`` for a vector or ``Tr(rho op)`` for a density matrix.

    Raises :class:`NumericalConsistencyError` if the result has an imaginary
    part above ``TOL.imag`` (relative to the operator scale).
    """
    state = np.asarray(state)
    if state.shape[0] != op.shape[0]:
        raise ContractError(f"dimension mismatch: {state.shape[0]} vs {op.shape[0]}")
    if state.ndim == 1:
        val = np.vdot(state, op @ state)
    else:
        val = np.trace(state @ op)
    scale = max(1.0, abs(val))
    if abs(val.imag) > TOL.imag * scale:
        raise NumericalConsistencyError(f"expectation has imaginary residue {val.imag:.3e}")
    return float(val.real)


def check_density_matrix(rho: np.ndarray, positivity: float | None = None) -> None:
    """Hermiticity, unit trace and (approximate) positivity of ``rho``."""
    positivity = TOL.positivity if positivity is None else positivity
    if np.abs(rho - rho.conj().T).max() > 1e-10:
        raise NumericalConsistencyError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > TOL.trace:
        raise NumericalConsistencyError(f"density matrix trace {np.trace(rho).real:.12f} != 1")
    lo = np.linalg.eigvalsh((rho + rho.conj().T) / 2).min()
    if lo < -positivity:
        raise NumericalConsistencyError(f"density matrix has negative eigenvalue {lo:.3e}")
