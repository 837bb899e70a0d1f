"""Analytics-vs-numerics oracle suite behind ``spdmbi verify``.

Each check returns the worst deviation it saw and the tolerance it is held
to. Nothing here is a unit test in the pytest sense; it is a self-audit that
can be run from an installed package.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import analytics as an
from .evolution import NoiseModel, PulseSchedule, Segment, dissipator_covariance_check, evolve_schedule_open, schedule_propagator
from .protocols.ac import AcProtocolParams, ac_full_time_domain, ac_final_state, ac_signal
from .protocols.dc import DcProtocolParams, build_dc_schedule, dc_spectrum
from .protocols.lockin import lockin_phase, lockin_phase_numeric
from .spin import collective_operator, density_matrix, rotation
from .states import ghz, is_exchange_eigenstate, make_state, spin_cat, spin_coherent

__all__ = ["CheckResult", "CHECKS", "run_checks"]

NS = (8, 12, 20)
CHIS = (0.0, 0.04 * np.pi)
CAT_THETA = np.pi / 8


@dataclass(frozen=True)
class CheckResult:
    name: str
    error: float
    tol: float

    @property
    def ok(self) -> bool:
        return bool(np.isfinite(self.error) and self.error <= self.tol)

    def line(self) -> str:
        flag = "PASS" if self.ok else "FAIL"
        return f"{flag}  {self.name:<44s} err={self.error:.3e}  tol={self.tol:.0e}"


def _su2():
    err = 0.0
    for n in (1, 2, 5, 10, 21):
        jx, jy, jz = (collective_operator(n, k) for k in ("Jx", "Jy", "Jz"))
        j = n / 2
        err = max(
            err,
            np.abs(jx @ jy - jy @ jx - 1j * jz).max(),
            np.abs(jy @ jz - jz @ jy - 1j * jx).max(),
            np.abs(jz @ jx - jx @ jz - 1j * jy).max(),
            np.abs(jx @ jx + jy @ jy + jz @ jz - j * (j + 1) * np.eye(n + 1)).max(),
        )
    return err


def _two_pi():
    err = 0.0
    for n in (1, 2, 3, 8, 15):
        for ax in ("x", "y", "z"):
            err = max(err, np.abs(rotation(n, ax, 2 * np.pi) - (-1) ** n * np.eye(n + 1)).max())
    return err


def _exchange():
    # exp(i pi Jx) maps |J,m> to a phase times |J,-m>; symmetric states are eigenstates
    err = 0.0
    for n in (2, 5, 10):
        u = rotation(n, "x", -np.pi)
        err = max(err, np.abs(np.abs(u) - np.fliplr(np.eye(n + 1))).max())
        for psi in (ghz(n), spin_coherent(n, np.pi / 2)):
            ok, _ = is_exchange_eigenstate(psi)
            err = max(err, 0.0 if ok else 1.0)
    return err


def _antisymmetry():
    d = np.linspace(-np.pi, np.pi, 21)
    err = 0.0
    for kind in ("SCS", "GHZ", f"CAT:{CAT_THETA!r}"):
        for proto in ("I", "II"):
            p = DcProtocolParams(proto, 8, 0.04 * np.pi, 0.04 * np.pi, omega=2 * np.pi, epsilon=0.1, gamma_z=0.01)
            jz = dc_spectrum(p, kind, d, workers=1)["jz"]
            err = max(err, np.abs(jz + jz[::-1]).max() / 8)
    return err


def _covariance():
    noise = NoiseModel(dephasing_rate=0.3)
    good = dissipator_covariance_check(noise, 6)
    bad = dissipator_covariance_check(noise, 6, operator="Jplus")
    return 0.0 if (good and not bad) else 1.0


def _rk4_vs_exact():
    n = 6
    rho = density_matrix(spin_cat(n, CAT_THETA))
    seg = Segment(1.0, chi=0.3, delta=0.7, label="interrogation")
    sched = PulseSchedule((seg,))
    noise = NoiseModel(dephasing_rate=0.05)
    a = evolve_schedule_open(rho, sched, noise)
    b = evolve_schedule_open(rho, sched, noise, dt=2e-3, rk4=True)
    return np.abs(a - b).max()


def _scs_closed():
    err = 0.0
    d = np.linspace(-np.pi, np.pi, 101)
    for n in NS:
        for chi in CHIS:
            t = dc_spectrum(DcProtocolParams("I", n, chi), "SCS", d, workers=1)
            err = max(err, np.abs(t["jz"] - an.jz_scs_closed(n, chi, d, 1.0)).max())
            err = max(err, np.abs(t["jz2"] - an.jz2_scs_closed(n, chi, d, 1.0)).max())
    return err


def _cat_closed(proto):
    err = 0.0
    d = np.linspace(-np.pi, np.pi, 101)
    for n in NS:
        for chi in CHIS:
            for th in (0.0, CAT_THETA):
                p = DcProtocolParams(proto, n, chi, 0.04 * np.pi)
                t = dc_spectrum(p, None, d, psi0=spin_cat(n, th), workers=1)
                if proto == "III":
                    a, b = an.cat_closed_III(n, th, d, 1.0)
                else:
                    a, b = an.cat_closed_II(n, th, chi, d, 1.0, p.readout_time)
                err = max(err, np.abs(t["jz"] - a).max(), np.abs(t["jz2"] - b).max())
    return err


def _ac_closed(kinds):
    err = 0.0
    for n in NS:
        for chi in CHIS:
            for kind, th in kinds:
                for x in np.linspace(-0.05, 0.05, 11):
                    p = AcProtocolParams(n_cycles=3, n_max=4, chi=chi, n_particles=n).at_modulation(x)
                    num = ac_signal(p, (kind, th))
                    cl = an.ac_closed_signals(kind, n, th, 3, 4, p.phi, chi, p.omega_sig)
                    err = max(err, abs(num[0] - cl[0]), abs(num[1] - cl[1]))
    return err


def _ac_time_domain():
    # sampling error sits on the large rectified phase, so compare against N/2
    err = 0.0
    n = 8
    jz = collective_operator(n, "Jz")
    ro = rotation(n, "x", np.pi / 2)
    psi = spin_coherent(n, np.pi / 2)
    for x in (-0.02, 0.0, 0.02):
        p = AcProtocolParams(n_cycles=2, n_particles=n, chi=0.04 * np.pi).at_modulation(x)
        a = ro @ ac_final_state(p, psi)
        b = ro @ ac_full_time_domain(p, psi)
        err = max(err, abs(np.vdot(a, jz @ a) - np.vdot(b, jz @ b)) / (n / 2))
    return err


def _readouts():
    err = 0.0
    for n in (4, 8, 20):
        jx, jy = collective_operator(n, "Jx"), collective_operator(n, "Jy")
        for d in (-0.7, 0.1, 1.3):
            for proto in ("II", "III"):
                p = DcProtocolParams(proto, n, 0.1, 0.3)
                u = schedule_propagator(n, build_dc_schedule(p, d).slice(1))
                tr = p.readout_time
                ref = expm(-1j * (0.3 * jy @ jy + d * jy) * tr) if proto == "II" else expm(-1j * 0.3 * tr * jx @ jx)
                err = max(err, np.abs(u - ref).max())
    return err


def _c_jz2():
    err = 0.0
    for n in (2, 4, 8, 20):
        jy2, jz2 = collective_operator(n, "Jy2"), collective_operator(n, "Jz2")
        u = expm(-0.5j * np.pi * jy2)
        err = max(err, np.abs(u @ jz2 @ u.conj().T - jz2).max())
    return err


def _qfi_closed():
    err = 0.0
    for n in (8, 20, 64):
        for kind, th, ref in (
            ("SCS", None, n),
            ("GHZ", None, n * n),
            ("CAT", CAT_THETA, None),
        ):
            f = an.qfi_variance(make_state(n, kind, th), 1.0, 1.0)
            if ref is None:
                continue
            err = max(err, abs(f - ref) / ref)
    return err


def _qfi_derivative():
    err = 0.0
    for n in (8, 20):
        for kind, th in (("SCS", None), ("GHZ", None), ("CAT", CAT_THETA)):
            psi = make_state(n, kind, th)
            fv = an.qfi_variance(psi, 1.0, 1.0)
            err = max(err, abs(an.qfi_derivative(psi, 1.0, 1.0) - fv) / fv)
    return err


def _lockin_phase():
    err = 0.0
    w = 200 * np.pi
    for n in (1, 3, 10):
        for dt in (-3e-5, 1e-5, 4e-5):
            err = max(err, abs(lockin_phase(1.0, 1.0, w, dt, n) - lockin_phase_numeric(1.0, 1.0, w, dt, n)))
    return err


CHECKS = (
    ("su(2) algebra and Casimir", _su2, 1e-12),
    ("2pi rotation = (-1)^N", _two_pi, 1e-10),
    ("exchange operator maps m -> -m", _exchange, 1e-10),
    ("antisymmetric <Jz>(delta), protocols I/II", _antisymmetry, 1e-8),
    ("Jz dephasing commutes with exchange", _covariance, 0.5),
    ("exact dephasing = RK4 master equation", _rk4_vs_exact, 1e-8),
    ("SCS protocol-I <Jz>, <Jz^2>", _scs_closed, 1e-8),
    ("cat protocol-II <Jz>, <Jz^2>", lambda: _cat_closed("II"), 1e-8),
    ("cat protocol-III <Jz>, <Jz^2>", lambda: _cat_closed("III"), 1e-8),
    ("ac SCS J_z,n and average", lambda: _ac_closed((("SCS", None),)), 1e-8),
    ("ac GHZ/cat J_z,n and average", lambda: _ac_closed((("GHZ", 0.0), ("CAT", CAT_THETA))), 1e-8),
    ("ac propagator vs time domain (per N/2)", _ac_time_domain, 1e-2),
    ("protocol-II/III readout composition", _readouts, 1e-10),
    ("Jy^2 quarter twist preserves Jz^2", _c_jz2, 1e-10),
    ("QFI: N for SCS, N^2 for GHZ", _qfi_closed, 1e-10),
    ("QFI: derivative vs variance", _qfi_derivative, 1e-6),
    ("lock-in phase vs direct integral", _lockin_phase, 1e-10),
)


def run_checks(names=None, echo=print) -> list[CheckResult]:
    out = []
    for name, fn, tol in CHECKS:
        if names is not None and name not in names:
            continue
        try:
            res = CheckResult(name, float(fn()), tol)
        except Exception as exc:  # a crash is a failure, not an abort of the whole suite
            res = CheckResult(f"{name} ({type(exc).__name__}: {exc})", float("nan"), tol)
        if echo is not None:
            echo(res.line())
        out.append(res)
    return out
