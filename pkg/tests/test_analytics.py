import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spdmbi import DegenerateSlopeError, DomainError, UnsupportedDomainError
from spdmbi import analytics as an
from spdmbi.protocols import AcProtocolParams, DcProtocolParams, ac_signal, dc_final_state, dc_spectrum
from spdmbi.spin import collective_operator, expectation
from spdmbi.states import ghz, spin_cat, spin_coherent

CHI = 0.04 * np.pi
D = np.linspace(-np.pi, np.pi, 49)


def test_cat_weights_sum_to_one():
    for n in (2, 8, 20):
        for th in (0.0, 0.2, np.pi / 8):
            s = an.cat_amplitudes(n, th)
            assert np.sum(s**2) / 2 == pytest.approx(1.0, abs=1e-12)
            _, s2 = an.cat_weights(n, th)
            assert s2.sum() <= 1 + 1e-12
    with pytest.raises(UnsupportedDomainError):
        an.cat_weights(7, 0.2)
    with pytest.raises(DomainError):
        an.cat_amplitudes(8, 0.2, "half")


def test_cat_amplitudes_match_state():
    s = an.cat_amplitudes(10, 0.3)
    np.testing.assert_allclose(s / np.sqrt(2), spin_cat(10, 0.3).real, atol=1e-14)


@pytest.mark.parametrize("n", [4, 9, 20])
@pytest.mark.parametrize("chi", [0.0, CHI, 0.3])
def test_scs_closed_matches_numerics(n, chi):
    t = dc_spectrum(DcProtocolParams("I", n, chi), "SCS", D)
    assert np.abs(t["jz"] - an.jz_scs_closed(n, chi, D, 1.0)).max() < 1e-10
    assert np.abs(t["jz2"] - an.jz2_scs_closed(n, chi, D, 1.0)).max() < 1e-10


@pytest.mark.parametrize("n", [4, 10, 20])
@pytest.mark.parametrize("theta", [0.0, 0.2, np.pi / 8])
def test_cat_protocol_three_closed_matches_numerics(n, theta):
    kind = "GHZ" if theta == 0 else f"CAT:{theta!r}"
    t = dc_spectrum(DcProtocolParams("III", n, CHI, CHI), kind, D)
    jz, jz2 = an.cat_closed_III(n, theta, D, 1.0)
    assert np.abs(t["jz"] - jz).max() < 1e-10
    assert np.abs(t["jz2"] - jz2).max() < 1e-10


@pytest.mark.parametrize("n", [4, 10, 20])
@pytest.mark.parametrize("theta", [0.0, np.pi / 8])
@pytest.mark.parametrize("chi", [0.0, CHI])
def test_cat_protocol_two_closed_matches_numerics(n, theta, chi):
    kind = "GHZ" if theta == 0 else f"CAT:{theta!r}"
    p = DcProtocolParams("II", n, chi, CHI)
    t = dc_spectrum(p, kind, D)
    jz, jz2 = an.cat_closed_II(n, theta, chi, D, 1.0, p.readout_time)
    assert np.abs(t["jz"] - jz).max() < 1e-10
    assert np.abs(t["jz2"] - jz2).max() < 1e-10


def test_closed_forms_reject_odd_n():
    with pytest.raises(UnsupportedDomainError):
        an.cat_closed_III(21, 0.2, 0.1, 1.0)
    with pytest.raises(UnsupportedDomainError):
        an.cat_closed_II(21, 0.2, CHI, 0.1, 1.0, 12.5)


def test_closed_precisions_match_error_propagation():
    n, h = 20, 1e-4
    d = [-h, 0.0, h]
    t = dc_spectrum(DcProtocolParams("I", n, CHI), "SCS", d)
    assert an.precision_error_prop(t, 0.0) == pytest.approx(an.precision_scs_closed(n, CHI, 0.0, 1.0), rel=1e-6)
    t = dc_spectrum(DcProtocolParams("III", n, CHI, CHI), "GHZ", d)
    assert an.precision_error_prop(t, 0.0) == pytest.approx(an.precision_cat_closed(n, 0.0, 0.0, 1.0), rel=1e-6)
    assert an.precision_cat_closed(n, 0.0, 0.0, 1.0) == pytest.approx(1 / n)
    assert an.precision_scs_closed(n, 0.0, 0.0, 1.0) == pytest.approx(1 / np.sqrt(n))


def test_ac_closed_signals_match_numerics():
    n = 10
    for kind, theta in (("SCS", None), ("GHZ", 0.0), ("CAT", np.pi / 8)):
        for chi in (0.0, CHI):
            # the cat forms carry no chi: the twist phase is even in m and drops out
            p = AcProtocolParams(n_particles=n, chi=chi, n_cycles=2, n_max=5).at_modulation(0.03)
            spec = kind if kind != "CAT" else f"CAT:{theta!r}"
            num = ac_signal(p, spec)
            ref = an.ac_closed_signals(kind, n, theta, 2, 5, p.phi, chi=chi, omega=p.omega_sig)
            assert num == pytest.approx(ref, abs=1e-10)


def test_ac_precisions():
    n, w, g = 16, 200 * np.pi, 20 * np.pi
    assert an.precision_ac_scs_closed(n, 3, 0.0, w, g) == pytest.approx(w / (4 * 3 * g * np.sqrt(n)))
    assert an.precision_ac_closed(n, 0.0, 3, 0.0, w, g) == pytest.approx(w / (4 * 3 * g * n))


def test_degenerate_slopes():
    with pytest.raises(DegenerateSlopeError):
        an.precision_scs_closed(10, 0.0, np.pi / 2, 1.0)
    flat = {"delta": np.array([-1.0, 0.0, 1.0]), "jz": np.zeros(3), "jz2": np.ones(3)}
    with pytest.raises(DegenerateSlopeError):
        an.precision_error_prop(flat, 0.0)
    assert np.isnan(an.precision_curve(flat)).all()


def test_error_prop_grid_contract():
    x = np.linspace(-1, 1, 5)
    t = {"delta": x, "jz": x, "jz2": 1 + x**2}
    assert an.precision_error_prop(t, 0.0) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        an.precision_error_prop(t, 0.1)
    with pytest.raises(DomainError):
        an.precision_error_prop(t, -1.0)
    with pytest.raises(DomainError):
        an.precision_error_prop(t, 0.0, stencil_h=0.3)
    np.testing.assert_allclose(an.precision_curve(t)[1:-1], 1.0)


# ---------------------------------------------------------------------- QFI


def test_qfi_examples():
    n = 12
    assert an.qfi_variance(spin_coherent(n, np.pi / 2), 1.0) == pytest.approx(n)
    assert an.qfi_variance(ghz(n), 1.0) == pytest.approx(n**2)
    assert an.qfi_variance(spin_coherent(n, 0.0), 2.0) == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 20), st.floats(0, np.pi), st.floats(0.1, 3), st.floats(0.2, 5))
def test_qfi_derivative_matches_variance(n, theta, t, g):
    psi = spin_coherent(n, theta, 0.4)
    a = an.qfi_variance(psi, t, g)
    b = an.qfi_derivative(psi, t, g, h=1e-4)
    assert b == pytest.approx(a, rel=1e-4, abs=1e-6)


@pytest.mark.parametrize("n", [2, 8, 20, 50, 100])
@pytest.mark.parametrize("kind", ["SCS", "GHZ", "CAT"])
def test_qfi_derivative_default_step(n, kind):
    psi = {"SCS": spin_coherent(n, np.pi / 2), "GHZ": ghz(n), "CAT": spin_cat(n, np.pi / 8)}[kind]
    fv = an.qfi_variance(psi, 1.0)
    assert abs(an.qfi_derivative(psi, 1.0) - fv) / fv <= 1e-6


def test_qfi_derivative_second_order():
    psi = spin_cat(10, 0.3)
    exact = an.qfi_variance(psi, 1.0)
    e1 = abs(an.qfi_derivative(psi, 1.0, h=1e-2) - exact)
    e2 = abs(an.qfi_derivative(psi, 1.0, h=5e-3) - exact)
    assert e1 / e2 == pytest.approx(4.0, rel=0.05)


def test_qcrb():
    assert an.qcrb(4.0) == pytest.approx(0.5)
    assert an.qcrb(4.0, nu=4) == pytest.approx(0.25)
    for bad in (0.0, -1.0, np.nan):
        with pytest.raises(DomainError):
            an.qcrb(bad)
    with pytest.raises(DomainError):
        an.qcrb(1.0, nu=1.5)


def _output_qfi(p, psi, d):
    return an.qfi_derivative(psi, p.T, 1.0, evolution=lambda b: dc_final_state(p, psi, d + b))


@pytest.mark.parametrize(
    "proto,kind",
    # GHZ under protocol I gives a flat signal, so it has no error-propagation precision
    [(p, k) for p in ("I", "II", "III") for k in ("SCS", "GHZ", "CAT") if (p, k) != ("I", "GHZ")],
)
def test_cramer_rao_ordering(proto, kind):
    n, h = 12, 1e-4
    psi = {"SCS": spin_coherent(n, np.pi / 2), "GHZ": ghz(n), "CAT": spin_cat(n, np.pi / 8)}[kind]
    p = DcProtocolParams(proto, n, CHI, CHI)
    for d0 in (0.0, 0.3):
        t = dc_spectrum(p, None, [d0 - h, d0, d0 + h], psi0=psi)
        prec = an.precision_error_prop(t, d0, stencil_h=h)
        bound = an.qcrb(_output_qfi(p, psi, d0))
        assert prec >= bound * (1 - 1e-6)


def test_interrogation_only_bound_is_not_a_bound_for_protocol_two():
    # the readout wait also accumulates delta, so the output state carries more
    # information than exp(-i delta T Jz)|psi> alone
    n, h = 12, 1e-4
    p = DcProtocolParams("II", n, CHI, CHI)
    d0 = 0.1
    t = dc_spectrum(p, "GHZ", [d0 - h, d0, d0 + h])
    prec = an.precision_error_prop(t, d0, stencil_h=h)
    assert prec < 0.5 * an.qcrb(an.qfi_variance(ghz(n), 1.0))
    assert prec >= an.qcrb(_output_qfi(p, ghz(n), d0)) * (1 - 1e-6)


# ------------------------------------------------------------------ scaling


def test_fit_exponent():
    ns = np.array([4, 8, 16, 32])
    assert an.fit_exponent(ns, 3 * ns**-0.5) == pytest.approx(-0.5)


@pytest.mark.parametrize(
    "kind,proto,chi,expected,tol",
    [("SCS", "I", 0.0, -0.5, 1e-6), ("GHZ", "III", CHI, -1.0, 1e-6), ("GHZ", "II", CHI, -1.0, 1e-6)],
)
def test_scaling_exponents(kind, proto, chi, expected, tol):
    pts, k = an.scaling_scan(kind, proto, [8, 12, 16, 20, 24], chi=chi)
    assert k == pytest.approx(expected, abs=tol)
    assert [q.n_particles for q in pts] == [8, 12, 16, 20, 24]
    for q in pts:
        assert q.precision >= q.qcrb * (1 - 1e-6)


def test_scaling_needs_five_points():
    with pytest.raises(DomainError):
        an.scaling_scan("GHZ", "III", [4, 6, 8, 10])


def test_jz2_moment_for_cat_input():
    # Var Jz of the cat input from the closed weights
    n, th = 20, np.pi / 8
    ms, s2 = an.cat_weights(n, th)
    psi = spin_cat(n, th)
    assert np.sum(ms**2 * s2) == pytest.approx(expectation(psi, collective_operator(n, "Jz2")), abs=1e-10)
