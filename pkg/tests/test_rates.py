import numpy as np
import pytest
from scipy.special import exp1, expi

from nmqsim.baths import BathSpectrum
from nmqsim.errors import DomainError
from nmqsim.oracle import pv_lamb_shift_reference
from nmqsim.rates import (
    build_rate_table,
    canonical_rates,
    decoherence_matrix,
    gamma_pm,
    lamb_shift,
    markovian_limits,
    rate_integral_parts,
)

OHMIC5 = BathSpectrum.ohmic(R=1.0, omega_c=5.0)
F95 = BathSpectrum.one_over_f(A=1.0, alpha=0.95)


def lamb_m_ohmic_closed(R, omega_c, wq=1.0):
    # (R wq / pi) [e^-x Ei(x) - e^x E1(x)], x = wq/omega_c
    x = wq / omega_c
    return (R * wq / np.pi) * (np.exp(-x) * expi(x) - np.exp(x) * exp1(x))


def test_rates_vanish_at_zero():
    assert gamma_pm(OHMIC5, 1.0, 0.0) == (0.0, 0.0)
    assert lamb_shift(OHMIC5, 1.0, 0.0) == 0.0


def test_rates_match_direct_quadrature():
    # oracle: scipy quad of the defining tau integrals
    from scipy.integrate import quad
    from nmqsim.baths import kernel_transforms

    for t in (0.5, 2.0, 10.0):
        qc, _ = quad(lambda u: np.cos(u) * kernel_transforms(OHMIC5, u)[0], 0, t, limit=300)
        qs, _ = quad(lambda u: np.sin(u) * kernel_transforms(OHMIC5, u)[1], 0, t, limit=300)
        ql, _ = quad(lambda u: np.sin(u) * kernel_transforms(OHMIC5, u)[0], 0, t, limit=300)
        gp, gm = gamma_pm(OHMIC5, 1.0, t)
        assert gp == pytest.approx((2 / np.pi) * (qc + qs), rel=1e-10)
        assert gm == pytest.approx((2 / np.pi) * (qc - qs), rel=1e-8, abs=1e-12)
        assert lamb_shift(OHMIC5, 1.0, t) == pytest.approx((2 / np.pi) * ql, rel=1e-10)


def test_plus_minus_swap_under_sine_sign_flip():
    # gamma_pm = cos_part +- sin_part, so flipping the sine term swaps them
    c, s, _ = rate_integral_parts(OHMIC5, 1.0, 3.0)
    gp, gm = gamma_pm(OHMIC5, 1.0, 3.0)
    assert gp == pytest.approx(c + s, rel=1e-14)
    assert gm == pytest.approx(c - s, rel=1e-14)
    assert (c - s, c + s) == (gm, gp)


def test_canonical_rates_arithmetic():
    g1, g2 = canonical_rates(1.0, 1.0, 0.0)
    assert g1 == pytest.approx(2.0) and g2 == pytest.approx(0.0, abs=1e-15)
    g1, g2 = canonical_rates(1.0, 0.0, 0.0)
    assert g1 == pytest.approx(1.2071067811865475)
    assert g2 == pytest.approx(-0.20710678118654757)


def test_canonical_rates_match_decoherence_eigenvalues():
    rng = np.random.default_rng(1)
    for _ in range(50):
        gp, gm, wl = rng.normal(size=3)
        d = decoherence_matrix(gp, gm, wl)
        assert np.abs(d - d.conj().T).max() == 0.0
        assert np.trace(d).real == pytest.approx(gp + gm, rel=1e-14)
        ev = np.linalg.eigvalsh(d)
        g1, g2 = canonical_rates(gp, gm, wl)
        assert ev[1] == pytest.approx(g1, rel=1e-12, abs=1e-12)
        assert ev[0] == pytest.approx(g2, rel=1e-12, abs=1e-12)


def test_markovian_limits_values():
    gp_m, gm_m, lamb_m = markovian_limits(OHMIC5, 1.0)
    assert gm_m == 0.0  # zero temperature
    assert gp_m == pytest.approx(2.0 * np.exp(-0.2), rel=1e-14)
    assert lamb_m == pytest.approx(lamb_m_ohmic_closed(1.0, 5.0), rel=1e-6)

    gp_m, gm_m, lamb_m = markovian_limits(F95, 1.0)
    assert gm_m == pytest.approx(0.0, abs=1e-14)
    assert gp_m == pytest.approx(2.0, rel=1e-14)
    assert lamb_m == pytest.approx(np.tan(np.pi * 0.475), rel=1e-6)


def test_markovian_lamb_shift_vs_pv_oracle():
    # independent principal-value quadrature (symmetric-difference form)
    _, _, lamb_m = markovian_limits(OHMIC5, 1.0)
    ref = pv_lamb_shift_reference(OHMIC5, 1.0)
    assert abs(lamb_m / ref - 1.0) < 1e-4


def test_build_rate_table_zero_row_and_interpolation():
    rt = build_rate_table(OHMIC5, 1.0, 1e-6, 2)
    assert rt.gamma_plus[0] == 0.0 and rt.gamma_minus[0] == 0.0 and rt.lamb[0] == 0.0
    rt = build_rate_table(OHMIC5, 1.0, 10.0, 101)
    gp, gm, wl = rt.interp(rt.t)
    assert np.array_equal(gp, rt.gamma_plus)
    assert np.array_equal(gm, rt.gamma_minus)
    assert np.array_equal(wl, rt.lamb)
    with pytest.raises(DomainError):
        rt.interp(11.0)


def test_build_rate_table_validation():
    with pytest.raises(DomainError):
        build_rate_table(OHMIC5, 1.0, 0.0, 10)
    with pytest.raises(DomainError):
        build_rate_table(OHMIC5, 1.0, 1.0, 1)


def test_rate_table_matches_single_shot_values():
    rt = build_rate_table(OHMIC5, 1.0, 20.0, 401)
    for i in (40, 200, 400):
        gp, gm = gamma_pm(OHMIC5, 1.0, rt.t[i])
        assert rt.gamma_plus[i] == pytest.approx(gp, rel=1e-10)
        assert rt.gamma_minus[i] == pytest.approx(gm, rel=1e-8, abs=1e-12)


@pytest.mark.parametrize("spec", [OHMIC5, F95], ids=["ohmic", "one_over_f"])
def test_canonical_identities_along_table(spec):
    rt = build_rate_table(spec, 1.0, 40.0, 801)
    g1, g2 = rt.canonical()
    # trace identity
    assert np.abs((g1 + g2) - (rt.gamma_plus + rt.gamma_minus)).max() < 1e-12
    # determinant identity: g1 g2 = gp gm - ((gp+gm)^2/4 + lamb^2)
    det = rt.gamma_plus * rt.gamma_minus - (
        0.25 * (rt.gamma_plus + rt.gamma_minus) ** 2 + rt.lamb**2
    )
    assert np.abs(g1 * g2 - det).max() < 1e-10
    # one canonical rate is never positive
    assert np.all(g2 <= 0.0)
    assert np.all(g2[1:] < 0.0)


def test_ohmic_rates_converge_to_markovian_limits():
    rt = build_rate_table(OHMIC5, 1.0, 60.0, 1201)
    gp_m, gm_m, lamb_m = markovian_limits(OHMIC5, 1.0)
    sel = rt.t >= 50.0
    assert np.abs(rt.gamma_plus[sel] - gp_m).max() < 1e-3 * gp_m
    assert np.abs(rt.gamma_minus[sel] - gm_m).max() < 1e-3 * gp_m
    assert np.abs(rt.lamb[sel] - lamb_m).max() < 1e-3 * gp_m


def test_delta_correlated_bath_gives_constant_symmetric_rates():
    # white spectrum: C ~ delta(tau), S ~ 0 -> gamma_+ = gamma_- = const, no shift
    from nmqsim.propagator import constant_rate_table

    rt = constant_rate_table(0.8, 0.8, 0.0, 1.0, 10.0)
    g1, g2 = rt.canonical()
    assert np.all(g2 == 0.0)  # the canonical-rate condition for a memoryless bath
    assert np.all(g1 == pytest.approx(1.6))
