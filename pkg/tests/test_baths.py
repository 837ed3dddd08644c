import numpy as np
import pytest
from scipy.integrate import quad

from nmqsim.baths import (
    BathSpectrum,
    impedance_to_spectral_density,
    kernel_samples,
    kernel_transforms,
    spectral_density,
    symmetrized_psd,
)
from nmqsim.errors import DomainError, NumericalError


def test_ohmic_spectral_density_values():
    spec = BathSpectrum.ohmic(R=1.0, omega_c=5.0)
    assert spectral_density(spec, 0.0) == 0.0
    assert spectral_density(spec, 5.0) == pytest.approx(5.0 * np.exp(-1.0), rel=1e-15)


def test_one_over_f_spectral_density_values():
    spec = BathSpectrum.one_over_f(A=1.0, alpha=0.95)
    assert spectral_density(spec, 1.0) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(DomainError):
        spectral_density(spec, 0.0)


def test_spectral_density_rejects_negative_frequency():
    spec = BathSpectrum.ohmic(R=1.0, omega_c=5.0)
    with pytest.raises(DomainError):
        spectral_density(spec, -0.1)


def test_constructor_validation():
    with pytest.raises(DomainError):
        BathSpectrum.ohmic(R=1.0, omega_c=0.0)
    with pytest.raises(DomainError):
        BathSpectrum.ohmic(R=-1.0, omega_c=5.0)
    with pytest.raises(DomainError):
        BathSpectrum.one_over_f(A=1.0, alpha=1.0)
    with pytest.raises(DomainError):
        BathSpectrum.one_over_f(A=1.0, alpha=0.0)
    # finite temperature needs an infrared cutoff (coth/w^alpha diverges)
    with pytest.raises(DomainError):
        BathSpectrum.one_over_f(A=1.0, alpha=0.5, beta=10.0)
    BathSpectrum.one_over_f(A=1.0, alpha=0.5, beta=10.0, omega_ir=1e-3)


def test_symmetrized_psd_zero_temperature_equals_j():
    # at beta = inf the symmetrized spectrum reduces to J on any grid
    for spec in (
        BathSpectrum.ohmic(R=0.7, omega_c=5.0),
        BathSpectrum.one_over_f(A=1.3, alpha=0.8),
    ):
        w = np.geomspace(1e-3, 50.0, 40)
        assert np.array_equal(symmetrized_psd(spec, w), spectral_density(spec, w))


def test_symmetrized_psd_values_and_classical_limit():
    spec = BathSpectrum.ohmic(R=1.0, omega_c=5.0)
    assert symmetrized_psd(spec, 5.0) == pytest.approx(5.0 * np.exp(-1.0), rel=1e-15)
    # coth(x) -> 1/x for small argument: Sbar -> (2/(beta w)) J
    warm = BathSpectrum.ohmic(R=1.0, omega_c=5.0, beta=2.0)
    w = 1e-6
    expect = (2.0 / (2.0 * w)) * spectral_density(warm, w)
    assert symmetrized_psd(warm, w) == pytest.approx(expect, rel=1e-6)
    with pytest.raises(DomainError):
        symmetrized_psd(spec, 0.0)


# -- kernel transforms ---------------------------------------------------


def test_ohmic_kernels_at_zero():
    spec = BathSpectrum.ohmic(R=1.0, omega_c=5.0)
    c, s = kernel_transforms(spec, 0.0)
    # oracle: adaptive quadrature of int R w e^{-w/wc} dw = R wc^2
    ref, _ = quad(lambda w: w * np.exp(-w / 5.0), 0, np.inf)
    assert ref == pytest.approx(25.0, rel=1e-12)
    assert c == pytest.approx(25.0, rel=1e-14)
    assert s == 0.0


def test_ohmic_kernels_frozen_quadrature_values():
    # frozen scipy QAGS+QAWF references (independent of the closed form)
    spec = BathSpectrum.ohmic(R=1.0, omega_c=5.0)
    c, s = kernel_transforms(spec, 0.37)
    assert c == pytest.approx(-3.0964788019023652, rel=1e-10)
    assert s == pytest.approx(4.729400027673382, rel=1e-10)
    c, s = kernel_transforms(spec, 3.0)
    assert c == pytest.approx(-0.10964053567232965, rel=1e-10)
    assert s == pytest.approx(0.014684000313259692, rel=1e-8)


def test_one_over_f_kernels_frozen_regularized_values():
    # frozen exponentially regularized quadrature, Richardson-extrapolated
    # to zero regulator (oracle._scipy_fourier)
    spec = BathSpectrum.one_over_f(A=1.0, alpha=0.95)
    c, s = kernel_transforms(spec, 2.0)
    assert c == pytest.approx(18.748888987392345, rel=5e-7)
    assert s == pytest.approx(1.4755695465269207, rel=5e-7)


def test_one_over_f_kernel_rejects_tau_zero():
    spec = BathSpectrum.one_over_f(A=1.0, alpha=0.95)
    with pytest.raises(DomainError):
        kernel_transforms(spec, 0.0)


def test_closed_form_vs_quadrature_agreement():
    # spec invariant: rel. 1e-6 on tau in [1e-3, 50]
    taus = np.geomspace(1e-3, 50.0, 15)
    ohmic = BathSpectrum.ohmic(R=1.0, omega_c=5.0)
    for tau in taus:
        cc, sc = kernel_transforms(ohmic, tau)
        cq, sq = kernel_transforms(ohmic, tau, method="quadrature")
        assert abs(cq - cc) <= 1e-6 * max(abs(cc), 1e-9)
        assert abs(sq - sc) <= 1e-6 * max(abs(sc), 1e-9)
    f_spec = BathSpectrum.one_over_f(A=1.0, alpha=0.95)
    for tau in taus:
        cc, sc = kernel_transforms(f_spec, tau)
        cq, sq = kernel_transforms(f_spec, tau, method="quadrature")
        assert abs(cq / cc - 1) < 1e-6
        assert abs(sq / sc - 1) < 1e-6


def test_sine_kernel_nonnegative():
    taus = np.geomspace(1e-3, 50.0, 60)
    for spec in (
        BathSpectrum.ohmic(R=1.0, omega_c=5.0),
        BathSpectrum.one_over_f(A=1.0, alpha=0.95),
    ):
        _, s = kernel_transforms(spec, taus)
        assert np.all(s >= 0.0)


def test_kernel_samples_records_method():
    spec = BathSpectrum.ohmic(R=1.0, omega_c=5.0)
    ks = kernel_samples(spec, np.linspace(0.0, 2.0, 5))
    assert ks.method == "closed-form"
    assert ks.S[0] == 0.0
    assert np.isrealobj(ks.C) and np.isrealobj(ks.S)
    warm = BathSpectrum.ohmic(R=1.0, omega_c=5.0, beta=3.0)
    ks2 = kernel_samples(warm, np.linspace(0.0, 1.0, 3))
    assert ks2.method == "quadrature"


# -- impedance-derived spectra -------------------------------------------


def test_impedance_zero_and_lossless():
    assert impedance_to_spectral_density(lambda w: 0.0, 1.0, 1.0, 1.0, 3.0) == 0.0
    # a lossless inductor gives a purely real expression off resonance
    L = 0.2
    val = impedance_to_spectral_density(lambda w: 1j * w * L, 1.0, 1.0, 1.0, 0.7)
    assert val == pytest.approx(0.0, abs=1e-15)


def test_impedance_resistor_matches_rational_form():
    R = 2.0
    C_e, C_J, C_g = 0.5, 1.5, 0.25
    ct = C_e + C_e**2 / (C_J + C_e + C_g)
    for w in np.linspace(0.0, 10.0, 41):
        val = impedance_to_spectral_density(lambda _w: R, C_e, C_J, C_g, w)
        expect = w * R / (1.0 + (w * ct * R) ** 2)
        assert abs(val - expect) < 1e-12
    # small-frequency limit reduces to the Ohmic form w R
    w = 1e-8
    val = impedance_to_spectral_density(lambda _w: R, C_e, C_J, C_g, w)
    assert val == pytest.approx(w * R, rel=1e-10)


def test_impedance_resonant_pole_raises():
    C_e, C_J, C_g = 1.0, 1.0, 1.0
    ct = C_e + C_e**2 / (C_J + C_e + C_g)
    w0 = 2.0
    # choose Z so that 1 + i w ct Z = 0 exactly at w0
    z_res = 1j / (w0 * ct)
    with pytest.raises(NumericalError):
        impedance_to_spectral_density(lambda w: z_res, C_e, C_J, C_g, w0)


def test_impedance_derived_spectrum_object():
    spec = BathSpectrum.from_impedance(lambda w: 1.0, C_e=0.3, C_J=1.0, C_g=0.2)
    w = np.linspace(0.0, 4.0, 9)
    j = spectral_density(spec, w)
    assert np.all(j >= 0.0)
    c, s = kernel_transforms(spec, 0.5)
    assert np.isfinite(c) and np.isfinite(s)


# -- tabulated spectra ----------------------------------------------------


def test_tabulated_matches_ohmic_within_interpolation():
    ohmic = BathSpectrum.ohmic(R=1.0, omega_c=5.0)
    grid = np.geomspace(1e-4, 60.0, 3000)
    tab = BathSpectrum.tabulated(grid, spectral_density(ohmic, grid))
    w = np.geomspace(1e-3, 40.0, 50)
    assert np.abs(
        spectral_density(tab, w) - spectral_density(ohmic, w)
    ).max() < 1e-5 * spectral_density(ohmic, 1.0)
    # kernels agree with the closed form within the interpolation error bound
    for tau in (0.1, 1.0, 5.0):
        ct, st = kernel_transforms(tab, tau)
        cc, sc = kernel_transforms(ohmic, tau)
        scale = max(abs(cc), abs(sc))
        assert abs(ct - cc) / scale < 5e-3
        assert abs(st - sc) / scale < 5e-3


def test_tabulated_zero_outside_support():
    tab = BathSpectrum.tabulated([1.0, 2.0, 4.0], [1.0, 2.0, 1.0])
    assert spectral_density(tab, 0.5) == 0.0
    assert spectral_density(tab, 8.0) == 0.0
    assert spectral_density(tab, 2.0) == pytest.approx(2.0)


def test_tabulated_csv_roundtrip(tmp_path):
    path = tmp_path / "spec.csv"
    path.write_text("omega,J\n0.5,0.25\n1.0,1.0\n2.0,0.5\n")
    tab = BathSpectrum.tabulated_from_csv(path)
    assert spectral_density(tab, 1.0) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        BathSpectrum.tabulated([2.0, 1.0], [1.0, 1.0])
