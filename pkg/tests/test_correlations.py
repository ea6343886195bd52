# tests/test_correlations.py
import numpy as np
import pytest
from scipy import integrate, stats

from rmt.errors import DomainError
from rmt.services.correlations import (
    ChiSquareSpec,
    CorrelationQuery,
    char_fn,
    chi_density,
    chi_quadrature,
    disintegration_rhs,
    fourier_rhs,
    gue_correlation,
    gue_correlation_complex_H,
    gue_pair_correlation,
    hse_correlation_inversion,
    hse_density_at,
    q_density,
    q_fourier,
    q_integral,
    sine_det,
)
from rmt.services.ensembles import RngStream, SpectrumSample, sample_spectra
from rmt.services.geometry import wigner_density
from rmt.services.kernels import kernel_diag


def test_one_point_correlation_is_kernel_diagonal():
    for x in (-1.0, 0.0, 0.4):
        assert gue_correlation(CorrelationQuery((x,), 4, 0.5)) == pytest.approx(kernel_diag(x, 4, 0.5).real, abs=1e-14)


def test_repeated_points_vanish():
    assert gue_correlation(CorrelationQuery((0.3, 0.3), 5)) == 0.0
    assert gue_correlation(CorrelationQuery((0.1, 0.3, 0.1), 5)) == 0.0


def test_correlation_order_bounds():
    with pytest.raises(DomainError):
        CorrelationQuery((0.1, 0.2, 0.3), 2)
    with pytest.raises(DomainError):
        CorrelationQuery((), 2)


def test_pair_correlation_symmetric_and_nonnegative(rng):
    x1 = rng.uniform(-3, 3, 50)
    x2 = rng.uniform(-3, 3, 50)
    r = gue_pair_correlation(x1, x2, 6)
    np.testing.assert_allclose(r, gue_pair_correlation(x2, x1, 6), atol=1e-13)
    assert np.all(r.real > -1e-12)
    assert gue_correlation(CorrelationQuery((x1[0], x2[0]), 6)) == pytest.approx(r[0].real, abs=1e-12)


def test_pair_correlation_integrates_to_n_times_n_minus_one():
    N = 2
    value, _ = integrate.dblquad(lambda y, x: gue_pair_correlation(x, y, N).real, -9, 9, -9, 9, epsabs=1e-7)
    assert value == pytest.approx(N * (N - 1), abs=1e-5)


def test_complex_H_pullback_matches_direct_scale():
    points = (0.2, -0.5)
    N = 6
    for H in (0.0, 0.4, -1.1):
        direct = gue_correlation(CorrelationQuery(points, N, 1.0 / ((1 + 1j * H) * N)))
        assert gue_correlation_complex_H(points, N, H) == pytest.approx(direct, abs=1e-12)


def test_chi_density_edge_values():
    assert chi_density(ChiSquareSpec(2, 0.25), 0.0) == pytest.approx(2.0)
    assert chi_density(ChiSquareSpec(4, 1.0), -1.0) == 0.0
    assert chi_density(ChiSquareSpec(1, 1.0), 0.0) == np.inf
    assert np.isinf(chi_density(ChiSquareSpec(1, 1.0), np.array([0.0, 1.0]))[0])
    with pytest.raises(DomainError):
        ChiSquareSpec(0, 1.0)


def test_chi_density_matches_scipy():
    u = np.linspace(0.1, 40, 50)
    for m, s in ((3, 1.0), (16, 0.5), (100, 0.01)):
        np.testing.assert_allclose(chi_density(ChiSquareSpec(m, s), u), stats.chi2.pdf(u / s, m) / s, rtol=1e-10, atol=1e-300)


def test_chi_density_complex_scale_mass():
    value, _ = integrate.quad(lambda u: chi_density(ChiSquareSpec(4, 1 + 0.5j), u).real, 0, np.inf)
    assert value == pytest.approx(1.0, abs=1e-8)


def test_char_fn():
    assert char_fn(4, 0.0) == pytest.approx(1.0)
    p = np.linspace(-20, 20, 81)
    assert np.all(np.abs(char_fn(3, p)) <= 1.0 + 1e-12)
    # E exp(ip (T - N)/sqrt2) with N T ~ chi2(N^2)
    N, q = 2, 0.7
    value, _ = integrate.quad(
        lambda t: np.cos(q * (t - N) / np.sqrt(2)) * stats.chi2.pdf(t * N, N * N) * N, 0, np.inf
    )
    assert char_fn(N, q).real == pytest.approx(value, abs=1e-8)


def test_sine_det():
    assert sine_det([0.0]) == 1.0
    assert sine_det([0.0, 0.0]) == 0.0
    assert sine_det([0.0, 1.0]) == pytest.approx(1.0)
    assert sine_det([0.0, 0.5]) == pytest.approx(1 - 4 / np.pi ** 2)
    assert 0.0 <= sine_det([0.0, 0.1, 0.25]) <= 1.0


def test_fourier_rhs_at_zero():
    assert fourier_rhs(0.0, (0.3,), 3) == pytest.approx(gue_correlation(CorrelationQuery((0.3,), 3, 1 / 3)), abs=1e-13)


def test_chi_quadrature_mass():
    for N, s in ((2, 0.5), (4, 0.25), (10, 0.1)):
        u, w = chi_quadrature(N, s)
        assert np.sum(w) == pytest.approx(1.0, abs=1e-10)
        assert np.sum(w * u) == pytest.approx(N * N * s, rel=1e-10)


def test_disintegration_tracks_gue_on_whole_grid(hse_oracle_n2):
    for x in np.arange(-3.0, 3.0 + 1e-9, 0.5):
        estimate = disintegration_rhs([x], 2, 0.5, hse_oracle_n2)
        exact = gue_correlation(CorrelationQuery((float(x),), 2, 0.5))
        assert estimate.std_error > 0
        assert abs(estimate.value - exact) < 4 * estimate.std_error + 1e-9, x


def test_disintegration_single_spectrum_closed_form():
    # two copies of the spectrum (-0.7, 0.7): only 0.7 lies on the side of x = 0.5
    spectra = SpectrumSample("hse", 2, 0.5, np.array([[-0.7, 0.7], [-0.7, 0.7]]))
    u_star = 0.5 * 4 * 0.25 / 0.49
    expected = chi_density(ChiSquareSpec(4, 0.5), u_star) * 2 * u_star / 0.5
    estimate = disintegration_rhs([0.5], 2, 0.5, spectra)
    assert estimate.value == pytest.approx(expected, rel=1e-12)
    assert estimate.std_error == 0.0
    assert disintegration_rhs([-0.5], 2, 0.5, spectra).value == pytest.approx(expected, rel=1e-12)


def test_disintegration_rejects_pairs_and_mismatched_oracle(hse_oracle_n2):
    with pytest.raises(DomainError):
        disintegration_rhs([0.0, 0.1], 2, 0.5, hse_oracle_n2)
    with pytest.raises(DomainError):
        disintegration_rhs([0.0], 3, 0.5, hse_oracle_n2)
    gue = sample_spectra(2, 0.5, 10, RngStream(3), ensemble="gue")
    with pytest.raises(DomainError):
        disintegration_rhs([0.5], 2, 0.5, gue)


def test_q_integral_and_fourier_mass(hse_oracle_n2):
    for x in (0.0, 0.2):
        exact = gue_correlation(CorrelationQuery((x,), 2, 0.5))
        mass = q_integral([x], 2, hse_oracle_n2)
        assert abs(mass.value - exact) < 4 * mass.std_error
        at_zero = q_fourier(0.0, [x], 2, hse_oracle_n2)
        assert abs(at_zero.value - mass.value) < 1e-12


def test_q_fourier_tracks_rhs(hse_oracle_n2):
    for x in (0.0, 0.2):
        for p in (0.5, 1.0, 2.0):
            estimate = q_fourier(p, [x], 2, hse_oracle_n2)
            assert abs(estimate.value - fourier_rhs(p, (x,), 2)) < 4 * estimate.std_error


def test_q_density_nonnegative(hse_oracle_n2):
    values = q_density([-10.0, -0.5, 0.0, 0.5], [0.1], 2, hse_oracle_n2)
    assert values[0].value == 0.0
    assert all(m.value >= 0 for m in values)


def test_hse_inversion_domain():
    with pytest.raises(DomainError):
        hse_correlation_inversion([0.0], 2)
    with pytest.raises(DomainError):
        hse_correlation_inversion([0.0, 0.1, 0.2], 3)


def test_hse_density_at_counts_window():
    spectra = SpectrumSample("hse", 2, 0.5, np.array([[-0.5, 0.001], [0.2, 0.9], [-0.002, 0.7]]))
    h = 2 * np.sqrt(0.5) * 2 / 100
    reading = hse_density_at(0.0, 2, spectra, bins=100)
    assert reading.value == pytest.approx((2 / 3) / h, rel=1e-12)
    with pytest.raises(DomainError):
        hse_density_at(0.0, 2, spectra, bins=0)


@pytest.mark.slow
def test_hse_inversion_matches_monte_carlo():
    N = 3
    spectra = sample_spectra(N, 1 / N, 60000, RngStream(11))
    for x in (0.0, 0.5):
        inverted = hse_correlation_inversion([x], N)
        estimate = hse_density_at(x, N, spectra)
        assert abs(inverted - estimate.value) < 5 * estimate.std_error


def test_correlation_examples():
    assert gue_correlation(CorrelationQuery((0.0,), 1, 1.0)) == pytest.approx(0.398942, abs=1e-6)
    assert chi_density(ChiSquareSpec(2, 1.0), 2.0) == pytest.approx(np.exp(-1) / 2, abs=1e-14)
    assert chi_density(ChiSquareSpec(2, 1.0), 0.0) == pytest.approx(0.5)
    assert abs(char_fn(3, 3 / np.sqrt(2))) == pytest.approx(2 ** -2.25, rel=1e-12)
    mean, _ = integrate.quad(lambda u: u * chi_density(ChiSquareSpec(9, 1.0), u), 0, np.inf)
    assert mean == pytest.approx(9.0, abs=1e-6)


def test_char_fn_is_transform_of_shifted_chi_square():
    N = 4
    density = lambda v: np.sqrt(2) * chi_density(ChiSquareSpec(N * N, 1 / N), N + v * np.sqrt(2))  # noqa: E731
    start = -N / np.sqrt(2)
    for p in (0.5, 2.0):
        re, _ = integrate.quad(lambda v: np.cos(p * v) * density(v), start, np.inf, limit=200)
        im, _ = integrate.quad(lambda v: np.sin(p * v) * density(v), start, np.inf, limit=200)
        assert abs(complex(re, im) - char_fn(N, p)) < 1e-4


def test_correlation_is_permutation_invariant():
    from itertools import permutations

    points = (0.3, -0.8, 1.1)
    for s in (0.5, 0.2 + 0.1j):
        reference = gue_correlation(CorrelationQuery(points, 6, s))
        for order in permutations(points):
            assert gue_correlation(CorrelationQuery(order, 6, s)) == pytest.approx(reference, rel=1e-12, abs=1e-15)


def test_complex_H_conjugation():
    points = (0.2, -0.5)
    for H in (0.3, 2.0, 4.5):
        up = gue_correlation_complex_H(points, 6, H)
        down = gue_correlation_complex_H(points, 6, -H)
        assert down == pytest.approx(np.conj(up), rel=1e-10)
    assert gue_correlation_complex_H(points, 6, 0.0) == pytest.approx(gue_correlation(CorrelationQuery(points, 6, 1 / 6)), abs=1e-14)


def test_fourier_rhs_conjugation():
    for p in (0.5, 3.0, 12.0):
        assert fourier_rhs(-p, (0.2,), 3) == pytest.approx(np.conj(fourier_rhs(p, (0.2,), 3)), rel=1e-10)


def test_fourier_rhs_decays():
    magnitudes = [abs(fourier_rhs(p, (0.0,), 3)) for p in (5.0, 10.0, 20.0, 40.0)]
    assert all(a > b for a, b in zip(magnitudes, magnitudes[1:]))
    assert abs(fourier_rhs(40.0, (0.0,), 3)) < 1e-4
    assert abs(fourier_rhs(-40.0, (0.0,), 3)) < 1e-4


def test_correlation_scale_covariance(rng):
    points = np.array([0.1, -0.4])
    s = 0.3
    for sigma in rng.uniform(0.2, 3.0, 5):
        scaled = sigma ** -1.0 * gue_correlation(CorrelationQuery(tuple(points / np.sqrt(sigma)), 5, s))
        direct = gue_correlation(CorrelationQuery(tuple(points), 5, sigma * s))
        assert scaled == pytest.approx(direct, rel=1e-10)


def test_semicircle_from_kernels():
    N = 400
    x = np.linspace(-1.5, 1.5, 31)
    density = kernel_diag(x, N, 1.0 / N).real / N
    np.testing.assert_allclose(density, wigner_density(x), atol=0.01)
