# tests/test_ensembles.py
import numpy as np
import pytest
from scipy import integrate, stats

from rmt.errors import DomainError, MetadataMismatchError
from rmt.services.correlations import sine_det
from rmt.services.ensembles import (
    CorrelationEstimate,
    HermitianMatrix,
    RngStream,
    block_plan,
    bulk_coordinates,
    eigenvalues,
    empty_like,
    estimate_density,
    estimate_pair_correlation,
    gue_sample,
    gue_stack,
    hse_sample,
    hse_stack,
    merge_estimates,
    merge_spectra,
    pair_counts,
    sample_spectra,
    stack_eigenvalues,
)
from rmt.services.geometry import wigner_density
from rmt.services.kernels import kernel_diag


def test_streams_are_reproducible():
    a = RngStream(42, 3).generator.standard_normal(5)
    b = RngStream(42, 3).generator.standard_normal(5)
    c = RngStream(42, 4).generator.standard_normal(5)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c)
    with pytest.raises(DomainError):
        RngStream(-1)


def test_gue_stack_is_hermitian_with_expected_variance():
    stack = gue_stack(6, 0.5, 4000, RngStream(1))
    np.testing.assert_allclose(stack, np.conj(np.swapaxes(stack, 1, 2)))
    assert np.var(stack[:, 0, 0].real) == pytest.approx(0.5, rel=0.1)
    assert np.var(stack[:, 0, 1].real) == pytest.approx(0.25, rel=0.1)
    assert np.mean(np.sum(np.abs(stack) ** 2, axis=(1, 2))) == pytest.approx(36 * 0.5, rel=0.05)


def test_hse_stack_lies_on_sphere():
    stack = hse_stack(5, 0.3, 50, RngStream(2))
    np.testing.assert_allclose(np.sum(np.abs(stack) ** 2, axis=(1, 2)), 0.3 * 25, rtol=1e-12)


def test_hermitian_matrix_round_trip():
    m = gue_sample(4, 1.0, RngStream(5))
    again = HermitianMatrix.from_dense(m.dense())
    np.testing.assert_allclose(again.dense(), m.dense())
    assert m.trace == pytest.approx(np.trace(m.dense()).real)
    assert m.hs_norm_sq == pytest.approx(np.sum(np.abs(m.dense()) ** 2))
    with pytest.raises(DomainError):
        HermitianMatrix.from_dense([[0, 1], [2, 0]])


def test_eigenvalues_sorted_and_invariant():
    m = hse_sample(7, 1 / 7, RngStream(9))
    spectrum = eigenvalues(m)
    assert len(spectrum) == 7
    assert list(spectrum.values) == sorted(spectrum.values)
    assert sum(v * v for v in spectrum.values) == pytest.approx(7.0, rel=1e-12)
    values = stack_eigenvalues(gue_stack(3, 1.0, 10, RngStream(4)))
    assert np.all(np.diff(values, axis=1) >= 0)


def test_density_estimate_mass_and_merge():
    grid = (-3.0, 3.0, 30)
    first = estimate_density(20, 1 / 20, 100, grid, RngStream(8, 0))
    second = estimate_density(20, 1 / 20, 150, grid, RngStream(8, 1))
    assert first.outside == 0
    assert first.mass() == pytest.approx(1.0, abs=1e-12)
    merged = merge_estimates(first, second)
    assert merged.samples == 250
    np.testing.assert_array_equal(merged.counts, first.counts + second.counts)
    assert merge_estimates(empty_like(first), first).counts.tolist() == first.counts.tolist()
    other = estimate_density(20, 1 / 20, 10, (-3.0, 3.0, 31), RngStream(8, 2))
    with pytest.raises(MetadataMismatchError):
        merge_estimates(first, other)


def test_density_estimate_counts_outside():
    estimate = estimate_density(10, 1 / 10, 20, (-0.5, 0.5, 4), RngStream(3))
    assert estimate.outside > 0
    assert estimate.mass() < 1.0


def test_std_errors_need_two_samples():
    one = estimate_density(5, 0.2, 1, (-3.0, 3.0, 6), RngStream(1))
    assert np.all(np.isnan(one.std_errors()))
    many = estimate_density(5, 0.2, 50, (-3.0, 3.0, 6), RngStream(1))
    assert np.all(many.std_errors() >= 0)


def test_density_estimate_follows_semicircle():
    N = 80
    estimate = estimate_density(N, 1 / N, 200, (-2.2, 2.2, 22), RngStream(12))
    target = wigner_density(estimate.centers)
    assert np.sum(np.abs(estimate.values() - target)) * estimate.width < 0.1


def test_pair_counts_example():
    counts = pair_counts(np.array([0.0, 0.5]), 1.0, 4)
    assert counts.tolist() == [0, 1, 0, 1]


def test_pair_counts_edge_correction():
    # |xi_i| must leave room for tau inside the window
    counts = pair_counts(np.array([0.9, -0.9]), 1.0, 4)
    assert counts.sum() == 0


def test_pair_correlation_metadata():
    estimate = estimate_pair_correlation(30, 1 / 30, 0.0, 2.0, 8, 20, RngStream(6))
    assert isinstance(estimate, CorrelationEstimate)
    assert estimate.order == 2
    assert estimate.rescaling == (0.0, 2.0)
    assert np.all(estimate.values() >= 0)
    with pytest.raises(DomainError):
        estimate_pair_correlation(30, 1 / 30, 2.5, 2.0, 8, 20, RngStream(6))


@pytest.mark.slow
@pytest.mark.parametrize("ensemble", ["gue", "hse"])
def test_pair_correlation_approaches_sine_limit(ensemble):
    N = 100
    estimate = estimate_pair_correlation(N, 1 / N, 0.0, 3.0, 24, 2000, RngStream(21), ensemble=ensemble)
    target = np.array([sine_det([0.0, t]) for t in estimate.centers])
    assert np.max(np.abs(estimate.values() - target)) < 0.1


def test_block_plan():
    assert block_plan(5, 2) == [(0, 2), (1, 2), (2, 1)]
    assert block_plan(0, 3) == []
    assert sum(size for _, size in block_plan(1001, 250)) == 1001
    with pytest.raises(DomainError):
        block_plan(10, 0)


@pytest.mark.parametrize(
    "dense,expected",
    [
        ([[0, 1], [1, 0]], (-1.0, 1.0)),
        ([[2]], (2.0,)),
        ([[1, 1j], [-1j, 1]], (0.0, 2.0)),
    ],
)
def test_eigenvalue_examples(dense, expected):
    spectrum = eigenvalues(HermitianMatrix.from_dense(dense))
    assert spectrum.values == pytest.approx(expected, abs=1e-12)


def test_gue_mean_hs_norm():
    stack = gue_stack(4, 1.0, 10000, RngStream(31))
    hs = np.sum(np.abs(stack) ** 2, axis=(1, 2))
    assert abs(hs.mean() - 16.0) < 3 * hs.std(ddof=1) / np.sqrt(hs.size)


def test_hse_one_by_one_is_a_sign():
    values = hse_stack(1, 1.0, 10000, RngStream(32))[:, 0, 0].real
    np.testing.assert_allclose(np.abs(values), 1.0, rtol=1e-12)
    assert abs(np.mean(values > 0) - 0.5) < 4 * 0.005


def test_merge_is_commutative_and_associative():
    grid = (-3.0, 3.0, 12)
    a, b, c = (estimate_density(6, 1 / 6, 20, grid, RngStream(40, k)) for k in range(3))
    assert merge_estimates(a, b).counts.tolist() == merge_estimates(b, a).counts.tolist()
    left = merge_estimates(merge_estimates(a, b), c)
    right = merge_estimates(a, merge_estimates(b, c))
    assert left.counts.tolist() == right.counts.tolist()
    assert left.sumsq.tolist() == right.sumsq.tolist()
    assert left.samples == right.samples == 60


def test_spectra_sample_and_merge():
    first = sample_spectra(4, 0.25, 70, RngStream(50, 0))
    second = sample_spectra(4, 0.25, 30, RngStream(50, 1))
    assert first.samples == 70 and first.values.shape == (70, 4)
    assert first.support == pytest.approx(2.0)
    np.testing.assert_allclose((first.values ** 2).sum(axis=1), 4.0, rtol=1e-12)
    assert np.all(np.diff(first.values, axis=1) >= 0)
    merged = merge_spectra(first, second)
    assert merged.samples == 100
    np.testing.assert_array_equal(merged.values[70:], second.values)
    with pytest.raises(MetadataMismatchError):
        merge_spectra(first, sample_spectra(4, 0.5, 5, RngStream(50, 2)))
    with pytest.raises(DomainError):
        sample_spectra(4, 0.25, 0, RngStream(50))


def test_estimators_ignore_eigenvalue_order(rng):
    values = stack_eigenvalues(gue_stack(40, 1 / 40, 1, RngStream(64)))[0]
    xi = bulk_coordinates(values, 40, 1 / 40, 0.0)
    reference = pair_counts(xi, 2.0, 8)
    for _ in range(5):
        assert pair_counts(rng.permutation(xi), 2.0, 8).tolist() == reference.tolist()
    stack = gue_stack(6, 1.0, 20, RngStream(65))
    order = rng.permutation(6)
    shuffled = stack[:, order][:, :, order]
    np.testing.assert_allclose(stack_eigenvalues(shuffled), stack_eigenvalues(stack), atol=1e-12)


@pytest.mark.slow
def test_one_by_one_gue_is_standard_normal():
    values = gue_stack(1, 1.0, 10000, RngStream(60))[:, 0, 0].real
    assert stats.kstest(values, "norm").pvalue > 1e-3


@pytest.mark.slow
def test_gue_law_is_unitarily_invariant():
    g = np.random.default_rng(5)
    q, r = np.linalg.qr(g.standard_normal((4, 4)) + 1j * g.standard_normal((4, 4)))
    unitary = q * (np.diag(r) / np.abs(np.diag(r)))
    rotated = unitary @ gue_stack(4, 1.0, 10000, RngStream(63, 0)) @ unitary.conj().T
    fresh = gue_stack(4, 1.0, 10000, RngStream(63, 1))
    assert stats.ks_2samp(rotated[:, 0, 0].real, fresh[:, 0, 0].real).pvalue > 1e-3
    assert stats.ks_2samp(rotated[:, 0, 1].imag, fresh[:, 0, 1].imag).pvalue > 1e-3
    assert stats.ks_2samp(stack_eigenvalues(rotated)[:, -1], stack_eigenvalues(fresh)[:, -1]).pvalue > 1e-3


@pytest.mark.slow
def test_sphere_projection_is_independent_of_norm():
    S = 10000
    x = gue_stack(4, 1.0, S, RngStream(61))
    y = hse_stack(4, 1.0, S, RngStream(61))
    norm_sq = np.sum(np.abs(x) ** 2, axis=(1, 2))
    np.testing.assert_allclose(y, 4 * x / np.sqrt(norm_sq)[:, None, None], rtol=1e-12, atol=1e-14)
    largest = stack_eigenvalues(y)[:, -1]
    assert abs(np.corrcoef(norm_sq, largest)[0, 1]) < 4 / np.sqrt(S)


@pytest.mark.slow
def test_density_estimate_fits_kernel_density():
    N, S = 20, 10000
    estimate = estimate_density(N, 1 / N, S, (-2.4, 2.4, 24), RngStream(62))
    density = lambda x: float(np.real(kernel_diag(x, N, 1 / N))) / N  # noqa: E731
    edges = estimate.edges
    probabilities = [integrate.quad(density, a, b)[0] for a, b in zip(edges[:-1], edges[1:])]
    tails = integrate.quad(density, -np.inf, edges[0])[0] + integrate.quad(density, edges[-1], np.inf)[0]
    probabilities = np.array(probabilities + [tails])
    observed = np.append(estimate.counts, estimate.outside)
    expected = observed.sum() * probabilities / probabilities.sum()
    assert stats.chisquare(observed, expected).pvalue > 1e-3
