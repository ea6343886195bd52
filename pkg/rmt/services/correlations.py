# rmt/services/correlations.py
"""
Correlation functions of the Gaussian (GUE) and fixed Hilbert-Schmidt norm
(HSE) ensembles.

GUE correlations are exact determinants of the scaled Hermite kernel.  HSE
correlations come from sampled HSE spectra (module ensembles) pushed
through the sphere-scaling rule

    R^{HSE, sigma}(x) = sigma^{-n/2} R^{HSE, 1}(x sigma^{-1/2}),

or, for n < N, from Fourier inversion of the exact GUE continuation.
"""
import logging
import warnings
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np
from scipy import integrate, stats
from scipy.special import gammaln

from ..errors import DomainError, QuadratureError
from .geometry import d_scale, principal_pow
from .kernels import KernelQuery, kernel_cd

logger = logging.getLogger(__name__)

GAUSS_LEGENDRE_NODES = 400
# Chi-square tail mass left outside the quadrature interval on each side
TAIL_MASS = 1e-16
# Windows across the sphere support for point readings of sampled HSE spectra
WINDOW_BINS = 160


@dataclass(frozen=True)
class Measurement:
    """Monte-Carlo backed value with its estimated standard error."""
    value: Union[float, complex]
    std_error: float


@dataclass(frozen=True)
class CorrelationQuery:
    points: Tuple[complex, ...]
    N: int
    s: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(np.atleast_1d(np.asarray(self.points)).tolist()))
        n = len(self.points)
        if not 1 <= n <= self.N:
            raise DomainError(f"correlation order must satisfy 1 <= n <= N, got n={n}, N={self.N}")
        principal_pow(self.s, 0.5)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def is_real(self) -> bool:
        return np.isrealobj(np.asarray(self.points)) and np.isreal(self.s) and np.real(self.s) > 0


def gue_correlation(q: CorrelationQuery) -> Union[float, complex]:
    """
    R_{n,N}^{GUE,s}(x_1..x_n) = det(K~_N(x_i, x_j, s)).

    Repeated points give exactly zero.
    """
    points = np.asarray(q.points, dtype=complex)
    if np.unique(points).size < points.size:
        return 0.0 if q.is_real else 0j
    xi, xj = np.meshgrid(points, points, indexing="ij")
    matrix = np.asarray(kernel_cd(KernelQuery(xi, xj, q.N, q.s)))
    value = np.linalg.det(matrix)
    return float(value.real) if q.is_real else complex(value)


def gue_pair_correlation(x1, x2, N: int, s=1.0):
    """Vectorized R_{2,N}^{GUE,s}(x1, x2) = K(x1,x1) K(x2,x2) - K(x1,x2) K(x2,x1)."""
    x1, x2 = np.broadcast_arrays(np.asarray(x1, dtype=complex), np.asarray(x2, dtype=complex))
    k11 = kernel_cd(KernelQuery(x1, x1, N, s))
    k22 = kernel_cd(KernelQuery(x2, x2, N, s))
    k12 = kernel_cd(KernelQuery(x1, x2, N, s))
    k21 = kernel_cd(KernelQuery(x2, x1, N, s))
    return (k11 * k22 - k12 * k21)[()]


def gue_correlation_complex_H(points: Sequence[float], N: int, H: float) -> complex:
    """
    R_{n,N}^{GUE, 1/((1+iH)N)}(x) through the pull-back d(H)^n R_{n,N}^{GUE,1/N}(x d(H)).
    """
    d = complex(d_scale(H))
    scaled = np.asarray(points, dtype=complex) * d
    value = gue_correlation(CorrelationQuery(tuple(scaled), N, 1.0 / N))
    return complex(d ** len(scaled) * value)


@dataclass(frozen=True)
class ChiSquareSpec:
    m: int
    s: complex = 1.0

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise DomainError(f"degrees of freedom must be a positive integer, got {self.m}")
        principal_pow(self.s, 0.5)


def chi_density(spec: ChiSquareSpec, u):
    """
    gamma_{m,s}(u) = (2^{m/2} s^{m/2} Gamma(m/2))^-1 u^{m/2 - 1} e^{-u/(2s)} for u >= 0, 0 otherwise.

    Infinite at u = 0 when m = 1. Evaluated in log space; s may be complex with Re s > 0.
    """
    u = np.asarray(u, dtype=float)
    half = spec.m / 2.0
    s = complex(spec.s)
    positive = u > 0
    safe = np.where(positive, u, 1.0)
    log_value = -half * np.log(2.0) - half * np.log(s) - gammaln(half) + (half - 1.0) * np.log(safe) - safe / (2.0 * s)
    value = np.where(positive, np.exp(log_value), 0.0)
    if spec.m == 2:
        value = np.where(u == 0, np.exp(-np.log(2.0) - np.log(s)), value)
    if spec.m == 1:
        value = np.where(u == 0, np.inf, value)
    if np.isreal(s) and s.real > 0:
        value = value.real
    return value[()]


def char_fn(N: int, p):
    """phi_{N^2}(p) = exp(-i p N / sqrt 2) (1 - i p sqrt 2 / N)^(-N^2/2), principal power."""
    p = np.asarray(p, dtype=float)
    log_value = -1j * p * N / np.sqrt(2.0) - (N * N / 2.0) * np.log(1.0 - 1j * p * np.sqrt(2.0) / N)
    return np.exp(log_value)[()]


def sine_det(ts: Sequence[float]) -> float:
    """det(sin(pi (t_i - t_j)) / (pi (t_i - t_j))), a Gram determinant in [0, 1]."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.unique(ts).size < ts.size:
        return 0.0
    matrix = np.sinc(ts[:, None] - ts[None, :])
    return float(np.clip(np.linalg.det(matrix), 0.0, 1.0))


def fourier_rhs(p: float, points: Sequence[float], N: int) -> complex:
    """phi_{N^2}(p) R_{n,N}^{GUE, 1/((1 - i p sqrt 2/N) N)}(points)."""
    H = -p * np.sqrt(2.0) / N
    return complex(char_fn(N, p) * gue_correlation_complex_H(points, N, H))


def chi_quadrature(N: int, s: float, nodes: int = GAUSS_LEGENDRE_NODES) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gauss-Legendre nodes u and weights w_i gamma_{N^2,s}(u_i) covering the
    chi-square mass of s T_N up to TAIL_MASS on each side.
    """
    m = N * N
    lo = s * stats.chi2.ppf(TAIL_MASS, m)
    hi = s * stats.chi2.isf(TAIL_MASS, m)
    x, w = np.polynomial.legendre.leggauss(nodes)
    u = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    weights = 0.5 * (hi - lo) * w * chi_density(ChiSquareSpec(m, s), u)
    logger.debug("chi-square quadrature for m=%d, s=%.4g on [%.4g, %.4g]", m, s, lo, hi)
    return u, weights

def _check_spectra(spectra, N: int):
    if spectra.ensemble != "hse":
        raise DomainError("the HSE oracle must be a sample of HSE spectra")
    if spectra.N != N:
        raise DomainError(f"HSE spectra were sampled at N={spectra.N}, not N={N}")
    if spectra.samples < 2:
        raise DomainError("the HSE oracle needs at least two samples for an error estimate")


def _sample_mean(per_sample: np.ndarray) -> Measurement:
    value = per_sample.mean()
    std_error = float(np.std(per_sample, ddof=1) / np.sqrt(per_sample.shape[0]))
    return Measurement(value, std_error)


def _window_density(spectra, y: float, bins: int) -> np.ndarray:
    """Per-sample eigenvalue count in [y - h/2, y + h/2] divided by h, h = 2 * support / bins."""
    if bins < 1:
        raise DomainError("window bins must be positive")
    h = 2.0 * spectra.support / bins
    return np.count_nonzero(np.abs(spectra.values - y) <= 0.5 * h, axis=1) / h


def _sphere_mixture(x: float, N: int, spectra, weight: Callable, quadrature: Tuple[np.ndarray, np.ndarray],
                    bins: int) -> Measurement:
    """
    Monte-Carlo value of the integral of R_{1,N}^{HSE, u/N^2}(x) weight(u) du.

    For x != 0 the sphere scaling R^{sigma}(x) = c R^{sigma_ref}(c x), c = sqrt(sigma_ref N^2 / u),
    turns the u-integral of every delta mass at an eigenvalue lambda (lambda x > 0) into the
    single term weight(u*) 2u*/|x| with u* = sigma_ref N^2 x^2 / lambda^2. At x = 0 the
    reference density at 0 is a window count and the u-integral runs over `quadrature`,
    the nodes and already weighted coefficients of the same mixture.
    """
    sigma_ref = spectra.s
    if x == 0.0:
        u, weights = quadrature
        factor = np.sum(weights * np.sqrt(sigma_ref * N * N / u))
        return _sample_mean(factor * _window_density(spectra, 0.0, bins))
    lam = spectra.values
    same_side = lam * x > 0
    safe = np.where(same_side, lam, 1.0)
    u_star = sigma_ref * N * N * x * x / (safe * safe)
    terms = np.where(same_side, weight(u_star) * 2.0 * u_star / abs(x), 0.0)
    return _sample_mean(terms.sum(axis=1))


def disintegration_rhs(points: Sequence[float], N: int, s: float, hse_oracle, bins: int = WINDOW_BINS) -> Measurement:
    """
    Integral of R_{n,N}^{HSE, u/N^2}(points) gamma_{N^2,s}(u) du, n = 1.

    Args:
        points: single real point x
        N: matrix size
        s: GUE scale, s > 0
        hse_oracle: SpectrumSample of HSE matrices at any reference scale
        bins: window count over the sphere support, used at x = 0 only

    Returns:
        Measurement with the standard error of the mean over samples.
    """
    points = np.atleast_1d(np.asarray(points, dtype=float))
    if points.size != 1:
        raise DomainError("Monte-Carlo disintegration is implemented for one-point functions")
    if not s > 0:
        raise DomainError("disintegration needs a positive scale")
    _check_spectra(hse_oracle, N)
    spec = ChiSquareSpec(N * N, s)
    return _sphere_mixture(float(points[0]), N, hse_oracle, lambda u: chi_density(spec, u),
                           chi_quadrature(N, s), bins)


def q_density(v, points: Sequence[float], N: int, hse_oracle, bins: int = WINDOW_BINS) -> List[Measurement]:
    """q_{N^2}(v) = R^{HSE, 1/N + v sqrt2/N^2}(points) sqrt2 gamma_{N^2,1/N}(N + v sqrt2), window estimate."""
    x = float(np.atleast_1d(points)[0])
    _check_spectra(hse_oracle, N)
    v = np.atleast_1d(np.asarray(v, dtype=float))
    spec = ChiSquareSpec(N * N, 1.0 / N)
    out = []
    for ui in N + v * np.sqrt(2.0):
        if ui <= 0:
            out.append(Measurement(0.0, 0.0))
            continue
        c = np.sqrt(hse_oracle.s * N * N / ui)
        scale = np.sqrt(2.0) * float(chi_density(spec, ui)) * c
        out.append(_sample_mean(scale * _window_density(hse_oracle, c * x, bins)))
    return out


def _v_quadrature(N: int, phase: float = 0.0):
    u, weights = chi_quadrature(N, 1.0 / N)
    v = (u - N) / np.sqrt(2.0)
    # du = sqrt2 dv and gamma_{N^2,1/N}(u) du = sqrt2 gamma(N + v sqrt2) dv
    return u, weights * np.exp(1j * phase * v) if phase else weights


def q_integral(points: Sequence[float], N: int, hse_oracle, bins: int = WINDOW_BINS) -> Measurement:
    """Integral of q_{N^2}(v) over the line; equals R_{n,N}^{GUE,1/N}(points)."""
    _check_spectra(hse_oracle, N)
    spec = ChiSquareSpec(N * N, 1.0 / N)
    return _sphere_mixture(float(np.atleast_1d(points)[0]), N, hse_oracle, lambda u: chi_density(spec, u),
                           _v_quadrature(N), bins)


def q_fourier(p: float, points: Sequence[float], N: int, hse_oracle, bins: int = WINDOW_BINS) -> Measurement:
    """Monte-Carlo side of the Fourier identity: integral of exp(ipv) q_{N^2}(v) dv."""
    _check_spectra(hse_oracle, N)
    spec = ChiSquareSpec(N * N, 1.0 / N)

    def weight(u):
        return chi_density(spec, u) * np.exp(1j * p * (u - N) / np.sqrt(2.0))

    return _sphere_mixture(float(np.atleast_1d(points)[0]), N, hse_oracle, weight, _v_quadrature(N, phase=p), bins)


def hse_correlation_inversion(points: Sequence[float], N: int) -> float:
    """
    R_{n,N}^{HSE,1/N}(points) by inverting the Fourier identity at v = 0:

        q_{N^2}(0) = pi^-1 * integral over p > 0 of Re fourier_rhs(p),
        R^{HSE,1/N} = q_{N^2}(0) / (sqrt2 gamma_{N^2,1/N}(N)).

    Needs N >= 3 (the right-hand side is not integrable for N = 2) and n <= N - 1.
    """
    points = tuple(np.atleast_1d(np.asarray(points, dtype=float)).tolist())
    if N < 3:
        raise DomainError("Fourier inversion needs N >= 3")
    if not 1 <= len(points) <= N - 1:
        raise DomainError("Fourier inversion needs 1 <= n <= N - 1")
    omega = N / np.sqrt(2.0)

    def envelope(p):
        H = -p * np.sqrt(2.0) / N
        return np.exp(-(N * N / 2.0) * np.log(1.0 - 1j * p * np.sqrt(2.0) / N)) * gue_correlation_complex_H(points, N, H)

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            cos_part, _ = integrate.quad(lambda p: envelope(p).real, 0.0, np.inf, weight="cos", wvar=omega, limlst=200)
            sin_part, _ = integrate.quad(lambda p: envelope(p).imag, 0.0, np.inf, weight="sin", wvar=omega, limlst=200)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"Fourier inversion did not converge: {exc}") from exc
    q0 = (cos_part + sin_part) / np.pi
    normalizer = np.sqrt(2.0) * float(chi_density(ChiSquareSpec(N * N, 1.0 / N), N))
    return float(q0 / normalizer)


def hse_density_at(x: float, N: int, hse_oracle, bins: int = WINDOW_BINS) -> Measurement:
    """R_{1,N}^{HSE, sigma_ref}(x) as a window count of the sampled spectra around x."""
    _check_spectra(hse_oracle, N)
    return _sample_mean(_window_density(hse_oracle, float(x), bins))
