# rmt/services/hermite.py
"""
Hermite functions phi_k (orthonormal for dx, weight e^{-x^2/2} folded in),
normalized Hermite polynomials p_k, monic Hermite polynomials and the two
leading-order Plancherel-Rotach approximations.

Values are carried as (mantissa, log_scale) with value = mantissa * exp(log_scale).
The Gaussian factor exp(-x^2/4) enters through log_scale, never through the
mantissa, so large real or imaginary arguments neither underflow nor overflow.
"""
import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple, Union

import numpy as np
from numpy.polynomial import hermite_e
from scipy import integrate
from scipy.special import gammaln

from ..errors import DomainError, HermiteOverflowError, QuadratureError
from .geometry import (
    ArrayLike,
    EllipseSpec,
    in_ellipse_exterior,
    joukowski_root,
    principal_pow,
)

logger = logging.getLogger(__name__)

# Renormalize the running pair once its mantissa leaves [1e-100, 1e100]
SCALE_THRESHOLD = 1e100
SEED = (2.0 * np.pi) ** -0.25
# Largest log-magnitude exp() can return as a finite double
MAX_LOG = np.log(np.finfo(float).max)


@dataclass(frozen=True)
class LogScaledValue:
    """value = exp(log_magnitude) * phase, or exactly zero when is_zero is set."""
    log_magnitude: Union[float, np.ndarray]
    phase: Union[complex, np.ndarray]
    is_zero: Union[bool, np.ndarray] = False

    @classmethod
    def from_mantissa(cls, mantissa, log_scale) -> "LogScaledValue":
        mantissa = np.asarray(mantissa, dtype=complex)
        log_scale = np.asarray(log_scale, dtype=complex)
        zero = mantissa == 0
        modulus = np.where(zero, 1.0, np.abs(mantissa))
        log_magnitude = np.log(modulus) + log_scale.real
        phase = np.where(zero, 0.0, (mantissa / modulus) * np.exp(1j * log_scale.imag))
        return cls(log_magnitude[()], phase[()], zero[()])

    def value(self):
        if np.any(~np.asarray(self.is_zero) & (np.asarray(self.log_magnitude) > MAX_LOG)):
            raise HermiteOverflowError("log-scaled value exceeds the double range")
        out = np.where(self.is_zero, 0.0, np.exp(self.log_magnitude) * np.asarray(self.phase))
        return out[()]


@dataclass(frozen=True)
class HermitePair:
    """
    Neighbouring members (index - 1, index) of a Hermite family at one argument.

    Both mantissas share the same log_scale, which holds the Gaussian weight and
    every renormalization applied during the sweep.
    """
    lower: np.ndarray
    upper: np.ndarray
    log_scale: np.ndarray
    index: int
    renormalized: bool = False

    @property
    def representation(self) -> str:
        return "log-scaled" if self.renormalized else "plain"

    def values(self) -> Tuple[ArrayLike, ArrayLike]:
        """(lower, upper) as plain complex numbers."""
        lower = self.to_log("lower").value()
        upper = self.to_log("upper").value()
        return lower, upper

    def to_log(self, which: str = "upper") -> LogScaledValue:
        mantissa = self.upper if which == "upper" else self.lower
        return LogScaledValue.from_mantissa(mantissa, self.log_scale)


def iter_recurrence(x: ArrayLike, n_max: int, seed_log=0.0) -> Iterator[Tuple[int, np.ndarray, np.ndarray, np.ndarray, bool]]:
    """
    Sweep f_{k+1} = (x f_k - sqrt(k) f_{k-1}) / sqrt(k+1) from f_0 = (2 pi)^(-1/4) exp(seed_log).

    Yields (k, f_{k-1}, f_k, log_scale, renormalized) for k = 0..n_max, with f_{-1} = 0.
    """
    x = np.asarray(x, dtype=complex)
    lower = np.zeros_like(x)
    upper = np.full_like(x, SEED)
    log_scale = np.zeros_like(x) + np.asarray(seed_log, dtype=complex)
    renormalized = False
    yield 0, lower, upper, log_scale, renormalized
    for k in range(n_max):
        nxt = (x * upper - np.sqrt(k) * lower) / np.sqrt(k + 1.0)
        lower, upper = upper, nxt
        size = np.maximum(np.abs(lower), np.abs(upper))
        rescale = (size > SCALE_THRESHOLD) | ((size > 0) & (size < 1.0 / SCALE_THRESHOLD))
        if np.any(rescale):
            factor = np.where(rescale, size, 1.0)
            lower = lower / factor
            upper = upper / factor
            log_scale = log_scale + np.log(factor)
            renormalized = True
        yield k + 1, lower, upper, log_scale, renormalized


def _pair(x: ArrayLike, N: int, seed_log) -> HermitePair:
    if N < 1:
        raise DomainError(f"Hermite pair needs N >= 1, got {N}")
    for k, lower, upper, log_scale, renormalized in iter_recurrence(x, N, seed_log):
        pass
    if renormalized:
        logger.debug("Hermite sweep to N=%d renormalized", N)
    return HermitePair(lower[()], upper[()], log_scale[()], N, renormalized)


def phi_pair(x: ArrayLike, N: int) -> HermitePair:
    """
    Hermite functions (phi_{N-1}(x), phi_N(x)).

    Args:
        x: real or complex argument(s)
        N: upper index, N >= 1

    Returns:
        HermitePair; phi_k(x) = p_k(x) exp(-x^2/4)
    """
    x = np.asarray(x, dtype=complex)
    return _pair(x, N, -x * x / 4.0)


def p_pair(x: ArrayLike, N: int) -> HermitePair:
    """Orthonormal Hermite polynomials (p_{N-1}(x), p_N(x)) for the weight e^{-x^2/2}."""
    return _pair(x, N, 0.0)


def scaled_argument(x: ArrayLike, s) -> Tuple[np.ndarray, complex]:
    """(x s^{-1/2}, -Log(s)/4) for the scaled family; s must avoid (-inf, 0]."""
    s_inv_half = principal_pow(s, -0.5)
    return np.asarray(x, dtype=complex) * s_inv_half, -0.25 * np.log(complex(s))


def phi_scaled(x: ArrayLike, N: int, s=1.0) -> HermitePair:
    """phi~_k(x, s) = s^{-1/4} phi_k(x s^{-1/2}) for k = N-1, N."""
    scaled, log_factor = scaled_argument(x, s)
    return _pair(scaled, N, -scaled * scaled / 4.0 + log_factor)


def monic_hermite(x: ArrayLike, N: int, s: float = 1.0) -> ArrayLike:
    """
    Monic Hermite polynomial H~_N(x, s) = s^{N/2} He_N(x s^{-1/2}).

    Raises:
        HermiteOverflowError: when the value leaves the double range
    """
    if N < 0:
        raise DomainError("monic Hermite degree must be nonnegative")
    if not s > 0:
        raise DomainError("monic Hermite scale must be positive")
    coefficients = np.zeros(N + 1)
    coefficients[N] = 1.0
    with np.errstate(over="ignore", invalid="ignore"):
        value = np.asarray(hermite_e.hermeval(np.asarray(x) / np.sqrt(s), coefficients) * s ** (N / 2.0))
    if not np.all(np.isfinite(value)):
        raise HermiteOverflowError(f"monic Hermite polynomial of degree {N} overflows")
    return value[()]


def log_factorial(N: int) -> float:
    return float(gammaln(N + 1.0))


def complex_arcsin(z: complex) -> complex:
    """Inverse of sin on the strip |Re| < pi/2: -i Log(iz + sqrt(1 - z^2))."""
    z = complex(z)
    return -1j * np.log(1j * z + np.sqrt(1.0 - z * z))


def bulk_phase_integral(z: complex) -> complex:
    """
    Integral of psi(y) = (2/pi) sqrt(1-y) sqrt(1+y) along the segment from 1 to z.

    With y = 1 + t (z - 1) the factor t^(1/2) is handled as an algebraic weight.
    """
    z = complex(z)
    g = lambda t: np.sqrt(2.0 + t * (z - 1.0))  # noqa: E731
    parts = []
    for part in (lambda t: g(t).real, lambda t: g(t).imag):
        value, err = integrate.quad(part, 0.0, 1.0, weight="alg", wvar=(0.5, 0.0), epsabs=1e-13, epsrel=1e-12)
        if not np.isfinite(value) or err > 1e-9:
            raise QuadratureError(f"bulk phase quadrature failed at z={z} (error estimate {err:.3g})")
        parts.append(value)
    inner = parts[0] + 1j * parts[1]
    return (2.0 / np.pi) * (z - 1.0) * np.sqrt(1.0 - z) * inner


def pr_bulk_envelope(z: complex, N: int) -> float:
    """Modulus of the bulk amplitude sqrt(2/(pi sqrt(2N))) |1 - z^2|^(-1/4)."""
    return float(np.sqrt(2.0 / (np.pi * np.sqrt(2.0 * N))) * abs(1.0 - complex(z) ** 2) ** -0.25)


def pr_bulk_asymptotic(z: complex, N: int) -> complex:
    """
    Leading-order oscillatory approximation of phi~_N(sqrt(2N) z, 1/2) inside (-1, 1).

    Args:
        z: point with |Re z| < 1 and small |Im z|
        N: order, N >= 1

    Returns:
        sqrt(2/(pi sqrt(2N))) (1-z)^(-1/4) (1+z)^(-1/4) cos(N pi I(z) + arcsin(z)/2),
        where I(z) is the integral of psi from 1 to z.
    """
    z = complex(z)
    if N < 1:
        raise DomainError("order must be positive")
    if abs(z - 1.0) < 1e-3 or abs(z + 1.0) < 1e-3:
        raise DomainError(f"z={z} is too close to a turning point")
    if abs(z.imag) <= 1e-300 and abs(z.real) >= 1.0:
        raise DomainError(f"z={z} lies outside the oscillatory region")
    amplitude = np.sqrt(2.0 / (np.pi * np.sqrt(2.0 * N))) * principal_pow(1.0 - z, -0.25) * principal_pow(1.0 + z, -0.25)
    phase = N * np.pi * bulk_phase_integral(z) + 0.5 * complex_arcsin(z)
    return complex(amplitude * np.cos(phase))


def pr_exterior_asymptotic(z: complex, N: int, ellipse: Optional[EllipseSpec] = None) -> LogScaledValue:
    """
    Leading-order approximation of p_N(z sqrt(N)) off a neighbourhood of [-2, 2]:
    U(z) exp(N (1/2 + x^2/2)) / (2 sqrt(2 pi) N^(1/4) x^N), x = x(z).
    """
    z = complex(z)
    ellipse = ellipse or EllipseSpec(0.9)
    if N < 1:
        raise DomainError("order must be positive")
    if abs(z.imag) <= 1e-300 and abs(z.real) <= 2.0 or not in_ellipse_exterior(z, ellipse):
        raise DomainError(f"z={z} lies inside the ellipse E_{ellipse.r}")
    x = complex(joukowski_root(z))
    ratio = (z - 2.0) / (z + 2.0)
    u_factor = principal_pow(ratio, 0.25) + principal_pow(1.0 / ratio, 0.25)
    log_value = (
        np.log(u_factor)
        + 0.5 * N * (1.0 + x * x)
        - np.log(2.0 * np.sqrt(2.0 * np.pi))
        - 0.25 * np.log(N)
        - N * np.log(x)
    )
    return LogScaledValue(float(log_value.real), complex(np.exp(1j * log_value.imag)), False)
