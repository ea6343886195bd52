# rmt/services/kernels.py
"""
Christoffel-Darboux kernels of the Hermite functions.

    K~_N(x, y, s) = sum_{k<N} phi~_k(x, s) phi~_k(y, s) = s^{-1/2} K_N(x s^{-1/2}, y s^{-1/2})

evaluated in closed (Christoffel-Darboux) form, as a sum, on the diagonal,
through an integral representation, and after the bulk rescaling that
leads to the sine kernel.
"""
import logging
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ..errors import DomainError, HermiteOverflowError, QuadratureError
from .geometry import ArrayLike, d_scale, principal_pow, wigner_density, wigner_density_complex
from .hermite import MAX_LOG, iter_recurrence, phi_pair, scaled_argument

logger = logging.getLogger(__name__)

# Below this separation (relative to max(1, |x|)) the closed form loses ~6 digits
NEAR_DIAGONAL = 1e-6


@dataclass(frozen=True)
class KernelQuery:
    x: ArrayLike
    y: ArrayLike
    N: int
    s: complex = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"kernel order must be a positive integer, got {self.N}")
        principal_pow(self.s, 0.5)


@dataclass(frozen=True)
class BulkRescaling:
    """Bulk point u in (-2, 2) and the local eigenvalue density N w(u)."""
    u: float
    N: int

    def __post_init__(self):
        if not wigner_density(self.u) > 0:
            raise DomainError(f"u={self.u} is not a bulk point")
        if self.N < 1:
            raise DomainError("N must be positive")

    @property
    def density(self) -> float:
        return self.N * float(wigner_density(self.u))


def _scaled_pair(x, N, s):
    """(lower, upper, log_scale) of phi_{N-1}, phi_N at x s^{-1/2}."""
    scaled, _ = scaled_argument(x, s)
    for _, lower, upper, log_scale, _ in iter_recurrence(scaled, N, -scaled * scaled / 4.0):
        pass
    return scaled, lower, upper, log_scale


def _rescale(mantissa, log_scale):
    if np.any(np.asarray(log_scale).real > MAX_LOG):
        raise HermiteOverflowError("kernel value exceeds the double range")
    return mantissa * np.exp(log_scale)


def kernel_diag(x: ArrayLike, N: int, s=1.0) -> ArrayLike:
    """
    Confluent kernel K~_N(x, x, s).

    At s = 1, K_N(x, x) = N (phi_N^2 + phi_{N-1}^2) - sqrt(N) x phi_N phi_{N-1};
    general s through s^{-1/2} K_N(x s^{-1/2}, x s^{-1/2}).
    """
    KernelQuery(x, x, N, s)
    scaled, lower, upper, log_scale = _scaled_pair(x, N, s)
    mantissa = N * (upper * upper + lower * lower) - np.sqrt(N) * scaled * upper * lower
    return (principal_pow(s, -0.5) * _rescale(mantissa, 2.0 * log_scale))[()]


def kernel_cd(q: KernelQuery) -> ArrayLike:
    """
    Christoffel-Darboux form
    sqrt(N) (phi_N(X) phi_{N-1}(Y) - phi_{N-1}(X) phi_N(Y)) / (x - y), X = x s^{-1/2}.

    Near the diagonal the kernel is taken at the midpoint on the diagonal,
    which is exact to second order in x - y by symmetry.
    """
    x, y = np.broadcast_arrays(np.asarray(q.x, dtype=complex), np.asarray(q.y, dtype=complex))
    out = np.empty(x.shape, dtype=complex)
    near = np.abs(x - y) < NEAR_DIAGONAL * np.maximum(1.0, np.abs(x))
    far = ~near
    if np.any(far):
        xf, yf = x[far], y[far]
        _, lx, ux, sx = _scaled_pair(xf, q.N, q.s)
        _, ly, uy, sy = _scaled_pair(yf, q.N, q.s)
        numerator = np.sqrt(q.N) * _rescale(ux * ly - lx * uy, sx + sy)
        out[far] = numerator / (xf - yf)
    if np.any(near):
        out[near] = kernel_diag((x[near] + y[near]) / 2.0, q.N, q.s)
    return out[()]


def kernel_sum(q: KernelQuery) -> ArrayLike:
    """Sum of phi~_k(x, s) phi~_k(y, s) over k < N, accumulated in a single sweep."""
    x, y = np.broadcast_arrays(np.asarray(q.x, dtype=complex), np.asarray(q.y, dtype=complex))
    scaled, _ = scaled_argument(np.stack([x, y]), q.s)
    total = np.zeros(x.shape, dtype=complex)
    for _, _, upper, log_scale, _ in iter_recurrence(scaled, q.N - 1, -scaled * scaled / 4.0):
        total += _rescale(upper[0] * upper[1], log_scale[0] + log_scale[1])
    return (principal_pow(q.s, -0.5) * total)[()]


def sine_kernel(t1, t2):
    """sin(pi (t1 - t2)) / (pi (t1 - t2)), equal to 1 on the diagonal."""
    return np.sinc(np.subtract(t1, t2))[()]


def rescaled_kernel(b: BulkRescaling, t1, t2):
    """(N w(u))^-1 K~_N(u + t1/(N w(u)), u + t2/(N w(u)), 1/N)."""
    rho = b.density
    x = b.u + np.asarray(t1, dtype=float) / rho
    y = b.u + np.asarray(t2, dtype=float) / rho
    value = kernel_cd(KernelQuery(x, y, b.N, 1.0 / b.N)) / rho
    return np.real(value)[()]


def rescaled_kernel_complex_path(b: BulkRescaling, t1, t2, H: float):
    """Rescaled kernel with both arguments multiplied by d(H)."""
    rho = b.density
    d = d_scale(H)
    x = (b.u + np.asarray(t1, dtype=float) / rho) * d
    y = (b.u + np.asarray(t2, dtype=float) / rho) * d
    return (kernel_cd(KernelQuery(x, y, b.N, 1.0 / b.N)) / rho)[()]


def complex_path_limit(b: BulkRescaling, t1, t2, H: float):
    """sin(pi (t1-t2) d w(u d)/w(u)) / (pi (t1-t2) d), the large-N limit along d(H)."""
    d = d_scale(H)
    ratio = wigner_density_complex(b.u * d) / wigner_density(b.u)
    delta = np.asarray(t1, dtype=float) - np.asarray(t2, dtype=float)
    safe = np.where(delta == 0, 1.0, delta)
    value = np.sin(np.pi * safe * d * ratio) / (np.pi * safe * d)
    return np.where(delta == 0, ratio, value)[()]


def kernel_local_sine(v1, v2, N: int):
    """sin(N pi (v1-v2) w(v)) / (N pi (v1-v2)), v the midpoint; compare with K~_N(v1, v2, 1/N)/N."""
    v1 = np.asarray(v1, dtype=complex)
    v2 = np.asarray(v2, dtype=complex)
    w = wigner_density_complex((v1 + v2) / 2.0)
    delta = v1 - v2
    safe = np.where(delta == 0, 1.0, delta)
    value = np.sin(N * np.pi * safe * w) / (N * np.pi * safe)
    return np.where(delta == 0, w, value)[()]


def _integrand_bound(x, y, N):
    reach = max(abs(x), abs(y)) + 2.0 * np.sqrt(N + 1.0) + 40.0
    return np.arange(0.0, reach, 0.25)


def kernel_integral_repr(x: float, y: float, N: int) -> float:
    """
    K_N(x, y) as (sqrt(N)/2) * integral over tau > 0 of
    phi_N(x+tau) phi_{N-1}(y+tau) + phi_{N-1}(x+tau) phi_N(y+tau).

    The integral is truncated where the integrand falls below 1e-16 of its peak.

    Raises:
        DomainError: for complex arguments
        QuadratureError: when the adaptive quadrature does not converge
    """
    for value in (x, y):
        if np.iscomplexobj(value) and np.imag(value) != 0:
            raise DomainError("integral representation is only certified for real arguments")
    x, y = float(np.real(x)), float(np.real(y))
    if N < 1:
        raise DomainError("kernel order must be positive")

    def integrand(tau):
        lx, ux = phi_pair(x + tau, N).values()
        ly, uy = phi_pair(y + tau, N).values()
        return np.real(ux * ly + lx * uy)

    grid = _integrand_bound(x, y, N)
    magnitude = np.abs(integrand(grid))
    peak = magnitude.max()
    if peak == 0:
        return 0.0
    significant = np.nonzero(magnitude >= 1e-16 * peak)[0]
    upper = grid[min(significant[-1] + 1, grid.size - 1)]
    logger.debug("integral representation truncated at tau=%.3f", upper)
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, _ = integrate.quad(integrand, 0.0, upper, limit=400, epsabs=1e-13, epsrel=1e-11)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"integral representation did not converge: {exc}") from exc
    return 0.5 * np.sqrt(N) * value
