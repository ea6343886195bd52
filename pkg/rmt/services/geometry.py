# rmt/services/geometry.py
"""
Complex elementary functions with fixed principal branches and the plane
geometry used around the Wigner law: the scaling d(H) = sqrt(1 + iH), the
Wigner density and its continuation, strips, ellipses with foci -2, 2 and
the inverse Joukowski map.

Every function accepts Python/numpy scalars or numpy arrays and returns a
value of the same shape.
"""
import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..errors import DomainError

logger = logging.getLogger(__name__)

ComplexScalar = complex
ArrayLike = Union[ComplexScalar, float, np.ndarray]

# Points closer than this to a slit are treated as lying on it
SLIT_EPS = 1e-300


def _as_complex(z: ArrayLike) -> np.ndarray:
    arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise DomainError("non-finite complex argument")
    return arr


def _on_real_ray(arr: np.ndarray, lo: float = -np.inf, hi: float = np.inf) -> np.ndarray:
    return (np.abs(arr.imag) <= SLIT_EPS) & (arr.real >= lo) & (arr.real <= hi)


def principal_pow(z: ArrayLike, alpha: float) -> ArrayLike:
    """
    exp(alpha * Log z) with Log the principal logarithm.

    Args:
        z: point(s) of the plane cut along (-inf, 0]
        alpha: real exponent

    Returns:
        The principal power; sqrt(0) = 0 is the only value taken on the cut.

    Raises:
        DomainError: if z lies on (-inf, 0] (apart from the sqrt(0) case)
    """
    arr = _as_complex(z)
    on_cut = _on_real_ray(arr, hi=0.0)
    zero_sqrt = on_cut & (arr == 0) & (alpha == 0.5)
    if np.any(on_cut & ~zero_sqrt):
        raise DomainError(f"principal power of order {alpha} evaluated on the cut (-inf, 0]")
    safe = np.where(zero_sqrt, 1.0, arr)
    out = np.where(zero_sqrt, 0.0, np.exp(alpha * np.log(safe)))
    return out[()]


def d_scale(H: Union[float, np.ndarray]) -> ArrayLike:
    """d(H) = sqrt(1 + iH) on the principal branch, in closed form."""
    H = np.asarray(H, dtype=float)
    if not np.all(np.isfinite(H)):
        raise DomainError("d(H) needs a finite H")
    re = np.sqrt((np.hypot(1.0, H) + 1.0) / 2.0)
    # 2 Re d Im d = H keeps small |H| free of cancellation
    im = H / (2.0 * re)
    return (re + 1j * im)[()]


def h_bound(b: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Nonnegative solution H_b of |Im d(H)| = b, i.e. sqrt((1 + 2b^2)^2 - 1)."""
    b = np.asarray(b, dtype=float)
    if np.any(b < 0):
        raise DomainError("h_bound needs b >= 0")
    return (2.0 * b * np.sqrt(1.0 + b * b))[()]


def wigner_density(u: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Semicircle density (2 pi)^-1 sqrt((4 - u^2)_+)."""
    u = np.asarray(u, dtype=float)
    return (np.sqrt(np.clip(4.0 - u * u, 0.0, None)) / (2.0 * np.pi))[()]


def wigner_cdf(u: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Distribution function of the semicircle law."""
    u = np.clip(np.asarray(u, dtype=float), -2.0, 2.0)
    value = 0.5 + u * np.sqrt(4.0 - u * u) / (4.0 * np.pi) + np.arcsin(u / 2.0) / np.pi
    return np.clip(value, 0.0, 1.0)[()]


def wigner_density_complex(z: ArrayLike) -> ArrayLike:
    """
    Continuation (2 pi)^-1 (2 - z)^(1/2) (2 + z)^(1/2) of the semicircle
    density to the plane slit along (-inf, -2] and [2, inf).
    """
    arr = _as_complex(z)
    if np.any(_on_real_ray(arr, hi=-2.0) | _on_real_ray(arr, lo=2.0)):
        raise DomainError("continued Wigner density evaluated on a slit")
    return (principal_pow(2.0 - arr, 0.5) * principal_pow(2.0 + arr, 0.5) / (2.0 * np.pi))[()]


@dataclass(frozen=True)
class StripSpec:
    """Rectangle S = {|Re z| < 2 - alpha, |Im z| < beta}."""
    alpha: float
    beta: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise DomainError(f"strip alpha must lie in (0, 2), got {self.alpha}")
        if not self.beta > 0.0:
            raise DomainError(f"strip beta must be positive, got {self.beta}")


def in_strip(z: ArrayLike, spec: StripSpec, closed: bool = True) -> Union[bool, np.ndarray]:
    arr = np.asarray(z, dtype=complex)
    half_width = 2.0 - spec.alpha
    if closed:
        inside = (np.abs(arr.real) <= half_width) & (np.abs(arr.imag) <= spec.beta)
    else:
        inside = (np.abs(arr.real) < half_width) & (np.abs(arr.imag) < spec.beta)
    return inside[()]


@dataclass(frozen=True)
class EllipseSpec:
    """Ellipse E_r with foci -2, 2 and semi-axes r^-1 + r, r^-1 - r."""
    r: float

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise DomainError(f"ellipse parameter must lie in (0, 1), got {self.r}")

    @property
    def semi_axes(self):
        return 1.0 / self.r + self.r, 1.0 / self.r - self.r


def kappa(z: ArrayLike) -> ArrayLike:
    """
    Branch of sqrt(z^2 - 4) analytic off [-2, 2] and positive on (2, inf),
    computed as sqrt(z - 2) sqrt(z + 2) with principal square roots.
    """
    arr = _as_complex(z)
    if np.any(_on_real_ray(arr, lo=-2.0, hi=2.0)):
        raise DomainError("kappa is undefined on [-2, 2]")
    far = np.abs(arr) > 4.0
    safe = np.where(far, arr, 1.0)
    # z sqrt(1 - 4/z^2) far from the slit avoids cancellation
    out = np.where(far, safe * np.sqrt(1.0 - 4.0 / (safe * safe)), np.sqrt(arr - 2.0) * np.sqrt(arr + 2.0))
    return out[()]


def joukowski_root(z: ArrayLike) -> ArrayLike:
    """
    Root x(z) of x + 1/x = z with |x| < 1.

    Raises:
        DomainError: on [-2, 2], where both roots have modulus one
    """
    arr = _as_complex(z)
    # (z - kappa)/2 written as 2/(z + kappa)
    return (2.0 / (arr + kappa(arr)))[()]


def in_ellipse_exterior(z: ArrayLike, spec: EllipseSpec) -> Union[bool, np.ndarray]:
    """Closed exterior of E_r: (Re z)^2/a^2 + (Im z)^2/b^2 >= 1."""
    arr = np.asarray(z, dtype=complex)
    a, b = spec.semi_axes
    return ((arr.real ** 2) / (a * a) + (arr.imag ** 2) / (b * b) >= 1.0)[()]
