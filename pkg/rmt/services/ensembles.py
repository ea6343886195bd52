# rmt/services/ensembles.py
"""
Seeded sampling of GUE and HSE matrices, Hermitian eigenvalues, raw spectrum
samples and binned Monte-Carlo estimates of one-point densities and bulk
pair correlations.

Estimates store integer tallies only (per-bin counts and per-bin sums of
squared per-sample counts), so merging partial runs is exact and does not
depend on the order in which blocks finish.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..errors import DegenerateSampleError, DomainError, EigensolverError, MetadataMismatchError
from .geometry import wigner_density

logger = logging.getLogger(__name__)

ENSEMBLES = ("gue", "hse")
# Matrices drawn and diagonalized together
BATCH = 64


@dataclass(frozen=True)
class RngStream:
    """Counter-based Philox stream; (seed, stream_id) fixes the whole sample sequence."""
    seed: int
    stream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        object.__setattr__(self, "generator", np.random.Generator(np.random.Philox(sequence)))


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Real diagonal plus the strict upper triangle (row-major) of a Hermitian matrix."""
    n: int
    diagonal: np.ndarray
    upper: np.ndarray

    @classmethod
    def from_dense(cls, a) -> "HermitianMatrix":
        a = np.asarray(a, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError("Hermitian matrix must be square")
        if not np.allclose(a, a.conj().T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(a).max())):
            raise DomainError("matrix is not Hermitian")
        iu = np.triu_indices(a.shape[0], 1)
        return cls(a.shape[0], a.diagonal().real.copy(), a[iu].copy())

    def dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=complex)
        iu = np.triu_indices(self.n, 1)
        a[iu] = self.upper
        a = a + a.conj().T
        a[np.diag_indices(self.n)] = self.diagonal
        return a

    @property
    def trace(self) -> float:
        return float(self.diagonal.sum())

    @property
    def hs_norm_sq(self) -> float:
        return float(np.sum(self.diagonal ** 2) + 2.0 * np.sum(np.abs(self.upper) ** 2))


@dataclass(frozen=True)
class Spectrum:
    values: Tuple[float, ...]

    def __post_init__(self):
        if any(b < a for a, b in zip(self.values, self.values[1:])):
            raise EigensolverError("spectrum is not sorted")

    def __len__(self):
        return len(self.values)


def gue_stack(N: int, s: float, count: int, rng: RngStream) -> np.ndarray:
    """
    count GUE(s) matrices as a dense (count, N, N) array: diagonal variance s,
    real and imaginary off-diagonal parts of variance s/2.
    """
    if N < 1 or not s > 0:
        raise DomainError("GUE needs N >= 1 and s > 0")
    g = rng.generator
    iu = np.triu_indices(N, 1)
    diagonal = np.sqrt(s) * g.standard_normal((count, N))
    off = np.sqrt(s / 2.0) * (g.standard_normal((count, iu[0].size)) + 1j * g.standard_normal((count, iu[0].size)))
    a = np.zeros((count, N, N), dtype=complex)
    a[:, iu[0], iu[1]] = off
    a = a + np.conj(np.swapaxes(a, 1, 2))
    a[:, np.arange(N), np.arange(N)] = diagonal
    return a


def hse_stack(N: int, s: float, count: int, rng: RngStream) -> np.ndarray:
    """count matrices uniform on the sphere tr Y^2 = s N^2, as Y = sqrt(s) N X / sqrt(tr X^2)."""
    x = gue_stack(N, 1.0, count, rng)
    norm_sq = np.sum(np.abs(x) ** 2, axis=(1, 2))
    if np.any(norm_sq < np.finfo(float).tiny):
        raise DegenerateSampleError("tr X^2 underflowed while projecting onto the sphere")
    return np.sqrt(s) * N * x / np.sqrt(norm_sq)[:, None, None]


def draw_stack(ensemble: str, N: int, s: float, count: int, rng: RngStream) -> np.ndarray:
    if ensemble == "gue":
        return gue_stack(N, s, count, rng)
    if ensemble == "hse":
        return hse_stack(N, s, count, rng)
    raise DomainError(f"unknown ensemble {ensemble!r}")


def gue_sample(N: int, s: float, rng: RngStream) -> HermitianMatrix:
    return HermitianMatrix.from_dense(gue_stack(N, s, 1, rng)[0])


def hse_sample(N: int, s: float, rng: RngStream) -> HermitianMatrix:
    return HermitianMatrix.from_dense(hse_stack(N, s, 1, rng)[0])


def stack_eigenvalues(stack: np.ndarray) -> np.ndarray:
    """Sorted eigenvalues of every matrix in a (count, N, N) stack, invariants checked."""
    try:
        values = np.linalg.eigvalsh(stack)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"Hermitian eigensolve failed: {exc}") from exc
    trace = np.trace(stack, axis1=1, axis2=2).real
    hs = np.sum(np.abs(stack) ** 2, axis=(1, 2))
    scale = np.sqrt(hs) * stack.shape[1] + 1.0
    if np.any(np.abs(values.sum(axis=1) - trace) > 1e-9 * scale):
        raise EigensolverError("eigenvalue sum differs from the trace")
    if np.any(np.abs((values ** 2).sum(axis=1) - hs) > 1e-9 * (hs + 1.0)):
        raise EigensolverError("eigenvalue square sum differs from the Hilbert-Schmidt norm")
    return values


def eigenvalues(m: HermitianMatrix) -> Spectrum:
    return Spectrum(tuple(stack_eigenvalues(m.dense()[None])[0].tolist()))


def _batches(samples: int):
    done = 0
    while done < samples:
        size = min(BATCH, samples - done)
        yield size
        done += size


@dataclass(frozen=True, eq=False)
class CorrelationEstimate:
    """
    Binned estimate of a one-point density (order 1, target N^-1 R_{1,N}) or of
    the window-averaged bulk pair correlation in rescaled units (order 2,
    target (N w(u))^-2 R_{2,N}).
    """
    order: int
    lo: float
    hi: float
    bins: int
    counts: np.ndarray
    sumsq: np.ndarray
    samples: int
    ensemble: str
    N: int
    s: float
    rescaling: Optional[Tuple[float, float]] = None  # (u, window_A) for order 2
    outside: int = 0

    @property
    def width(self) -> float:
        return (self.hi - self.lo) / self.bins

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.bins + 1)

    @property
    def centers(self) -> np.ndarray:
        edges = self.edges
        return 0.5 * (edges[1:] + edges[:-1])

    @property
    def normalization(self) -> str:
        if self.order == 1:
            return "counts / (samples * N * bin_width)"
        return "counts / (samples * integral over bin of 2(A - |tau|))"

    def metadata(self) -> tuple:
        return (self.order, self.lo, self.hi, self.bins, self.ensemble, self.N, self.s, self.rescaling)

    def _denominators(self) -> np.ndarray:
        if self.order == 1:
            return np.full(self.bins, self.N * self.width)
        window = self.rescaling[1]
        primitive = lambda t: 2.0 * window * t - t * np.abs(t)  # noqa: E731
        edges = self.edges
        return primitive(edges[1:]) - primitive(edges[:-1])

    def values(self) -> np.ndarray:
        if self.samples == 0:
            return np.zeros(self.bins)
        return self.counts / (self.samples * self._denominators())

    def std_errors(self) -> np.ndarray:
        S = self.samples
        if S < 2:
            return np.full(self.bins, np.nan)
        mean = self.counts / S
        variance = np.maximum(self.sumsq / S - mean * mean, 0.0) * S / (S - 1.0)
        return np.sqrt(variance / S) / self._denominators()

    def mass(self) -> float:
        """Integral of an order-1 estimate over its grid."""
        return float(np.sum(self.values()) * self.width)

    def to_dict(self) -> Dict:
        return {
            "order": self.order, "lo": self.lo, "hi": self.hi, "bins": self.bins,
            "counts": self.counts.tolist(), "sumsq": self.sumsq.tolist(),
            "samples": self.samples, "ensemble": self.ensemble, "N": self.N, "s": self.s,
            "rescaling": list(self.rescaling) if self.rescaling else None, "outside": self.outside,
        }


def empty_estimate(order: int, lo: float, hi: float, bins: int, ensemble: str, N: int, s: float,
                   rescaling: Optional[Tuple[float, float]] = None) -> CorrelationEstimate:
    if not hi > lo or bins < 1:
        raise DomainError("estimate grid needs hi > lo and at least one bin")
    if ensemble not in ENSEMBLES:
        raise DomainError(f"unknown ensemble {ensemble!r}")
    zeros = np.zeros(bins, dtype=np.int64)
    return CorrelationEstimate(order, float(lo), float(hi), int(bins), zeros, zeros.copy(), 0, ensemble, int(N), float(s), rescaling, 0)


def empty_like(estimate: CorrelationEstimate) -> CorrelationEstimate:
    return empty_estimate(estimate.order, estimate.lo, estimate.hi, estimate.bins, estimate.ensemble,
                          estimate.N, estimate.s, estimate.rescaling)


def merge_estimates(a: CorrelationEstimate, b: CorrelationEstimate) -> CorrelationEstimate:
    """Add the tallies of two estimates with identical metadata."""
    if a.metadata() != b.metadata():
        raise MetadataMismatchError(f"cannot merge estimates {a.metadata()} and {b.metadata()}")
    return replace(a, counts=a.counts + b.counts, sumsq=a.sumsq + b.sumsq,
                   samples=a.samples + b.samples, outside=a.outside + b.outside)


def _tally(per_sample: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    per_sample = per_sample.astype(np.int64)
    return per_sample.sum(axis=0), (per_sample * per_sample).sum(axis=0)


def estimate_density(N: int, s: float, samples: int, grid: Tuple[float, float, int], rng: RngStream,
                     ensemble: str = "gue") -> CorrelationEstimate:
    """
    Histogram of all eigenvalues of `samples` matrices, normalized to a probability density.

    Args:
        grid: (lo, hi, bins)
        ensemble: "gue" or "hse"

    Returns:
        Order-1 CorrelationEstimate; eigenvalues outside the grid are counted in `outside`.
    """
    if samples < 1:
        raise DomainError("estimate_density needs at least one sample")
    lo, hi, bins = grid
    estimate = empty_estimate(1, lo, hi, bins, ensemble, N, s)
    counts = np.zeros(bins, dtype=np.int64)
    sumsq = np.zeros(bins, dtype=np.int64)
    outside = 0
    for size in _batches(samples):
        values = stack_eigenvalues(draw_stack(ensemble, N, s, size, rng))
        index = np.floor((values - lo) / estimate.width).astype(np.int64)
        index = np.where(values == hi, bins - 1, index)
        inside = (index >= 0) & (index < bins)
        outside += int(np.count_nonzero(~inside))
        rows = np.broadcast_to(np.arange(size)[:, None], index.shape)
        per_sample = np.zeros((size, bins), dtype=np.int64)
        np.add.at(per_sample, (rows[inside], index[inside]), 1)
        c, q = _tally(per_sample)
        counts += c
        sumsq += q
    logger.debug("density estimate: %d %s samples, %d eigenvalues outside the grid", samples, ensemble, outside)
    return replace(estimate, counts=counts, sumsq=sumsq, samples=samples, outside=outside)


def bulk_coordinates(values: np.ndarray, N: int, s: float, u: float) -> np.ndarray:
    """xi = (lambda / sqrt(s N) - u) N w(u): unit mean spacing around the bulk point u."""
    return (values / np.sqrt(s * N) - u) * N * wigner_density(u)


def pair_counts(xi: np.ndarray, window_A: float, bins: int) -> np.ndarray:
    """
    Ordered pairs i != j of one sample with tau = xi_i - xi_j, |xi_i| <= A - |tau|,
    tallied over [-A, A].
    """
    local = xi[np.abs(xi) <= window_A]
    tau = local[:, None] - local[None, :]
    keep = (np.abs(local)[:, None] <= window_A - np.abs(tau)) & ~np.eye(local.size, dtype=bool)
    index = np.floor((tau[keep] + window_A) / (2.0 * window_A / bins)).astype(np.int64)
    return np.bincount(np.clip(index, 0, bins - 1), minlength=bins)


def estimate_pair_correlation(N: int, s: float, u: float, window_A: float, bins: int, samples: int,
                              rng: RngStream, ensemble: str = "gue") -> CorrelationEstimate:
    """
    Window-averaged pair correlation around the bulk point u in rescaled units.

    Every eigenvalue is mapped to xi = (lambda/sqrt(sN) - u) N w(u); the estimate
    targets (N w(u))^-2 R_{2,N}, whose large-N limit is 1 - sinc^2(tau).
    """
    if not wigner_density(u) > 0:
        raise DomainError(f"u={u} is not a bulk point")
    if not window_A > 0 or samples < 1:
        raise DomainError("pair correlation needs a positive window and at least one sample")
    estimate = empty_estimate(2, -window_A, window_A, bins, ensemble, N, s, (float(u), float(window_A)))
    counts = np.zeros(bins, dtype=np.int64)
    sumsq = np.zeros(bins, dtype=np.int64)
    for size in _batches(samples):
        values = stack_eigenvalues(draw_stack(ensemble, N, s, size, rng))
        xi = bulk_coordinates(values, N, s, u)
        per_sample = np.stack([pair_counts(row, window_A, bins) for row in xi])
        c, q = _tally(per_sample)
        counts += c
        sumsq += q
    return replace(estimate, counts=counts, sumsq=sumsq, samples=samples)


@dataclass(frozen=True, eq=False)
class SpectrumSample:
    """Raw eigenvalues of `samples` matrices, one sorted row per matrix."""
    ensemble: str
    N: int
    s: float
    values: np.ndarray

    @property
    def samples(self) -> int:
        return int(self.values.shape[0])

    @property
    def support(self) -> float:
        """Largest possible |lambda|: sqrt(s) N on the HSE sphere."""
        return float(np.sqrt(self.s) * self.N)

    def metadata(self) -> tuple:
        return (self.ensemble, self.N, self.s)


def sample_spectra(N: int, s: float, samples: int, rng: RngStream, ensemble: str = "hse") -> SpectrumSample:
    """Eigenvalues of `samples` matrices drawn from `ensemble`, kept per sample."""
    if samples < 1:
        raise DomainError("sample_spectra needs at least one sample")
    rows = [stack_eigenvalues(draw_stack(ensemble, N, s, size, rng)) for size in _batches(samples)]
    logger.debug("spectra: %d %s samples at N=%d, s=%.4g", samples, ensemble, N, s)
    return SpectrumSample(ensemble, int(N), float(s), np.concatenate(rows, axis=0))


def merge_spectra(a: SpectrumSample, b: SpectrumSample) -> SpectrumSample:
    """Concatenate two spectrum samples drawn with identical metadata, a first."""
    if a.metadata() != b.metadata():
        raise MetadataMismatchError(f"cannot merge spectra {a.metadata()} and {b.metadata()}")
    return replace(a, values=np.concatenate([a.values, b.values], axis=0))


def block_plan(samples: int, chunk: int) -> List[Tuple[int, int]]:
    """Split `samples` into (stream_id, count) blocks of at most `chunk` samples."""
    if chunk < 1:
        raise DomainError("chunk must be positive")
    plan = []
    stream_id = 0
    remaining = samples
    while remaining > 0:
        size = min(chunk, remaining)
        plan.append((stream_id, size))
        stream_id += 1
        remaining -= size
    return plan
