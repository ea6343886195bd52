# rmt/experiments/identities.py
"""Deterministic identity suites for d(H), the kernels, the correlation continuation and phi_{N^2}."""
import logging
from typing import List, Tuple

import numpy as np
from scipy import integrate

from ..config import Config
from ..models import ExperimentConfig, ResultRecord, ResultRow, summarize
from ..services.correlations import CorrelationQuery, char_fn, gue_correlation, gue_correlation_complex_H
from ..services.geometry import d_scale, h_bound
from ..services.kernels import KernelQuery, kernel_cd, kernel_diag, kernel_integral_repr, kernel_sum
from . import make_record

logger = logging.getLogger(__name__)

# Floor for relative-error denominators
TINY = 1e-300


def _row(suite: str, error: float, **inputs) -> ResultRow:
    tolerance = Config.TOLERANCES[f"identity-{suite}"]
    return ResultRow(suite, {"tolerance": tolerance, **inputs}, float(error), 0.0, float(error))


def cd_versus_sum(rng: np.random.Generator, pairs: int = 1000, N_max: int = 50) -> Tuple[float, float]:
    """
    Largest |kernel_cd - kernel_sum| over random real pairs, relative to |kernel_cd|
    and relative to the diagonal scale sqrt(K(x,x) K(y,y)), which bounds |K(x,y)|.
    """
    Ns = rng.integers(1, N_max + 1, size=pairs)
    x = rng.uniform(-3.0, 3.0, size=pairs)
    y = rng.uniform(-3.0, 3.0, size=pairs)
    relative = diag_scaled = 0.0
    for N in np.unique(Ns):
        mask = Ns == N
        q = KernelQuery(x[mask], y[mask], int(N))
        cd, total = kernel_cd(q), kernel_sum(q)
        gap = np.abs(cd - total)
        scale = np.sqrt(np.abs(kernel_diag(x[mask], int(N))) * np.abs(kernel_diag(y[mask], int(N))))
        relative = max(relative, float(np.max(gap / np.maximum(np.abs(cd), TINY))))
        diag_scaled = max(diag_scaled, float(np.max(gap / scale)))
    return relative, diag_scaled


def scaling(rng: np.random.Generator, N: int = 12) -> float:
    x = rng.uniform(-2.0, 2.0, size=50)
    y = rng.uniform(-2.0, 2.0, size=50)
    worst = 0.0
    for s in (0.25, 3.0, 1.0 + 0.5j, 0.2 - 0.7j):
        root = complex(s) ** -0.5
        direct = kernel_sum(KernelQuery(x, y, N, s))
        pulled = root * kernel_cd(KernelQuery(x * root, y * root, N))
        scale = np.maximum(1.0, np.abs(direct))
        worst = max(worst, float(np.max(np.abs(direct - pulled) / scale)))
    return worst


def reflection(rng: np.random.Generator, N: int = 15) -> float:
    x = rng.uniform(-3.0, 3.0, size=50)
    y = rng.uniform(-3.0, 3.0, size=50)
    worst = 0.0
    for s in (1.0, 0.5, 1.0 + 1.0j):
        a = kernel_cd(KernelQuery(-x, -y, N, s))
        b = kernel_cd(KernelQuery(x, y, N, s))
        worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b)))))
    return worst


def d_identities() -> float:
    H = np.linspace(-10.0, 10.0, 2001)
    d = d_scale(H)
    modulus = np.max(np.abs(np.abs(d) ** 4 - (1.0 + H * H)) / (1.0 + H * H))
    hyperbola = np.max(np.abs(d.real ** 2 - d.imag ** 2 - 1.0))
    b = np.linspace(0.0, 5.0, 501)
    round_trip = np.max(np.abs(np.abs(d_scale(h_bound(b)).imag) - b))
    return float(max(modulus, hyperbola, round_trip))


def continuation(rng: np.random.Generator) -> Tuple[float, float]:
    """Direct complex-scale correlation against the d(H) pull-back, relative to |direct| and to the diagonal product."""
    relative = diag_scaled = 0.0
    for N in (1, 3, 8, 20):
        for n in range(1, min(3, N) + 1):
            points = tuple(np.sort(rng.uniform(-1.5, 1.5, size=n)))
            for H in np.linspace(-5.0, 5.0, 11):
                s = 1.0 / ((1.0 + 1j * H) * N)
                direct = gue_correlation(CorrelationQuery(points, N, s))
                gap = abs(direct - gue_correlation_complex_H(points, N, H))
                diag = np.prod([abs(complex(kernel_diag(p, N, s))) for p in points])
                relative = max(relative, gap / max(abs(direct), TINY))
                diag_scaled = max(diag_scaled, gap / max(diag, TINY))
    return float(relative), float(diag_scaled)


def char_fn_modulus() -> float:
    worst = 0.0
    for N in (2, 3, 5, 10):
        H = np.linspace(-5.0, 5.0, 101)
        expected = (1.0 + H * H) ** (-N * N / 4.0)
        worst = max(worst, float(np.max(np.abs(np.abs(char_fn(N, N * H / np.sqrt(2.0))) - expected) / expected)))
    return worst


def total_mass(N_max: int = 10) -> float:
    worst = 0.0
    for N in range(1, N_max + 1):
        mass, _ = integrate.quad(lambda x: float(np.real(kernel_diag(x, N, 1.0 / N))), -4.0, 4.0,
                                 limit=200, epsabs=1e-12)
        worst = max(worst, abs(mass - N))
    return worst


def integral_representation(rng: np.random.Generator, count: int = 20) -> float:
    worst = 0.0
    for _ in range(count):
        N = int(rng.integers(1, 11))
        x, y = rng.uniform(-3.0, 3.0, size=2)
        closed = float(np.real(kernel_cd(KernelQuery(x, y, N))))
        worst = max(worst, abs(kernel_integral_repr(x, y, N) - closed))
    return worst


def run(config: ExperimentConfig, runner) -> ResultRecord:
    rng = np.random.default_rng(config.seed)
    # suites draw from one generator in this order
    cd_relative, cd_diag = cd_versus_sum(rng)
    scaling_error = scaling(rng)
    reflection_error = reflection(rng)
    continuation_relative, continuation_diag = continuation(rng)
    rows: List[ResultRow] = [
        _row("cd-sum", cd_relative, N="1..50"),
        _row("cd-sum-diag-scaled", cd_diag, N="1..50"),
        _row("scaling", scaling_error, N=12),
        _row("reflection", reflection_error, N=15),
        _row("d", d_identities(), N=""),
        _row("continuation", continuation_relative, N="1..20"),
        _row("continuation-diag-scaled", continuation_diag, N="1..20"),
        _row("char-fn", char_fn_modulus(), N="2..10"),
        _row("mass", total_mass(), N="1..10"),
        _row("integral-repr", integral_representation(rng), N="1..10"),
    ]
    ratios = [row.abs_error / row.inputs["tolerance"] for row in rows]
    for row, ratio in zip(rows, ratios):
        logger.info("identity %-24s error %.3g (%.2g of tolerance)", row.case, row.abs_error, ratio)
    summary = summarize(rows, 1.0, metric="error / tolerance", passed=max(ratios) <= 1.0, max_ratio=max(ratios))
    return make_record(config, rows, summary)
