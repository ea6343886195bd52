# rmt/experiments/sine.py
"""
Bulk sine-kernel limit: exact kernel and determinant convergence (sine-exact)
and Monte-Carlo pair correlations of GUE and HSE (sine-mc).
"""
import logging

import numpy as np

from ..config import Config
from ..models import ExperimentConfig, ResultRecord, ResultRow, summarize
from ..services.correlations import gue_pair_correlation
from ..services.kernels import BulkRescaling, rescaled_kernel, sine_kernel
from . import make_record

logger = logging.getLogger(__name__)

T_GRID = np.arange(-3.0, 3.0 + 1e-9, 0.25)
# Gauss-Legendre nodes for bin-averaging the limiting pair correlation
BIN_NODES = 16


def _worst(errors, t1, t2):
    where = np.unravel_index(np.argmax(errors), errors.shape)
    return float(errors[where]), float(t1[where]), float(t2[where]), where


def run_exact(config: ExperimentConfig, runner) -> ResultRecord:
    """sup over the t-grid of |rescaled kernel - sine kernel|, and of the rescaled 2-point determinant."""
    t1, t2 = np.meshgrid(T_GRID, T_GRID, indexing="ij")
    limit_1 = sine_kernel(t1, t2)
    limit_2 = 1.0 - limit_1 ** 2
    rows = []
    errors = {}
    N_max = max(config.N)
    for u in config.u:
        for N in config.N:
            b = BulkRescaling(u, N)
            value = rescaled_kernel(b, t1, t2)
            err, a1, a2, where = _worst(np.abs(value - limit_1), t1, t2)
            errors[(u, N, 1)] = err
            rows.append(ResultRow("kernel", {"u": u, "N": N, "order": 1, "t1": a1, "t2": a2},
                                  float(value[where]), float(limit_1[where]), err))
            logger.info("sine-exact u=%.2f N=%d: sup kernel error %.4g", u, N, err)
        b = BulkRescaling(u, N_max)
        rho = b.density
        pair = np.real(gue_pair_correlation(u + t1 / rho, u + t2 / rho, N_max, 1.0 / N_max)) / rho ** 2
        err, a1, a2, where = _worst(np.abs(pair - limit_2), t1, t2)
        errors[(u, N_max, 2)] = err
        rows.append(ResultRow("determinant", {"u": u, "N": N_max, "order": 2, "t1": a1, "t2": a2},
                              float(pair[where]), float(limit_2[where]), err))

    tolerance = Config.TOLERANCES["sine-exact"]
    tolerance_2 = Config.TOLERANCES["sine-exact-order2"]
    N_min = min(config.N)
    checks = []
    for u in config.u:
        checks.append(errors[(u, N_max, 1)] <= tolerance)
        if N_min != N_max:
            checks.append(errors[(u, N_max, 1)] < errors[(u, N_min, 1)])
        checks.append(errors[(u, N_max, 2)] <= tolerance_2)
    final = [row for row in rows if row.inputs["N"] == N_max]
    summary = summarize(final, tolerance, metric="sup |rescaled - sine| on the t-grid", passed=all(checks),
                        order2_tolerance=tolerance_2)
    return make_record(config, rows, summary)


def limiting_bin_average(estimate) -> np.ndarray:
    """1 - sinc^2 averaged over each tau-bin with the edge-correction weight 2(A - |tau|)."""
    window = estimate.rescaling[1]
    nodes, weights = np.polynomial.legendre.leggauss(BIN_NODES)
    edges = estimate.edges
    out = np.empty(estimate.bins)
    for b in range(estimate.bins):
        lo, hi = edges[b], edges[b + 1]
        tau = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
        w = weights * 2.0 * (window - np.abs(tau))
        out[b] = np.sum(w * (1.0 - np.sinc(tau) ** 2)) / np.sum(w)
    return out


def run_mc(config: ExperimentConfig, runner) -> ResultRecord:
    """Pair-correlation estimates of every requested ensemble against 1 - sinc^2."""
    rows = []
    cases = [(e, u, N) for e in config.ensembles for u in config.u for N in config.N]
    for index, (ensemble, u, N) in enumerate(cases):
        estimate = runner.estimate(
            "pair", samples=config.samples, chunk=config.chunk, seed=config.seed, stream_base=index,
            N=N, s=config.scale_for(N), u=u, window_A=config.window_A, bins=config.bins, ensemble=ensemble,
        )
        reference = limiting_bin_average(estimate)
        worst = 0.0
        for tau, value, err, ref in zip(estimate.centers, estimate.values(), estimate.std_errors(), reference):
            deviation = float(abs(value - ref))
            worst = max(worst, deviation)
            rows.append(ResultRow(f"{ensemble}-pair", {"ensemble": ensemble, "u": u, "N": N, "tau": float(tau)},
                                  float(value), float(ref), deviation, float(err)))
        logger.info("sine-mc %s u=%.2f N=%d: max bin deviation %.4f", ensemble, u, N, worst)
    summary = summarize(rows, Config.TOLERANCES["sine-mc"], metric="max bin deviation from 1 - sinc^2")
    return make_record(config, rows, summary)
