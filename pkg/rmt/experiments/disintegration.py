# rmt/experiments/disintegration.py
"""
GUE as a chi-square mixture of HSE spheres: the disintegration identity and
the Fourier identity for q_{N^2}, both driven by one sample of HSE spectra.
"""
import logging

import numpy as np

from ..config import Config
from ..models import ExperimentConfig, ResultRecord, ResultRow, summarize
from ..services.correlations import (
    CorrelationQuery,
    chi_quadrature,
    disintegration_rhs,
    fourier_rhs,
    gue_correlation,
    hse_correlation_inversion,
    hse_density_at,
    q_fourier,
    q_integral,
)
from . import make_record

logger = logging.getLogger(__name__)

X_GRID = np.arange(-3.0, 3.0 + 1e-9, 0.5)
P_GRID = (0.5, 1.0, 2.0, 4.0)
INVERSION_POINTS = (0.0, 0.5, 1.0)
# Absolute slack for rows whose standard error vanishes
ERROR_FLOOR = 1e-9


def hse_oracle(config: ExperimentConfig, runner, N: int, sigma_ref: float, stream_base: int):
    """Eigenvalues of config.samples HSE matrices on the sphere of reference scale sigma_ref."""
    return runner.estimate(
        "spectra", samples=config.samples, chunk=config.chunk, seed=config.seed, stream_base=stream_base,
        N=N, s=sigma_ref, ensemble="hse",
    )


def within(row: ResultRow, sigmas: float) -> bool:
    return row.abs_error <= sigmas * (row.std_error or 0.0) + ERROR_FLOOR


def max_sigmas(rows) -> float:
    return float(max((row.abs_error / row.std_error for row in rows if row.std_error), default=0.0))


def _mass_row(N: int, s: float) -> ResultRow:
    _, weights = chi_quadrature(N, s)
    mass = float(np.sum(weights))
    return ResultRow("chi-mass", {"N": N, "s": s}, mass, 1.0, abs(mass - 1.0), 0.0)


def run_disintegration(config: ExperimentConfig, runner) -> ResultRecord:
    """Exact R_{1,N}^{GUE,s}(x) against the chi-square mixture of Monte-Carlo HSE densities."""
    N = config.N[0]
    s = config.scale_for(N)
    oracle = hse_oracle(config, runner, N, s, stream_base=0)
    mass = _mass_row(N, s)
    rows = []
    for x in X_GRID:
        exact = gue_correlation(CorrelationQuery((float(x),), N, s))
        rhs = disintegration_rhs([x], N, s, oracle, bins=config.bins)
        rows.append(ResultRow("disintegration", {"N": N, "s": s, "x": float(x)},
                              float(rhs.value), float(exact), float(abs(rhs.value - exact)), rhs.std_error))
    sigmas = Config.TOLERANCES["disintegration"]
    passed = all(within(row, sigmas) for row in rows) and mass.abs_error <= 1e-8
    logger.info("disintegration N=%d s=%.3g: worst deviation %.2f standard errors", N, s, max_sigmas(rows))
    summary = summarize(rows, sigmas, metric="|exact - mixture| in standard errors", passed=passed,
                        max_sigmas=max_sigmas(rows))
    return make_record(config, [mass] + rows, summary)


def run_fourier(config: ExperimentConfig, runner) -> ResultRecord:
    """
    Fourier identity for q_{N^2} at x = 0: total mass (p = 0), transform on a
    p-grid, and for N >= 3 the HSE density recovered by Fourier inversion.
    """
    rows = []
    checks = []
    x = 0.0
    for index, N in enumerate(config.N):
        oracle = hse_oracle(config, runner, N, 1.0 / N, stream_base=index)
        exact = gue_correlation(CorrelationQuery((x,), N, 1.0 / N))
        mass = q_integral([x], N, oracle, bins=config.bins)
        mass_row = ResultRow("q-mass", {"N": N, "p": 0.0, "x": x}, float(mass.value), float(exact),
                             float(abs(mass.value - exact)), mass.std_error)
        rows.append(mass_row)
        checks.append(within(mass_row, Config.TOLERANCES["fourier-mass"]))
        for p in P_GRID:
            lhs = q_fourier(p, [x], N, oracle, bins=config.bins)
            rhs = fourier_rhs(p, [x], N)
            row = ResultRow("q-fourier", {"N": N, "p": p, "x": x}, float(abs(lhs.value)), float(abs(rhs)),
                            float(abs(lhs.value - rhs)), lhs.std_error)
            rows.append(row)
            checks.append(within(row, Config.TOLERANCES["fourier-identity"]))
        if N >= 3:
            for point in INVERSION_POINTS:
                inverted = hse_correlation_inversion([point], N)
                sampled = hse_density_at(point, N, oracle, bins=config.bins)
                row = ResultRow("hse-inversion", {"N": N, "p": "", "x": point}, float(inverted),
                                float(sampled.value), float(abs(inverted - sampled.value)), sampled.std_error)
                rows.append(row)
                checks.append(within(row, Config.TOLERANCES["fourier-inversion"]))
        logger.info("fourier-identity N=%d done", N)
    summary = summarize(rows, Config.TOLERANCES["fourier-identity"], metric="deviation in standard errors",
                        passed=all(checks), max_sigmas=max_sigmas(rows))
    return make_record(config, rows, summary)
