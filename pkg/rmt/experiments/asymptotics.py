# rmt/experiments/asymptotics.py
"""Plancherel-Rotach approximations against the direct log-scaled recurrence."""
import logging

import numpy as np

from ..config import Config
from ..models import ExperimentConfig, ResultRecord, ResultRow, summarize
from ..services.hermite import p_pair, phi_scaled, pr_bulk_asymptotic, pr_bulk_envelope, pr_exterior_asymptotic
from . import make_record

logger = logging.getLogger(__name__)

BULK_POINT = 0.3
BULK_WINDOW = 0.02
BULK_SAMPLES = 41
EXTERIOR_POINTS = (2.5, 1.0 + 1.5j, -2.5)


def bulk_error(z: float, N: int) -> float:
    """
    Largest envelope-normalized error of the bulk approximation over
    [z - BULK_WINDOW, z + BULK_WINDOW], which spans several oscillations.
    """
    zs = np.linspace(z - BULK_WINDOW, z + BULK_WINDOW, BULK_SAMPLES)
    exact = np.real(phi_scaled(np.sqrt(2.0 * N) * zs, N, 0.5).values()[1])
    approx = np.array([pr_bulk_asymptotic(zi, N).real for zi in zs])
    envelope = np.array([pr_bulk_envelope(zi, N) for zi in zs])
    return float(np.max(np.abs(approx - exact) / envelope))


def exterior_error(z: complex, N: int):
    """(relative log-magnitude error, phase error) of the exterior approximation of p_N(z sqrt N)."""
    exact = p_pair(z * np.sqrt(N), N).to_log("upper")
    approx = pr_exterior_asymptotic(z, N)
    relative = abs(approx.log_magnitude - exact.log_magnitude) / abs(exact.log_magnitude)
    return float(relative), float(abs(approx.phase - exact.phase)), float(approx.log_magnitude), float(exact.log_magnitude)


def run(config: ExperimentConfig, runner) -> ResultRecord:
    rows = []
    bulk = {}
    for N in config.N:
        err = bulk_error(BULK_POINT, N)
        bulk[N] = err
        rows.append(ResultRow("bulk", {"N": N, "z": str(BULK_POINT)}, err, 0.0, err))
        logger.info("bulk approximation N=%d: envelope-relative error %.3g", N, err)

    low, high = Config.TOLERANCES["pr-bulk-ratio"]
    checks = []
    sizes = sorted(bulk)
    for small, large in zip(sizes, sizes[1:]):
        if large == 2 * small:
            ratio = bulk[large] / bulk[small]
            rows.append(ResultRow("bulk-ratio", {"N": large, "z": str(BULK_POINT)}, ratio, 0.5, abs(ratio - 0.5)))
            checks.append(low <= ratio <= high)

    exterior_rows = []
    for N in config.N:
        for z in EXTERIOR_POINTS:
            relative, phase_error, approx, exact = exterior_error(z, N)
            row = ResultRow("exterior", {"N": N, "z": str(complex(z))}, approx, exact, relative)
            exterior_rows.append(row)
            checks.append(relative <= Config.TOLERANCES["pr-exterior"])
            if complex(z).imag == 0:
                # sign of p_N on the real axis, including the parity (-1)^N for z < -2
                checks.append(phase_error < 1e-12)
    rows.extend(exterior_rows)
    summary = summarize(exterior_rows, Config.TOLERANCES["pr-exterior"], metric="relative log-magnitude error",
                        passed=all(checks), bulk_ratio_bounds=[low, high])
    return make_record(config, rows, summary)
