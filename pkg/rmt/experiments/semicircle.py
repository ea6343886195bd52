# rmt/experiments/semicircle.py
"""Empirical eigenvalue densities of GUE and HSE against the semicircle law."""
import logging

import numpy as np

from ..config import Config
from ..models import ExperimentConfig, ResultRecord, ResultRow, summarize
from ..services.geometry import wigner_cdf
from . import make_record

logger = logging.getLogger(__name__)

GRID_HALF_WIDTH = 2.2


def unit_density(estimate):
    """(centers, values, std errors, bin-averaged semicircle) in units where the limit lives on [-2, 2]."""
    unit = np.sqrt(estimate.s * estimate.N)
    reference = np.diff(wigner_cdf(estimate.edges / unit)) / (estimate.width / unit)
    return estimate.centers / unit, estimate.values() * unit, estimate.std_errors() * unit, reference


def l1_distance(estimate) -> float:
    """L1 distance to the bin-averaged semicircle, plus the mass that fell outside the grid."""
    _, values, _, reference = unit_density(estimate)
    unit = np.sqrt(estimate.s * estimate.N)
    outside_mass = estimate.outside / (estimate.samples * estimate.N)
    return float(np.sum(np.abs(values - reference)) * estimate.width / unit + outside_mass)


def run(config: ExperimentConfig, runner) -> ResultRecord:
    rows = []
    distance_rows = []
    cases = [(N, ensemble) for N in config.N for ensemble in config.ensembles]
    for index, (N, ensemble) in enumerate(cases):
        s = config.scale_for(N)
        half = GRID_HALF_WIDTH * np.sqrt(s * N)
        estimate = runner.estimate(
            "density", samples=config.samples, chunk=config.chunk, seed=config.seed, stream_base=index,
            N=N, s=s, grid=(-half, half, config.bins), ensemble=ensemble,
        )
        for x, value, err, ref in zip(*unit_density(estimate)):
            rows.append(ResultRow(f"{ensemble}-density", {"ensemble": ensemble, "N": N, "x": float(x)},
                                  float(value), float(ref), float(abs(value - ref)), float(err)))
        distance = l1_distance(estimate)
        _, _, errors, _ = unit_density(estimate)
        spread = float(np.sqrt(np.sum((errors * estimate.width / np.sqrt(s * N)) ** 2)))
        logger.info("semicircle %s N=%d: L1 distance %.4f", ensemble, N, distance)
        distance_rows.append(ResultRow(f"{ensemble}-l1", {"ensemble": ensemble, "N": N},
                                       distance, 0.0, distance, spread))
    summary = summarize(distance_rows, Config.TOLERANCES["semicircle"], metric="L1 distance to the semicircle")
    return make_record(config, rows + distance_rows, summary)
