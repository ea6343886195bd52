# rmt/app.py
"""
Experiment runner: the registry of experiments, the process pool that runs
Monte-Carlo blocks, and the `rmt` command line.
"""
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from functools import reduce
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple

import click
from rich.console import Console
from rich.table import Table

# When executed directly (python rmt/app.py) sys.path[0] is rmt/, which
# hides the package itself; put the project root on the path instead.
if __package__ in (None, ""):
    project_root = str(Path(__file__).resolve().parent.parent)
    if project_root not in sys.path:
        sys.path.insert(0, project_root)

from rmt.config import Config
from rmt.errors import RMTError
from rmt.models import EXPERIMENTS, ExperimentConfig, ResultRecord, emit
from rmt.services.ensembles import (
    RngStream,
    block_plan,
    estimate_density,
    estimate_pair_correlation,
    merge_estimates,
    merge_spectra,
    sample_spectra,
)

logger = logging.getLogger("rmt")

# Stream ids of different estimates inside one experiment never overlap
STREAMS_PER_ESTIMATE = 1 << 32


def _run_block(job: Tuple[str, int, int, int, Dict]):
    """Worker entry point: one block of `count` samples drawn from stream `stream_id`."""
    kind, seed, stream_id, count, params = job
    rng = RngStream(seed, stream_id)
    if kind == "density":
        return estimate_density(params["N"], params["s"], count, params["grid"], rng, params["ensemble"])
    if kind == "pair":
        return estimate_pair_correlation(params["N"], params["s"], params["u"], params["window_A"],
                                         params["bins"], count, rng, params["ensemble"])
    if kind == "spectra":
        return sample_spectra(params["N"], params["s"], count, rng, params["ensemble"])
    raise ValueError(f"unknown estimate kind {kind!r}")


class Runner:
    """Holds the registered experiments and fans Monte-Carlo blocks out to worker processes."""

    def __init__(self, workers: int = 1):
        self.workers = workers
        self.experiments: Dict[str, Callable] = {}

    def register(self, name: str, run: Callable) -> None:
        self.experiments[name] = run

    def estimate(self, kind: str, *, samples: int, chunk: int, seed: int, stream_base: int = 0, **params):
        """
        Run `samples` draws as fixed blocks of `chunk` samples, block k on stream
        stream_base * 2^32 + k, and merge the blocks in plan order.

        The block partition depends only on (samples, chunk), so merged
        tallies and concatenated spectra are identical for any number of workers.
        """
        plan = block_plan(samples, chunk)
        jobs = [(kind, seed, stream_base * STREAMS_PER_ESTIMATE + stream_id, count, params)
                for stream_id, count in plan]
        logger.debug("%s estimate: %d blocks on %d worker(s)", kind, len(jobs), self.workers)
        if self.workers == 1 or len(jobs) == 1:
            parts = [_run_block(job) for job in jobs]
        else:
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                parts = list(pool.map(_run_block, jobs))
        return reduce(merge_spectra if kind == "spectra" else merge_estimates, parts)

    def run(self, config: ExperimentConfig) -> ResultRecord:
        if config.experiment not in self.experiments:
            raise RMTError(f"experiment {config.experiment!r} is not registered")
        logger.info("running %s (N=%s, samples=%d, seed=%d, workers=%d)",
                    config.experiment, list(config.N), config.samples, config.seed, self.workers)
        started = time.perf_counter()
        record = self.experiments[config.experiment](config, self)
        record.wall_clock = time.perf_counter() - started
        logger.info("%s finished in %.1fs: %s", config.experiment, record.wall_clock,
                    "passed" if record.passed else "FAILED")
        return record


def create_runner(workers: int = 1) -> Runner:
    runner = Runner(workers)

    from rmt.experiments import asymptotics, disintegration, identities, semicircle, sine

    runner.register("semicircle", semicircle.run)
    runner.register("sine-exact", sine.run_exact)
    runner.register("sine-mc", sine.run_mc)
    runner.register("disintegration", disintegration.run_disintegration)
    runner.register("fourier-identity", disintegration.run_fourier)
    runner.register("pr-asymptotics", asymptotics.run)
    runner.register("identities", identities.run)
    return runner


def default_output_path(config: ExperimentConfig) -> Path:
    return Config.OUTPUT_DIR / f"{config.experiment}.{config.format}"


def run(config: ExperimentConfig) -> ResultRecord:
    """Validate, execute and (when an output path is set) write one experiment."""
    config.validate()
    record = create_runner(config.workers).run(config)
    if config.output_path:
        emit(record, config.output_path, config.format)
        logger.info("wrote %s", config.output_path)
    return record


def configure_logging(level: str = Config.LOG_LEVEL) -> None:
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def print_summary(record: ResultRecord, console: Optional[Console] = None) -> None:
    console = console or Console()
    table = Table(title=f"{record.experiment} ({record.wall_clock:.1f}s)")
    for column in ("metric", "max error", "tolerance", "result"):
        table.add_column(column)
    summary = record.summary
    table.add_row(
        str(summary.get("metric", "")),
        f"{summary.get('max_error', float('nan')):.4g}",
        str(summary.get("tolerance", "")),
        "[green]pass[/]" if record.passed else "[red]FAIL[/]",
    )
    console.print(table)


@click.command(name="rmt", context_settings={"help_option_names": ["-h", "--help"]})
@click.argument("experiment", type=click.Choice(EXPERIMENTS))
@click.option("--n", "N", type=int, multiple=True, help="Matrix size; repeat for several sizes.")
@click.option("--samples", type=int, default=None, help="Monte-Carlo sample count.")
@click.option("--seed", type=int, default=None, help="64-bit seed of the random streams.")
@click.option("--u", "u", type=float, multiple=True, help="Bulk point in (-2, 2); repeatable.")
@click.option("--window", "window_A", type=float, default=None, help="Half-width A of the rescaled window.")
@click.option("--bins", type=int, default=None, help="Histogram bins.")
@click.option("--workers", type=int, default=None, help="Worker processes for Monte-Carlo blocks.")
@click.option("--chunk", type=int, default=None, help="Samples per random stream block.")
@click.option("--s", "s", type=float, default=None, help="GUE scale s (default 1/N).")
@click.option("--order", "n", type=int, default=None, help="Correlation order n.")
@click.option("--ensemble", "ensembles", type=click.Choice(["gue", "hse"]), multiple=True, help="Ensemble; repeatable.")
@click.option("--out", "output_path", type=click.Path(dir_okay=False), default=None, help="Output file.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None, help="Output format.")
@click.option("--log-level", default=Config.LOG_LEVEL, show_default=True, help="Logging level.")
@click.pass_context
def main(ctx, experiment, N, samples, seed, u, window_A, bins, workers, chunk, s, n, ensembles, output_path, fmt, log_level):
    """Run one EXPERIMENT; exit status 0 when every declared tolerance is met, 1 otherwise, 2 on errors."""
    configure_logging(log_level)
    try:
        config = ExperimentConfig.from_defaults(
            experiment, N=N, samples=samples, seed=seed, u=u, window_A=window_A, bins=bins,
            workers=workers, chunk=chunk, s=s, n=n, ensembles=ensembles, format=fmt,
        )
        if output_path is None:
            output_path = str(default_output_path(config))
        config = ExperimentConfig.from_dict({**config.to_dict(), "output_path": output_path})
        record = run(config)
    except RMTError as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(2)
    print_summary(record)
    click.echo(f"results written to {config.output_path}")
    ctx.exit(0 if record.passed else 1)


if __name__ == "__main__":
    main()
