# rmt/models.py
"""
Experiment configuration and result records, plus the helpers that persist
them.  Output files carry no timing information, so identical configs give
byte-identical files.
"""
import csv
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .config import Config
from .errors import ConfigError

EXPERIMENTS = (
    "semicircle",
    "sine-exact",
    "sine-mc",
    "disintegration",
    "fourier-identity",
    "pr-asymptotics",
    "identities",
)
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    N: Tuple[int, ...] = (Config.N,)
    n: int = 1
    u: Tuple[float, ...] = (Config.U,)
    window_A: float = Config.WINDOW
    bins: int = Config.BINS
    samples: int = Config.SAMPLES
    seed: int = Config.SEED
    workers: int = Config.WORKERS
    s: Optional[float] = None  # None means s = 1/N
    output_path: Optional[str] = None
    format: str = Config.FORMAT
    ensembles: Tuple[str, ...] = ("gue",)
    chunk: int = Config.CHUNK

    @classmethod
    def from_defaults(cls, experiment: str, **overrides) -> "ExperimentConfig":
        """Global defaults, then the experiment's own defaults, then explicit (non-None) overrides."""
        if experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {experiment!r}; choose one of {', '.join(EXPERIMENTS)}")
        values = {
            key: value
            for key, value in Config.EXPERIMENT_DEFAULTS.get(experiment, {}).items()
            if not os.getenv(Config.ENV_NAMES.get(key, ""), "")
        }
        values.update({key: value for key, value in overrides.items() if value is not None and value != ()})
        for key in ("N", "u", "ensembles"):
            if key in values and not isinstance(values[key], (tuple, list)):
                values[key] = (values[key],)
            if key in values:
                values[key] = tuple(values[key])
        config = cls(experiment=experiment, **values)
        config.validate()
        return config

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if not self.N or any(int(N) != N or N < 1 for N in self.N):
            raise ConfigError(f"matrix sizes must be positive integers, got {self.N}")
        if self.n < 1 or self.n > 2:
            raise ConfigError(f"correlation order must be 1 or 2, got {self.n}")
        if not self.u or any(not -2.0 < u < 2.0 for u in self.u):
            raise ConfigError(f"bulk points must lie in (-2, 2), got {self.u}")
        if not self.window_A > 0:
            raise ConfigError("window must be positive")
        if self.bins < 1 or self.samples < 1 or self.workers < 1 or self.chunk < 1:
            raise ConfigError("bins, samples, workers and chunk must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.s is not None and not self.s > 0:
            raise ConfigError("scale s must be positive")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if not self.ensembles or any(e not in ("gue", "hse") for e in self.ensembles):
            raise ConfigError(f"ensembles must be drawn from gue, hse; got {self.ensembles}")

    def scale_for(self, N: int) -> float:
        return self.s if self.s is not None else 1.0 / N

    def to_dict(self) -> Dict:
        data = asdict(self)
        for key in ("N", "u", "ensembles"):
            data[key] = list(data[key])
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        values = {key: value for key, value in data.items() if key in known}
        for key in ("N", "u", "ensembles"):
            if key in values:
                values[key] = tuple(values[key])
        return cls(**values)


@dataclass(frozen=True)
class ResultRow:
    case: str
    inputs: Dict[str, Union[float, int, str]]
    value: float
    reference: float
    abs_error: float
    std_error: Optional[float] = None

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass
class ResultRecord:
    experiment: str
    config: Dict
    rows: List[ResultRow] = field(default_factory=list)
    summary: Dict = field(default_factory=dict)
    schema_version: str = Config.SCHEMA_VERSION
    wall_clock: float = field(default=0.0, compare=False)

    @property
    def passed(self) -> bool:
        return bool(self.summary.get("passed", False))

    def to_dict(self) -> Dict:
        return {
            "schema_version": self.schema_version,
            "experiment": self.experiment,
            "config": self.config,
            "rows": [row.to_dict() for row in self.rows],
            "summary": self.summary,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "ResultRecord":
        rows = [ResultRow(**row) for row in data.get("rows", [])]
        return cls(data["experiment"], data["config"], rows, data.get("summary", {}), data.get("schema_version", Config.SCHEMA_VERSION))


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float) or (hasattr(value, "dtype") and value.dtype.kind == "f"):
        value = float(value)
        return format(value, ".17g") if math.isfinite(value) else str(value)
    return str(value)


def csv_header(record: ResultRecord) -> List[str]:
    input_keys: List[str] = []
    for row in record.rows:
        for key in row.inputs:
            if key not in input_keys:
                input_keys.append(key)
    return ["case", *input_keys, "value", "reference", "abs_error", "std_error"]


def emit(record: ResultRecord, path: Union[str, Path], fmt: str = "json") -> Path:
    """
    Write a record as CSV (one row per point, 17 significant digits) or JSON (sorted keys).

    Returns:
        The path written.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path.write_text(json.dumps(record.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8")
        return path
    if fmt != "csv":
        raise ConfigError(f"unsupported output format {fmt!r}")
    header = csv_header(record)
    input_keys = header[1:-4]
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in record.rows:
            writer.writerow(
                [row.case]
                + [_cell(row.inputs.get(key)) for key in input_keys]
                + [_cell(row.value), _cell(row.reference), _cell(row.abs_error), _cell(row.std_error)]
            )
    return path


def load_record(path: Union[str, Path]) -> ResultRecord:
    """Read back a JSON record written by emit."""
    return ResultRecord.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def summarize(rows: List[ResultRow], tolerance, metric: str, passed: Optional[bool] = None, **extra) -> Dict:
    """Summary block: largest error, declared tolerance and the mechanical pass flag."""
    errors = [row.abs_error for row in rows if row.abs_error is not None]
    max_error = max(errors) if errors else 0.0
    if passed is None:
        passed = bool(max_error <= tolerance)
    if isinstance(tolerance, tuple):
        tolerance = list(tolerance)
    summary = {"max_error": float(max_error), "tolerance": tolerance, "metric": metric, "passed": bool(passed)}
    summary.update(extra)
    return summary
