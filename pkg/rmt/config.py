# rmt/config.py
import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()


def _env_float(name, default):
    value = os.getenv(name)
    return float(value) if value not in (None, "") else default


def _env_int(name, default):
    value = os.getenv(name)
    return int(value) if value not in (None, "") else default


class Config:
    BASE_DIR = Path(__file__).resolve().parent.parent  # project root
    OUTPUT_DIR = Path(os.getenv("RMT_OUTPUT_DIR", str(BASE_DIR / "results")))
    LOG_LEVEL = os.getenv("RMT_LOG_LEVEL", "INFO")

    # Defaults table (every entry overridable from the environment)
    N = _env_int("RMT_N", 200)
    SAMPLES = _env_int("RMT_SAMPLES", 20000)
    WINDOW = _env_float("RMT_WINDOW", 3.0)
    BINS = _env_int("RMT_BINS", 24)
    U = _env_float("RMT_U", 0.0)
    SEED = _env_int("RMT_SEED", 20040125)
    WORKERS = _env_int("RMT_WORKERS", 1)
    CHUNK = _env_int("RMT_CHUNK", 250)
    FORMAT = os.getenv("RMT_FORMAT", "json")

    SCHEMA_VERSION = "1.0"

    # Experiment defaults never override a value set through these variables
    ENV_NAMES = {
        "N": "RMT_N",
        "samples": "RMT_SAMPLES",
        "window_A": "RMT_WINDOW",
        "bins": "RMT_BINS",
        "u": "RMT_U",
        "seed": "RMT_SEED",
        "workers": "RMT_WORKERS",
        "chunk": "RMT_CHUNK",
        "format": "RMT_FORMAT",
    }

    # Per-experiment overrides of the table above
    EXPERIMENT_DEFAULTS = {
        "semicircle": {"N": (100,), "samples": 200, "bins": 44, "ensembles": ("gue", "hse")},
        "sine-exact": {"N": (100, 400), "u": (0.0, 0.5, 1.0)},
        "sine-mc": {"N": (100,), "u": (0.0, 1.0), "ensembles": ("hse", "gue")},
        "disintegration": {"N": (2,), "n": 1, "s": 0.5, "samples": 100000, "bins": 160},
        "fourier-identity": {"N": (2, 4), "n": 1, "samples": 100000, "bins": 160},
        "pr-asymptotics": {"N": (100, 200, 400)},
        "identities": {"N": (20,)},
    }

    # Declared tolerances; statistical ones are in standard errors
    TOLERANCES = {
        "sine-exact": 0.05,
        "sine-exact-order2": 0.1,
        "semicircle": 0.05,
        "sine-mc": 0.1,
        "disintegration": 3.0,
        "fourier-mass": 3.0,
        "fourier-identity": 4.0,
        "fourier-inversion": 4.0,
        "pr-bulk-ratio": (0.2, 0.9),
        "pr-exterior": 1e-3,
        "identity-cd-sum": 1e-10,
        "identity-cd-sum-diag-scaled": 1e-10,
        "identity-scaling": 1e-12,
        "identity-reflection": 1e-12,
        "identity-d": 1e-10,
        "identity-continuation": 1e-10,
        "identity-continuation-diag-scaled": 1e-10,
        "identity-char-fn": 1e-12,
        "identity-mass": 1e-4,
        "identity-integral-repr": 1e-6,
    }
