# rmt/experiments/__init__.py
"""
Experiment modules.  Each exposes one or more `run_*(config, runner)`
functions returning a ResultRecord; the application factory registers them
by experiment name.
"""
from typing import Dict, List

from ..models import ExperimentConfig, ResultRecord, ResultRow

# Fields that do not change results and stay out of the emitted config echo
NON_RESULT_FIELDS = ("workers", "output_path", "format")


def config_echo(config: ExperimentConfig) -> Dict:
    data = config.to_dict()
    for key in NON_RESULT_FIELDS:
        data.pop(key, None)
    return data


def make_record(config: ExperimentConfig, rows: List[ResultRow], summary: Dict) -> ResultRecord:
    return ResultRecord(config.experiment, config_echo(config), rows, summary)
