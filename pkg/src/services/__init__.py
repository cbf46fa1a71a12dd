"""Services package: experiment runner and record persistence."""

from src.services.experiment_runner import (
    ExperimentRunner,
    ReplayResult,
    analyze_record,
    cmd_device_report,
    cmd_ghz_mqc,
    cmd_mitigation_study,
    cmd_parity,
    cmd_replay,
)
from src.services.record_store import CountsFile, RecordStore

__all__ = [
    "CountsFile",
    "ExperimentRunner",
    "RecordStore",
    "ReplayResult",
    "analyze_record",
    "cmd_device_report",
    "cmd_ghz_mqc",
    "cmd_mitigation_study",
    "cmd_parity",
    "cmd_replay",
]
