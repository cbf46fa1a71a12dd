"""Schemas package for records, reports and requests."""

from src.schemas.request import SpectrumRequest
from src.schemas.response import (
    ConvergenceEntry,
    DeviceReport,
    EdgeBudgetRow,
    HistogramReport,
    ParityReport,
    PopulationRow,
    QubitRow,
    RunRecord,
    SpectrumResponse,
    SpectrumRow,
    SweepRow,
)

__all__ = [
    "ConvergenceEntry",
    "DeviceReport",
    "EdgeBudgetRow",
    "HistogramReport",
    "ParityReport",
    "PopulationRow",
    "QubitRow",
    "RunRecord",
    "SpectrumRequest",
    "SpectrumResponse",
    "SpectrumRow",
    "SweepRow",
]
