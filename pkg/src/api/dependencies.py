"""FastAPI dependencies."""

from functools import lru_cache

from src.data.device_manager import DeviceManager
from src.services.experiment_runner import ExperimentRunner


@lru_cache
def get_device_manager() -> DeviceManager:
    """Get cached device manager instance."""
    return DeviceManager()


def get_experiment_runner() -> ExperimentRunner:
    """Get experiment runner instance."""
    return ExperimentRunner(device_manager=get_device_manager())
