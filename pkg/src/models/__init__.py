"""Domain models package."""

from src.models.device import DeviceModel, EdgeProperties, QubitProperties
from src.models.experiment import ExperimentSpec, MitigationMode, MqcVariant, NoiseToggles

__all__ = [
    "DeviceModel",
    "EdgeProperties",
    "ExperimentSpec",
    "MitigationMode",
    "MqcVariant",
    "NoiseToggles",
    "QubitProperties",
]
