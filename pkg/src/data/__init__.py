"""Data access layer for device configs."""

from src.data.device_manager import DeviceManager

__all__ = ["DeviceManager"]
