"""Device configuration management module."""

import json
import logging
from functools import lru_cache
from pathlib import Path
from typing import Any

from src.core.config import get_settings
from src.core.exceptions import DeviceNotFoundError
from src.models.device import DeviceModel

logger = logging.getLogger(__name__)


class DeviceManager:
    """Manages device configs stored as JSON files."""

    def __init__(self, data_dir: Path | None = None) -> None:
        """Initialize device manager.

        Args:
            data_dir: Directory containing device JSON files.
                     Defaults to the configured devices_dir, then to
                     config/devices/ relative to project root.
        """
        if data_dir is None:
            data_dir = get_settings().devices_dir
        if data_dir is None:
            # Find project root by looking for pyproject.toml
            current = Path(__file__).resolve()
            for parent in current.parents:
                if (parent / "pyproject.toml").exists():
                    data_dir = parent / "config" / "devices"
                    break
            else:
                data_dir = Path(__file__).parent.parent.parent / "config" / "devices"

        self._data_dir = Path(data_dir)
        self._cache: dict[str, DeviceModel] = {}

    @property
    def data_dir(self) -> Path:
        return self._data_dir

    def list_devices(self) -> list[str]:
        """List all available device names.

        Returns:
            Sorted device names (e.g., ["ibmq_system_one"])
        """
        names = []
        for file_path in self._data_dir.glob("*.json"):
            if file_path.stem.startswith("_"):
                continue  # Skip template files
            names.append(file_path.stem)
        return sorted(names)

    def get_device(self, name: str) -> DeviceModel:
        """Get a validated device by name or by path to a JSON file.

        Args:
            name: Device name (case insensitive) or a path ending in .json

        Returns:
            Validated device model

        Raises:
            DeviceNotFoundError: If no config exists for the name
            pydantic.ValidationError: If the config is malformed
        """
        if name.endswith(".json"):
            return self.load_path(Path(name))

        key = name.lower()
        if key in self._cache:
            return self._cache[key]

        file_path = self._data_dir / f"{key}.json"
        if not file_path.exists():
            raise DeviceNotFoundError(name)

        device = DeviceModel.model_validate(self._load_json(file_path))
        logger.info(f"Loaded device {device.name} ({device.num_qubits} qubits)")
        self._cache[key] = device
        return device

    def load_path(self, file_path: Path) -> DeviceModel:
        """Load a device config from an explicit path.

        Raises:
            DeviceNotFoundError: If the file does not exist
        """
        if not file_path.exists():
            raise DeviceNotFoundError(str(file_path))
        return DeviceModel.model_validate(self._load_json(file_path.resolve()))

    @staticmethod
    @lru_cache(maxsize=32)
    def _load_json(file_path: Path) -> dict[str, Any]:
        """Load and cache JSON file.

        Args:
            file_path: Path to JSON file

        Returns:
            Parsed JSON data
        """
        with open(file_path, encoding="utf-8") as f:
            return json.load(f)
