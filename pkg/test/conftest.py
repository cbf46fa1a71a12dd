"""Pytest configuration and shared fixtures."""

import numpy as np
import pytest
from src.circuits.plan import auto_plan, linear_plan
from src.core.config import get_settings
from src.data.device_manager import DeviceManager
from src.models.device import DeviceModel


@pytest.fixture(scope="session")
def anyio_backend():
    """Configure anyio backend for async tests."""
    return "asyncio"


@pytest.fixture(autouse=True)
def clear_settings_cache():
    """Drop cached settings so env patches take effect."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture(scope="session")
def device_manager() -> DeviceManager:
    """Device manager over the bundled configs."""
    return DeviceManager()


@pytest.fixture(scope="session")
def device(device_manager: DeviceManager) -> DeviceModel:
    """Bundled 20-qubit device."""
    return device_manager.get_device("ibmq_system_one")


@pytest.fixture
def chain_device() -> DeviceModel:
    """Noise-free 6-qubit chain."""
    return DeviceModel.uniform(6, [(i, i + 1) for i in range(5)], name="chain6")


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for randomised checks."""
    return np.random.default_rng(20240607)


@pytest.fixture
def ghz_plan(device: DeviceModel):
    """Factory for automatic plans on the bundled device."""

    def make(n: int):
        return auto_plan(device, device.entangling_qubits(n))

    return make


@pytest.fixture
def line_plan():
    """Factory for device-free chain plans on qubits 0..n-1."""

    def make(n: int):
        return linear_plan(range(n))

    return make
