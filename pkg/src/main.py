"""FastAPI application entry point."""

import logging
from collections.abc import AsyncIterator
from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from src.api.dependencies import get_device_manager, get_experiment_runner
from src.api.routes import router
from src.core.config import get_settings
from src.core.logging import configure_logging
from src.noise.density import MAX_DENSITY_QUBITS
from src.simulator.statevector import MAX_QUBITS

settings = get_settings()
configure_logging(settings.log_level)
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(_: FastAPI) -> AsyncIterator[None]:
    manager = get_device_manager()
    logger.info(f"Devices in {manager.data_dir}: {', '.join(manager.list_devices()) or 'none'}")
    yield


app = FastAPI(
    title="GHZ MQC API",
    description="Simulated GHZ multiple-quantum-coherence experiments and analysis",
    version=settings.app_version,
    docs_url="/docs" if settings.debug or settings.app_env == "development" else None,
    redoc_url="/redoc" if settings.debug or settings.app_env == "development" else None,
    lifespan=lifespan,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.cors_origins_list,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(router)


@app.get("/health")
async def health_check() -> dict:
    """Health check with the simulator limits in effect.

    Returns:
        Status, version and the largest exact statevector / density sizes
    """
    return {
        "status": "healthy",
        "version": settings.app_version,
        "environment": settings.app_env,
        "default_device": settings.default_device,
        "limits": {
            "statevector_qubits": MAX_QUBITS,
            "density_qubits": MAX_DENSITY_QUBITS,
        },
    }


# Re-export for dependency injection in tests
__all__ = ["app", "get_experiment_runner"]
