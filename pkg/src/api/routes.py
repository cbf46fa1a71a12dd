"""API routes."""

from datetime import datetime

import numpy as np
from fastapi import APIRouter, Depends, HTTPException, Query
from fastapi.concurrency import run_in_threadpool

from src.analyzer.fidelity import fidelity_report
from src.analyzer.spectrum import SweepResult, mqc_spectrum
from src.api.dependencies import get_device_manager, get_experiment_runner
from src.circuits.grid import phi_grid
from src.core.config import get_settings
from src.core.exceptions import DeviceNotFoundError, MqcError
from src.data.device_manager import DeviceManager
from src.models.device import DeviceModel
from src.models.experiment import ExperimentSpec
from src.schemas.request import SpectrumRequest
from src.schemas.response import (
    DeviceReport,
    EdgeBudgetRow,
    RunRecord,
    SpectrumResponse,
    SpectrumRow,
)
from src.services.experiment_runner import (
    KIND_GHZ_MQC,
    KIND_PARITY,
    ExperimentRunner,
)

router = APIRouter(prefix="/api")


def _http_error(e: MqcError) -> HTTPException:
    status = 404 if isinstance(e, DeviceNotFoundError) else 400
    return HTTPException(status_code=status, detail=e.to_dict())


@router.get("/devices", response_model=list[str])
async def list_devices(
    device_manager: DeviceManager = Depends(get_device_manager),
) -> list[str]:
    """List all available devices.

    Args:
        device_manager: Device manager dependency

    Returns:
        List of device names
    """
    return device_manager.list_devices()


@router.get("/devices/{name}", response_model=DeviceModel)
async def get_device(
    name: str,
    device_manager: DeviceManager = Depends(get_device_manager),
) -> DeviceModel:
    """Get device parameters.

    Args:
        name: Device name
        device_manager: Device manager dependency

    Returns:
        Device model
    """
    try:
        return device_manager.get_device(name)
    except MqcError as e:
        raise _http_error(e) from e


@router.get("/devices/{name}/error-budget", response_model=list[EdgeBudgetRow])
async def get_error_budget(
    name: str,
    runner: ExperimentRunner = Depends(get_experiment_runner),
) -> list[EdgeBudgetRow]:
    """Coherence-limited and depolarizing parts of each coupler's error."""
    try:
        report: DeviceReport = runner.device_report(name)
    except MqcError as e:
        raise _http_error(e) from e
    return report.edges


async def _run(
    runner: ExperimentRunner, kind: str, spec: ExperimentSpec, persist: bool
) -> RunRecord:
    output = None
    if persist:
        stamp = datetime.now().strftime("%Y%m%d-%H%M%S")
        output = get_settings().output_dir / f"{kind}_n{spec.num_qubits}_seed{spec.seed}_{stamp}"
    try:
        return await run_in_threadpool(runner.run, kind, spec, output)
    except MqcError as e:
        raise _http_error(e) from e


@router.post("/experiments/ghz-mqc", response_model=RunRecord)
async def run_ghz_mqc(
    spec: ExperimentSpec,
    persist: bool = Query(default=False, description="Write a record directory"),
    runner: ExperimentRunner = Depends(get_experiment_runner),
) -> RunRecord:
    """Run an MQC sweep and return its record.

    Args:
        spec: Experiment spec
        persist: Also write the record to the output directory
        runner: Experiment runner dependency

    Returns:
        Run record with sweep, spectrum and fidelity report
    """
    return await _run(runner, KIND_GHZ_MQC, spec, persist)


@router.post("/experiments/parity", response_model=RunRecord)
async def run_parity(
    spec: ExperimentSpec,
    persist: bool = Query(default=False, description="Write a record directory"),
    runner: ExperimentRunner = Depends(get_experiment_runner),
) -> RunRecord:
    """Run a parity oscillation sweep and return its record."""
    return await _run(runner, KIND_PARITY, spec, persist)


@router.post("/analysis/spectrum", response_model=SpectrumResponse)
async def analyze_spectrum(request: SpectrumRequest) -> SpectrumResponse:
    """MQC spectrum and fidelity bounds of a submitted overlap sweep.

    Args:
        request: Overlap values on the 2(n+1)-point grid

    Returns:
        Spectrum over -q_max..q_max and fidelity report
    """
    grid = phi_grid(request.n)
    try:
        sweep = SweepResult(
            grid,
            np.asarray(request.s_values),
            None if request.s_stderr is None else np.asarray(request.s_stderr),
        )
    except MqcError as e:
        raise _http_error(e) from e
    spectrum = mqc_spectrum(sweep)
    rows = [
        SpectrumRow(q=q, i_raw=spectrum.intensity(q), i_raw_stderr=spectrum.stderr(q))
        for q in range(-grid.q_max, grid.q_max + 1)
    ]
    report = fidelity_report(
        spectrum.intensity(0), spectrum.intensity(request.n), spectrum.stderr(request.n)
    )
    return SpectrumResponse(q_max=grid.q_max, spectrum=rows, fidelity=report)
