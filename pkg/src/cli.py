"""Command line interface.

Subcommands: ghz-mqc, parity, mitigation-study, replay, device-report.
Errors print ``{"error": ..., "message": ..., "details": ...}`` and exit
with code 2; unexpected failures exit with code 1.
"""

import argparse
import json
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from src.core.config import get_settings
from src.core.exceptions import MqcError
from src.core.logging import configure_logging
from src.models.experiment import ExperimentSpec, MitigationMode, MqcVariant, NoiseToggles
from src.schemas.response import RunRecord
from src.services.experiment_runner import (
    KIND_GHZ_MQC,
    KIND_MITIGATION_STUDY,
    KIND_PARITY,
    cmd_device_report,
    cmd_ghz_mqc,
    cmd_mitigation_study,
    cmd_parity,
    cmd_replay,
)

logger = logging.getLogger(__name__)

EXIT_ERROR = 2
EXIT_UNEXPECTED = 1


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def _add_experiment_args(parser: argparse.ArgumentParser) -> None:
    settings = get_settings()
    size = parser.add_mutually_exclusive_group(required=True)
    size.add_argument("--qubits", type=_int_list, help="Physical qubits, root first (e.g. 5,10,6)")
    size.add_argument("--n", type=int, help="GHZ size; qubits chosen from the device")
    parser.add_argument("--device", default=settings.default_device, help="Device name or JSON path")
    parser.add_argument("--root", type=int, default=None, help="Root qubit")
    parser.add_argument(
        "--variant", choices=[v.value for v in MqcVariant], default=MqcVariant.GHZ.value
    )
    parser.add_argument("--refocus", action="store_true", help="Insert the refocusing pi layer")
    parser.add_argument("--shots", type=int, default=settings.default_shots)
    parser.add_argument("--repetitions", type=int, default=settings.default_repetitions)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--mitigation", choices=[m.value for m in MitigationMode], default=MitigationMode.NONE.value
    )
    parser.add_argument("--k", type=int, default=settings.truncation_k, help="Truncation size")
    parser.add_argument("--calibration-shots", type=int, default=settings.calibration_shots)
    parser.add_argument("--no-gate-noise", action="store_true")
    parser.add_argument("--no-idle-noise", action="store_true")
    parser.add_argument("--drift", type=float, default=0.0, help="Drift sigma (rad/ns)")
    parser.add_argument("--no-readout", action="store_true", help="Perfect readout")
    parser.add_argument("--exact", action="store_true", help="Exact probabilities, no sampling")
    parser.add_argument("--output", type=Path, default=None, help="Record directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghz-mqc",
        description="Simulate and analyse GHZ multiple-quantum-coherence experiments",
    )
    parser.add_argument("--log-level", default=None, help="Logging level")
    sub = parser.add_subparsers(dest="command", required=True)

    _add_experiment_args(sub.add_parser("ghz-mqc", help="MQC sweep, spectrum and fidelity"))
    _add_experiment_args(sub.add_parser("parity", help="Parity oscillation fidelity"))
    study = sub.add_parser("mitigation-study", help="Convergence against calibration size")
    _add_experiment_args(study)
    study.add_argument(
        "--k-values", type=_int_list, default=None, help="Ascending truncation sizes (1,2,4,...)"
    )

    replay = sub.add_parser("replay", help="Recompute a record from its counts")
    replay.add_argument("record", type=Path, help="Record directory")
    replay.add_argument(
        "--mitigation", choices=[m.value for m in MitigationMode], default=None
    )

    report = sub.add_parser("device-report", help="Qubit table and coupler error budget")
    report.add_argument("--device", default=get_settings().default_device)
    return parser


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    """Translate parsed flags into an experiment spec."""
    fields: dict[str, Any] = {
        "device": args.device,
        "qubits": args.qubits,
        "n": args.n,
        "root": args.root,
        "variant": args.variant,
        "refocus": args.refocus,
        "shots": args.shots,
        "repetitions": args.repetitions,
        "seed": args.seed,
        "mitigation": args.mitigation,
        "truncation_k": args.k,
        "calibration_shots": args.calibration_shots,
        "exact": args.exact,
        "noise": NoiseToggles(
            gates=not args.no_gate_noise,
            idle=not args.no_idle_noise,
            drift_sigma=args.drift,
            readout=not args.no_readout,
        ),
    }
    if getattr(args, "k_values", None):
        fields["k_values"] = args.k_values
    return ExperimentSpec(**fields)


def _default_output(kind: str, spec: ExperimentSpec) -> Path:
    stamp = datetime.now().strftime("%Y%m%d-%H%M%S")
    return get_settings().output_dir / f"{kind}_n{spec.num_qubits}_seed{spec.seed}_{stamp}"


def _summary(record: RunRecord, output: Path) -> dict[str, Any]:
    summary: dict[str, Any] = {"kind": record.kind, "record": str(output), "qubits": record.qubits}
    for name in ("fidelity", "fidelity_mitigated", "parity", "parity_mitigated"):
        value = getattr(record, name)
        if value is not None:
            summary[name] = value.model_dump()
    if record.convergence is not None:
        summary["convergence"] = [row.model_dump() for row in record.convergence]
    return summary


def _run(args: argparse.Namespace) -> dict[str, Any]:
    if args.command == "device-report":
        return cmd_device_report(args.device).model_dump(mode="json")
    if args.command == "replay":
        mitigation = MitigationMode(args.mitigation) if args.mitigation else None
        result = cmd_replay(args.record, mitigation)
        return {
            "record": str(args.record),
            "matches": result.matches,
            "mitigation_override": result.mitigation_override,
            "differing_fields": result.mismatches,
        }

    spec = spec_from_args(args)
    commands = {
        "ghz-mqc": (KIND_GHZ_MQC, cmd_ghz_mqc),
        "parity": (KIND_PARITY, cmd_parity),
        "mitigation-study": (KIND_MITIGATION_STUDY, cmd_mitigation_study),
    }
    kind, command = commands[args.command]
    output = args.output or _default_output(kind, spec)
    record = command(spec, output)
    return _summary(record, output)


def main(argv: list[str] | None = None) -> int:
    """Entry point of the ``ghz-mqc`` console script."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level or get_settings().log_level)
    try:
        result = _run(args)
    except MqcError as e:
        logger.error(f"{e.error_code}: {e}")
        print(json.dumps(e.to_dict()))
        return EXIT_ERROR
    except ValidationError as e:
        payload = {
            "error": "invalid_spec",
            "message": "experiment spec failed validation",
            "details": {"errors": json.loads(e.json())},
        }
        print(json.dumps(payload))
        return EXIT_ERROR
    except Exception as e:  # noqa: BLE001
        logger.exception("Unexpected failure")
        print(json.dumps({"error": "unexpected", "message": str(e), "details": {}}))
        return EXIT_UNEXPECTED
    print(json.dumps(result, indent=2, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
