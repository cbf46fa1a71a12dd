"""On-disk layout of a run record.

A record directory holds ``counts/`` (one text file per experiment kind,
grid index and repetition), ``calibration/``, ``results.json``,
``sweep.csv``, ``spectrum.csv`` and ``manifest.json``. The manifest is
written last and lists the sha256 of every other file.
"""

import csv
import hashlib
import io
import json
import logging
import os
import tempfile
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from src.core.exceptions import CorruptRecordError
from src.mitigation.calibration import CalibrationMatrix
from src.noise.model import ReadoutModel
from src.schemas.response import RunRecord, SpectrumRow, SweepRow

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"
RESULTS = "results.json"
SWEEP_CSV = "sweep.csv"
SPECTRUM_CSV = "spectrum.csv"
CALIBRATION_CSV = "calibration/matrix.csv"
CONFUSION_JSON = "calibration/confusion.json"
EXACT_TOL = 1e-9


@dataclass
class CountsFile:
    """One persisted outcome table."""

    kind: str
    phi_index: int | None
    repetition: int
    table: dict[str, float]
    exact: bool


def _format_value(value: float, exact: bool) -> str:
    return repr(float(value)) if exact else str(int(value))


class RecordStore:
    """Reads and writes one record directory."""

    def __init__(self, root: Path) -> None:
        self.root = Path(root)

    def _atomic_write(self, relative: str, text: str) -> None:
        path = self.root / relative
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
                f.write(text)
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise

    @staticmethod
    def counts_name(kind: str, phi_index: int | None, repetition: int) -> str:
        phi = "pop" if phi_index is None else f"phi{phi_index:03d}"
        return f"counts/{kind}_{phi}_rep{repetition:02d}.txt"

    def write_counts(self, item: CountsFile) -> None:
        """Header line, then ``bitstring value`` lines in label order."""
        phi = "none" if item.phi_index is None else str(item.phi_index)
        total = "total=exact" if item.exact else f"shots={int(sum(item.table.values()))}"
        lines = [f"# kind={item.kind} phi_index={phi} repetition={item.repetition} {total}"]
        for label in sorted(item.table):
            lines.append(f"{label} {_format_value(item.table[label], item.exact)}")
        self._atomic_write(
            self.counts_name(item.kind, item.phi_index, item.repetition), "\n".join(lines) + "\n"
        )

    def read_counts(self, path: Path) -> CountsFile:
        """Parse and check one counts file.

        Raises:
            CorruptRecordError: On a malformed header or line, or a total that
                does not match the header
        """
        text = path.read_text(encoding="utf-8").splitlines()
        if not text or not text[0].startswith("# "):
            raise CorruptRecordError(f"{path.name}: missing header", file=path.name)
        try:
            header = dict(field.split("=", 1) for field in text[0][2:].split())
            kind = header["kind"]
            phi_index = None if header["phi_index"] == "none" else int(header["phi_index"])
            repetition = int(header["repetition"])
        except (KeyError, ValueError) as e:
            raise CorruptRecordError(f"{path.name}: bad header {text[0]!r}", file=path.name) from e
        exact = header.get("total") == "exact"
        table: dict[str, float] = {}
        for line in text[1:]:
            parts = line.split()
            if len(parts) != 2:
                raise CorruptRecordError(f"{path.name}: bad line {line!r}", file=path.name)
            try:
                table[parts[0]] = float(parts[1]) if exact else int(parts[1])
            except ValueError as e:
                raise CorruptRecordError(f"{path.name}: bad value {line!r}", file=path.name) from e
        total = sum(table.values())
        if exact:
            if abs(total - 1.0) > EXACT_TOL:
                raise CorruptRecordError(
                    f"{path.name}: probabilities sum to {total}", file=path.name
                )
        elif "shots" not in header or int(header["shots"]) != total:
            raise CorruptRecordError(
                f"{path.name}: {total} counts, header says {header.get('shots')}",
                file=path.name,
            )
        return CountsFile(kind, phi_index, repetition, table, exact)

    def load_counts(self) -> list[CountsFile]:
        directory = self.root / "counts"
        if not directory.is_dir():
            raise CorruptRecordError(f"{self.root} has no counts directory", path=str(self.root))
        return [self.read_counts(p) for p in sorted(directory.glob("*.txt"))]

    def write_calibration(self, calibration: CalibrationMatrix) -> None:
        self._atomic_write(CALIBRATION_CSV, calibration.csv_text())

    def read_calibration(self) -> CalibrationMatrix | None:
        path = self.root / CALIBRATION_CSV
        return CalibrationMatrix.from_csv(path) if path.exists() else None

    def write_confusion(self, readout: ReadoutModel) -> None:
        payload = {"confusion": readout.confusion.tolist()}
        self._atomic_write(CONFUSION_JSON, json.dumps(payload, indent=2))

    def read_confusion(self) -> ReadoutModel | None:
        path = self.root / CONFUSION_JSON
        if not path.exists():
            return None
        data = json.loads(path.read_text(encoding="utf-8"))
        return ReadoutModel(np.array(data["confusion"]))

    def write_results(self, record: RunRecord) -> None:
        self._atomic_write(RESULTS, record.model_dump_json(indent=2))

    def read_results(self) -> RunRecord:
        path = self.root / RESULTS
        if not path.exists():
            raise CorruptRecordError(f"{path} is missing", file=RESULTS)
        return RunRecord.model_validate_json(path.read_text(encoding="utf-8"))

    def _write_rows(self, relative: str, fieldnames: list[str], rows: Iterable[Mapping]) -> None:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: "" if row[k] is None else row[k] for k in fieldnames})
        self._atomic_write(relative, buffer.getvalue())

    def write_sweep_csv(self, rows: list[SweepRow]) -> None:
        self._write_rows(SWEEP_CSV, list(SweepRow.model_fields), (r.model_dump() for r in rows))

    def write_spectrum_csv(self, rows: list[SpectrumRow]) -> None:
        self._write_rows(
            SPECTRUM_CSV, list(SpectrumRow.model_fields), (r.model_dump() for r in rows)
        )

    @staticmethod
    def _digest(path: Path) -> str:
        return hashlib.sha256(path.read_bytes()).hexdigest()

    def _files(self) -> list[Path]:
        return sorted(
            p
            for p in self.root.rglob("*")
            if p.is_file() and p.name != MANIFEST and not p.name.startswith(".")
        )

    def write_manifest(self) -> None:
        """Hash every file in the record; call after everything else is written."""
        files = {p.relative_to(self.root).as_posix(): self._digest(p) for p in self._files()}
        self._atomic_write(MANIFEST, json.dumps({"files": files}, indent=2, sort_keys=True))
        logger.info(f"Wrote record with {len(files)} files to {self.root}")

    def verify_manifest(self) -> None:
        """Raises CorruptRecordError on a missing, extra or modified file."""
        path = self.root / MANIFEST
        if not path.exists():
            raise CorruptRecordError(f"{self.root} has no manifest", path=str(self.root))
        expected = json.loads(path.read_text(encoding="utf-8"))["files"]
        for relative, digest in expected.items():
            file = self.root / relative
            if not file.exists():
                raise CorruptRecordError(f"{relative} is missing", file=relative)
            if self._digest(file) != digest:
                raise CorruptRecordError(f"{relative} does not match the manifest", file=relative)
        actual = {p.relative_to(self.root).as_posix() for p in self._files()}
        extra = sorted(actual - set(expected))
        if extra:
            raise CorruptRecordError(f"files not in the manifest: {extra}", files=extra)
