"""Saved reports and exact sidecars.

Every file is a JSON envelope: ``{"metadata": {...}, "data": <result>}``. The
metadata records the command, its parameters, the flagcert version and where
the file was written, so a report can be traced back to the run that made it.
"""

import hashlib
import json
from datetime import datetime, timezone
from importlib.metadata import version
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field, ValidationError

from flagcert.config import DEFAULT_STORAGE_DIR
from flagcert.errors import ArgumentError


class ReportMetadata(BaseModel):
    command: str
    params: dict[str, Any] = Field(default_factory=dict)
    flagcert: str = Field(description="Version that wrote the report")
    created: str = Field(description="UTC time, ISO 8601 with a Z suffix")
    path: str


class StoredReport(BaseModel):
    metadata: ReportMetadata
    data: Any


def write_output(path: str | Path, text: str) -> Path:
    """Write ``text`` to ``path``, creating parent directories.

    Raises:
        ArgumentError: If the destination cannot be written.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as e:
        raise ArgumentError(f"Cannot write {path}: {e.strerror or e}")
    return path


def report_name(command: str, params: dict[str, Any], created: datetime) -> str:
    """``<command>_<params digest>_<UTC stamp>.json``; equal params share a digest."""
    digest = hashlib.sha256(json.dumps(params, sort_keys=True, default=str).encode()).hexdigest()[:8]
    return f"{command}_{digest}_{created:%Y%m%dT%H%M%SZ}.json"


def store_report(
    command: str,
    params: dict[str, Any],
    data: Any,
    output_path: str | Path | None = None,
    storage_dir: Path | None = None,
) -> tuple[Path, StoredReport]:
    """Write ``data`` inside a metadata envelope.

    Args:
        command: Command that produced the data, e.g. ``verify``
        params: Parameters the command ran with
        data: JSON-serialisable result; exact values are already ``num/den`` strings
        output_path: Explicit destination; otherwise a generated name in ``storage_dir``
        storage_dir: Directory for generated names (default: the per-user temp directory)

    Returns:
        The written path and the stored envelope.

    Raises:
        ArgumentError: If the destination cannot be written.
    """
    created = datetime.now(timezone.utc)
    if output_path:
        path = Path(output_path)
    else:
        path = Path(storage_dir or DEFAULT_STORAGE_DIR) / report_name(command, params, created)

    report = StoredReport(
        metadata=ReportMetadata(
            command=command,
            params=params,
            flagcert=version("flagcert"),
            created=created.isoformat().replace("+00:00", "Z"),
            path=str(path),
        ),
        data=data,
    )
    write_output(path, json.dumps(report.model_dump(), indent=2, default=str) + "\n")
    return path, report


def read_report(path: str | Path) -> StoredReport:
    """Load a report written by :func:`store_report`.

    Raises:
        ArgumentError: If the file is missing, not JSON, or not an envelope.
    """
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ArgumentError(f"Cannot read {path}: {e.strerror or e}")
    try:
        return StoredReport.model_validate_json(text)
    except ValidationError as e:
        raise ArgumentError(f"{path} is not a flagcert report: {e.errors()[0]['msg']}")
