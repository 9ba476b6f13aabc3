"""Plain-text file formats, run records and atomic writes.

All artifacts are structured text: witness bundles and result reports are
JSON (floats rendered with 17 significant digits, which round-trips IEEE
doubles exactly), circuit specifications are JSON Lines with one record
per (x, y) pair, and counts are strict ``x,y,b,count`` CSV with 1-based
indices.  Result reports embed a run record (command, options, seeds,
timestamp, input hashes); the data-interchange files (circuits, counts)
stay free of metadata so equal seeds give byte-identical files.
"""

from __future__ import annotations

import hashlib
import os
import json
import tempfile
import time
from dataclasses import asdict, dataclass
from datetime import datetime, timezone

import numpy as np

from .builder import WitnessBundle, bundle_from_dict, bundle_to_dict
from .simulate import CircuitEntry, StatTable

try:
    from importlib.metadata import version as _pkg_version

    PACKAGE_VERSION = _pkg_version("pmst")
except Exception:  # pragma: no cover - metadata missing in odd installs
    PACKAGE_VERSION = "0.1.0"


def format_float(value: float) -> str:
    """Render a float with 17 significant digits (exact round-trip)."""
    if not np.isfinite(value):
        raise ValueError(f"cannot serialize non-finite value {value}")
    return format(float(value), ".17g")


def _is_scalar(value) -> bool:
    return value is None or isinstance(
        value, (bool, int, float, str, np.integer, np.floating)
    )


def _render_scalar(value) -> str:
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return json.dumps(value)


def render_json(value, indent: int = 0) -> str:
    """Serialize to JSON text with 17-significant-digit floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if _is_scalar(value):
        return _render_scalar(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(key))}: {render_json(item, indent + 1)}"
            for key, item in value.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if all(_is_scalar(item) for item in value):
            return "[" + ", ".join(_render_scalar(item) for item in value) + "]"
        items = [f"{inner}{render_json(item, indent + 1)}" for item in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def render_json_line(value) -> str:
    """Single-line JSON with 17-significant-digit floats."""
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if _is_scalar(value):
        return _render_scalar(value)
    if isinstance(value, dict):
        return (
            "{"
            + ", ".join(
                f"{json.dumps(str(k))}: {render_json_line(v)}" for k, v in value.items()
            )
            + "}"
        )
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(render_json_line(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def write_text_atomic(path: str, text: str) -> None:
    """Write via a temporary file and rename, so readers never see partials."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".pmst-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def sha256_of_path(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


@dataclass(frozen=True)
class RunRecord:
    """Provenance embedded in result files.

    ``created_at`` honors SOURCE_DATE_EPOCH for reproducible output;
    ``inputs`` maps consumed file names to their SHA-256 digests.
    """

    command: str
    options: dict
    seed: int | None
    created_at: str
    inputs: dict
    package_version: str


def make_run_record(command: str, options: dict, seed: int | None = None,
                    inputs: dict | None = None) -> RunRecord:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    stamp = int(epoch) if epoch else time.time()
    created = datetime.fromtimestamp(stamp, tz=timezone.utc).isoformat()
    return RunRecord(
        command=command,
        options=dict(options),
        seed=seed,
        created_at=created,
        inputs=dict(inputs or {}),
        package_version=PACKAGE_VERSION,
    )


def save_json(payload: dict, path: str, run_record: RunRecord | None = None) -> None:
    if run_record is not None:
        payload = {**payload, "run_record": asdict(run_record)}
    write_text_atomic(path, render_json(payload) + "\n")


def load_json(path: str) -> dict:
    with open(path) as handle:
        return json.load(handle)


def save_bundle(bundle: WitnessBundle, path: str,
                run_record: RunRecord | None = None) -> None:
    save_json(bundle_to_dict(bundle), path, run_record)


def load_bundle(path: str) -> WitnessBundle:
    return bundle_from_dict(load_json(path))


def write_circuits(entries: list[CircuitEntry], path: str) -> None:
    """One JSON record per circuit: x, y, alpha, beta, theta, phi, shots."""
    lines = []
    for e in entries:
        lines.append(
            render_json_line(
                {
                    "x": e.x,
                    "y": e.y,
                    "alpha": [e.alpha.real, e.alpha.imag],
                    "beta": [e.beta.real, e.beta.imag],
                    "theta": e.theta,
                    "phi": e.phi,
                    "shots": e.shots,
                }
            )
        )
    write_text_atomic(path, "\n".join(lines) + "\n")


def read_circuits(path: str) -> list[CircuitEntry]:
    entries = []
    with open(path) as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            entries.append(
                CircuitEntry(
                    x=int(record["x"]),
                    y=int(record["y"]),
                    alpha=complex(*record["alpha"]),
                    beta=complex(*record["beta"]),
                    theta=float(record["theta"]),
                    phi=float(record["phi"]),
                    shots=int(record["shots"]),
                )
            )
    return entries


COUNTS_HEADER = "x,y,b,count"


def write_counts(table: StatTable, path: str) -> None:
    """Strict CSV of all (x, y, b) counts, 1-based x and y."""
    lines = [COUNTS_HEADER]
    n_states, n_meas, _ = table.counts.shape
    for x in range(n_states):
        for y in range(n_meas):
            for b in (0, 1):
                lines.append(f"{x + 1},{y + 1},{b},{table.counts[x, y, b]}")
    write_text_atomic(path, "\n".join(lines) + "\n")


def read_counts(path: str) -> StatTable:
    """Parse a counts CSV; every (x, y, b) row must be present exactly once."""
    with open(path) as handle:
        lines = [line.strip() for line in handle if line.strip()]
    if not lines or lines[0] != COUNTS_HEADER:
        raise ValueError(f"counts file must start with header '{COUNTS_HEADER}'")
    cells: dict[tuple[int, int, int], int] = {}
    for line_no, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 4:
            raise ValueError(f"line {line_no}: expected 4 comma-separated fields")
        try:
            x, y, b, count = (int(part) for part in parts)
        except ValueError:
            raise ValueError(f"line {line_no}: counts must be integers") from None
        if b not in (0, 1) or x < 1 or y < 1 or count < 0:
            raise ValueError(f"line {line_no}: invalid indices or count")
        if (x, y, b) in cells:
            raise ValueError(f"line {line_no}: duplicate cell ({x}, {y}, {b})")
        cells[(x, y, b)] = count
    n_states = max(key[0] for key in cells)
    n_meas = max(key[1] for key in cells)
    counts = np.zeros((n_states, n_meas, 2), dtype=np.int64)
    for x in range(1, n_states + 1):
        for y in range(1, n_meas + 1):
            for b in (0, 1):
                if (x, y, b) not in cells:
                    raise ValueError(f"missing cell ({x}, {y}, {b})")
                counts[x - 1, y - 1, b] = cells[(x, y, b)]
    shots = int(counts[0, 0].sum())
    return StatTable(counts=counts, shots=shots)
