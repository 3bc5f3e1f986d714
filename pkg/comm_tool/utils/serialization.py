"""JSON, JSON-lines and CSV input/output."""

import csv
import io
import json
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

from pydantic import BaseModel

from ..core.records import TraceLine
from ..core.types import OutputFormat

PathLike = Union[str, Path]

TRACE_FIELDS = ['stage', 'iter', 'root', 'b0_before', 'b0_after', 'decrease', 'seed']


def _plain(payload):
    if isinstance(payload, BaseModel):
        return payload.model_dump(mode='json')
    return payload


def dumps(payload) -> str:
    """Stable JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(_plain(payload), indent=2, sort_keys=True) + "\n"


def write_json(path: PathLike, payload) -> Path:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(payload))
    return path


def read_json(path: PathLike):
    with open(path) as f:
        return json.load(f)


def read_coordinates(path: PathLike) -> List[float]:
    """Read an element file: a JSON array of real numbers."""
    data = read_json(path)
    if not isinstance(data, list) or not all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in data
    ):
        raise ValueError(f"{path} is not a JSON array of numbers")
    return [float(x) for x in data]


def render_trace(lines: Sequence[TraceLine], fmt: OutputFormat = OutputFormat.JSONL) -> str:
    fmt = OutputFormat(fmt)
    if fmt == OutputFormat.JSON:
        return dumps([line.model_dump() for line in lines])
    if fmt == OutputFormat.CSV:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=TRACE_FIELDS, lineterminator="\n")
        writer.writeheader()
        for line in lines:
            writer.writerow(line.model_dump())
        return buffer.getvalue()
    return "".join(
        json.dumps(line.model_dump(), separators=(',', ':')) + "\n" for line in lines
    )


def write_trace(path: PathLike, lines: Sequence[TraceLine],
                fmt: OutputFormat = OutputFormat.JSONL) -> Path:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_trace(lines, fmt))
    return path


def read_trace(path: PathLike) -> List[TraceLine]:
    """Read a JSON-lines trace file."""
    with open(path) as f:
        return [TraceLine.model_validate_json(line) for line in f if line.strip()]
