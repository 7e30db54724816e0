"""Plot-ready CSV tables and JSON run records."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__

SCHEMA = "relloc.run-record/1"


def write_table(path, columns: dict, title: str) -> Path:
    """Write equal-length columns as comma-separated text with a ``#`` header.

    Keys of ``columns`` are column labels including units, e.g. ``"x [lambda]"``.
    """
    path = Path(path)
    names = list(columns)
    data = np.column_stack([np.asarray(columns[k], dtype=float) for k in names])
    header = f"{title}\ncolumns: {', '.join(names)}"
    np.savetxt(path, data, delimiter=",", header=header, comments="# ", fmt="%.17g")
    return path


def read_table(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", comments="#", ndmin=2)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_record(path, command: str, config: dict, **payload) -> Path:
    record = {"schema": SCHEMA, "version": __version__, "command": command, "config": config}
    record.update(payload)
    path = Path(path)
    path.write_text(json.dumps(record, indent=1, default=_jsonable) + "\n")
    return path


def read_record(path) -> dict:
    record = json.loads(Path(path).read_text())
    if record.get("schema") != SCHEMA:
        raise ValueError(f"unsupported run record schema {record.get('schema')!r}")
    return record
