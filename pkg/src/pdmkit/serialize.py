"""Canonical JSON I/O for models and reports.

Keys are sorted and floats use Python repr (shortest round-trip form), so
identical objects always serialize to identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InvalidConfig
from .rul import LstmModel, RulLinearModel
from .svm import SvmModel


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def canonical_json(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def write_json(path: str | Path, obj) -> None:
    Path(path).write_text(canonical_json(obj), encoding="utf-8", newline="\n")


def read_json(path: str | Path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def save_model(model, path: str | Path) -> None:
    write_json(path, model.to_json_dict())


def load_model(path: str | Path):
    """Load any model document, dispatching on its model_type field."""
    doc = read_json(path)
    kind = doc.get("model_type")
    if kind == "svm":
        return SvmModel.from_json_dict(doc)
    if kind == "lstm":
        return LstmModel.from_json_dict(doc)
    if kind == "rul_linear":
        return RulLinearModel.from_json_dict(doc)
    raise InvalidConfig(f"unknown model_type {kind!r} in {path}")
