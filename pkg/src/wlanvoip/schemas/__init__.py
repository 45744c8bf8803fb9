"""Versioned output schemas and a validator for files listed in run manifests."""

from __future__ import annotations

import csv
import json
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema

from ..errors import WlanVoipError

CSV_HEADERS = {
    "admission_csv.v1": ("request_index", "station_id", "cell_id", "decision", "admitted_total", "max_m_after"),
    "sweep_csv.v1": ("n", "cs_range_over_dmax", "trial", "colored", "total", "coverage"),
}


class SchemaError(WlanVoipError):
    pass


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    return json.loads(resources.files(__package__).joinpath(f"{name}.json").read_text())


def validate_document(doc, name: str) -> None:
    try:
        jsonschema.validate(doc, load_schema(name))
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"{name}: {exc.message}") from exc


def validate_file(path: str | Path, name: str) -> None:
    path = Path(path)
    if name in CSV_HEADERS:
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or tuple(rows[0]) != CSV_HEADERS[name]:
            raise SchemaError(f"{path}: header does not match {name}")
        width = len(CSV_HEADERS[name])
        bad = [i for i, r in enumerate(rows[1:], start=2) if len(r) != width]
        if bad:
            raise SchemaError(f"{path}: wrong column count on lines {bad[:5]}")
        return
    validate_document(json.loads(path.read_text()), name)
