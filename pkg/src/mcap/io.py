"""JSON-shaped interchange formats for instances and assignment matrices.

Weights and preferences travel as decimal strings so values may exceed 64
bits; suppression values travel as ``"num/den"`` strings (plain ``"0"`` /
``"1"`` for integers).  Matrices travel as one ``'0'``/``'1'`` string per row.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .core import AssignmentMatrix, Instance, SuppressionTable, ValidationError


def fraction_to_str(value: Fraction) -> str:
    return str(value)


def fraction_from_str(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"bad rational literal {text!r}: {exc}") from exc


def _int_from_str(text, what: str) -> int:
    try:
        return int(str(text).strip())
    except ValueError as exc:
        raise ValidationError(f"bad integer literal for {what}: {text!r}") from exc


def instance_to_dict(inst: Instance) -> dict:
    return {
        "n": inst.n,
        "k": inst.k,
        "weights": [str(w) for w in inst.weights],
        "preferences": [[str(p) for p in row] for row in inst.preferences],
        "suppression": [[fraction_to_str(v) for v in t.values] for t in inst.suppression],
        "lower_bounds": list(inst.lower_bounds),
        "upper_bounds": list(inst.upper_bounds),
    }


def instance_from_dict(data: dict) -> Instance:
    try:
        n = int(data["n"])
        k = int(data["k"])
        weights = [_int_from_str(w, "weight") for w in data["weights"]]
        preferences = [
            [_int_from_str(p, "preference") for p in row] for row in data["preferences"]
        ]
        suppression = [
            SuppressionTable(tuple(fraction_from_str(v) for v in row))
            for row in data["suppression"]
        ]
        lower = [int(b) for b in data["lower_bounds"]]
        upper = [int(b) for b in data["upper_bounds"]]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed instance object: {exc}") from exc
    return Instance(
        n=n,
        k=k,
        weights=tuple(weights),
        preferences=tuple(tuple(row) for row in preferences),
        suppression=tuple(suppression),
        lower_bounds=tuple(lower),
        upper_bounds=tuple(upper),
    )


def matrix_to_dict(matrix: AssignmentMatrix) -> dict:
    return {"rows": ["".join(str(m) for m in row) for row in matrix.entries]}


def matrix_from_dict(data: dict) -> AssignmentMatrix:
    try:
        rows = data["rows"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed matrix object: {exc}") from exc
    entries = []
    for i, row in enumerate(rows):
        cells = []
        for ch in str(row):
            if ch not in "01":
                raise ValidationError(f"matrix row {i}: character {ch!r} is not '0' or '1'")
            cells.append(int(ch))
        entries.append(tuple(cells))
    return AssignmentMatrix(tuple(entries))


def dump_json(data: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


def load_json(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON: {exc}") from exc


def write_instance(inst: Instance, path: str | Path) -> None:
    dump_json(instance_to_dict(inst), path)


def read_instance(path: str | Path) -> Instance:
    return instance_from_dict(load_json(path))


def write_matrix(matrix: AssignmentMatrix, path: str | Path) -> None:
    dump_json(matrix_to_dict(matrix), path)


def read_matrix(path: str | Path) -> AssignmentMatrix:
    return matrix_from_dict(load_json(path))
