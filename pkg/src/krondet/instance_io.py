"""JSON instance files.

    {"F": 2, "N": 3,
     "A": [[[a11, a12], [a21, a22]], ...],   # N matrices, F rows of F numbers
     "X": [[...], ...],                       # N rows of N numbers
     "Y": [[...], ...]}

Numbers are JSON numbers or strings such as ``"-3/7"``. EXACT mode reads
decimals exactly (``0.1`` is 1/10); FLOAT mode rounds strings to float.
"""

from __future__ import annotations

import json
import math
from decimal import Decimal
from fractions import Fraction

from .core import DenseMatrix, KronRankOneInstance, ScalarMode, ShapeError


class InstanceParseError(ValueError):
    """The document is not a well-formed instance file."""


def _scalar(v, mode: ScalarMode, where: str):
    if isinstance(v, bool) or not isinstance(v, (int, float, str, Decimal, Fraction)):
        raise InstanceParseError(f"{where}: expected a number, got {v!r}")
    if isinstance(v, float) and not math.isfinite(v):
        # well-formed JSON, but not a valid matrix entry
        raise ValueError(f"{where}: non-finite entry {v!r}")
    try:
        q = Fraction(v.strip()) if isinstance(v, str) else Fraction(v)
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise InstanceParseError(f"{where}: {exc}") from None
    return q if mode is ScalarMode.EXACT else float(q)


def _matrix(rows, mode: ScalarMode, where: str) -> list[list]:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InstanceParseError(f"{where}: expected a list of rows")
    return [[_scalar(v, mode, f"{where}[{i + 1}][{j + 1}]") for j, v in enumerate(r)]
            for i, r in enumerate(rows)]


def instance_from_dict(doc: dict, mode: ScalarMode = ScalarMode.FLOAT) -> KronRankOneInstance:
    """Build an instance; malformed documents raise :class:`InstanceParseError`,
    dimension mismatches raise ``ShapeError`` from the instance itself."""
    mode = ScalarMode(mode)
    if not isinstance(doc, dict):
        raise InstanceParseError("instance document must be a JSON object")
    missing = [k for k in ("F", "N", "A", "X", "Y") if k not in doc]
    if missing:
        raise InstanceParseError(f"missing key(s): {', '.join(missing)}")
    F, N = doc["F"], doc["N"]
    if not (isinstance(F, int) and isinstance(N, int)) or isinstance(F, bool) or isinstance(N, bool):
        raise InstanceParseError("F and N must be integers")
    if not isinstance(doc["A"], list):
        raise InstanceParseError("A must be a list of matrices")
    A = tuple(DenseMatrix(_ragged_check(_matrix(a, mode, f"A[{n + 1}]"), f"A[{n + 1}]"), mode)
              for n, a in enumerate(doc["A"]))
    X = DenseMatrix(_ragged_check(_matrix(doc["X"], mode, "X"), "X"), mode)
    Y = DenseMatrix(_ragged_check(_matrix(doc["Y"], mode, "Y"), "Y"), mode)
    return KronRankOneInstance(F, N, A, X, Y)


def _ragged_check(rows: list[list], where: str) -> list[list]:
    if not rows or len({len(r) for r in rows}) != 1 or not rows[0]:
        raise ShapeError(f"{where}: rows must be non-empty and of equal length")
    return rows


def loads(text: str, mode: ScalarMode = ScalarMode.FLOAT) -> KronRankOneInstance:
    try:
        doc = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"invalid JSON: {exc}") from None
    return instance_from_dict(doc, mode)


def load(path, mode: ScalarMode = ScalarMode.FLOAT) -> KronRankOneInstance:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), mode)


def _encode(v):
    if isinstance(v, Fraction):
        return str(v)
    return float(v)


def instance_to_dict(inst: KronRankOneInstance) -> dict:
    def mat(M: DenseMatrix):
        return [[_encode(v) for v in row] for row in M.data]

    return {"F": inst.F, "N": inst.N, "A": [mat(a) for a in inst.A],
            "X": mat(inst.X), "Y": mat(inst.Y)}


def dumps(inst: KronRankOneInstance, indent: int | None = None) -> str:
    return json.dumps(instance_to_dict(inst), indent=indent)
