"""Closed form versus dense oracle, with the FLOAT tolerance policy."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .closed_form import closed_form_det, lu_sign_log_det
from .core import (DenseMatrix, KronRankOneInstance, ResourceError, ScalarMode,
                   SignLogDet)
from .dense_oracle import dense_cap, materialize

LOG_ATOL = 1e-8
LOG_RTOL = 1e-6


def within_tolerance(a: SignLogDet, b: SignLogDet) -> bool:
    """Pass iff signs agree and, when nonzero,
    ``|dlog| <= LOG_ATOL + LOG_RTOL * max(1, |log|)``.

    Two exact values are compared exactly instead.
    """
    if a.exact is not None and b.exact is not None:
        return a.exact == b.exact
    if a.sign != b.sign:
        return False
    if a.sign == 0:
        return True
    scale = max(1.0, abs(a.log_abs), abs(b.log_abs))
    return abs(a.log_abs - b.log_abs) <= LOG_ATOL + LOG_RTOL * scale


@dataclass(frozen=True)
class Corruption:
    """Debug perturbation of one G entry (1-based row/col)."""

    row: int = 1
    col: int = 1
    delta: float | Fraction = 1.0


@dataclass(frozen=True)
class VerificationReport:
    mode: ScalarMode
    N: int
    F: int
    closed_form: SignLogDet
    dense: SignLogDet
    abs_diff: float | Fraction | None
    log_diff: float | None
    passed: bool
    corrupted: bool = False
    label: str = field(default="")

    def to_dict(self) -> dict:
        def num(v):
            return str(v) if isinstance(v, Fraction) else v

        return {
            "label": self.label,
            "mode": self.mode.value,
            "N": self.N,
            "F": self.F,
            "NF": self.N * self.F,
            "closed_form": self.closed_form.to_dict(),
            "dense": self.dense.to_dict(),
            "closed_form_value": num(self.closed_form.value().value),
            "dense_value": num(self.dense.value().value),
            "abs_diff": num(self.abs_diff),
            "log_diff": self.log_diff,
            "passed": self.passed,
            "corrupted": self.corrupted,
        }


def _differences(a: SignLogDet, b: SignLogDet):
    if a.exact is not None and b.exact is not None:
        abs_diff = abs(a.exact - b.exact)
    else:
        va, vb = a.value().value, b.value().value
        abs_diff = abs(va - vb) if math.isfinite(va) and math.isfinite(vb) else None
    if a.sign != 0 and b.sign != 0:
        log_diff = abs(a.log_abs - b.log_abs)
    elif a.sign == 0 and b.sign == 0:
        log_diff = 0.0
    else:
        log_diff = None
    return abs_diff, log_diff


def verify_instance(inst: KronRankOneInstance, cap: int | None = None,
                    corrupt: Corruption | None = None, label: str = "") -> VerificationReport:
    """Compare the closed form with the determinant of the materialised G.

    ``corrupt`` perturbs one entry of G before the dense determinant; it is
    a negative control and should make the comparison fail.
    """
    limit = dense_cap(cap)
    if inst.size > limit:
        raise ResourceError(f"NF = {inst.size} exceeds the dense cap {limit}")
    cf = closed_form_det(inst).total
    G = materialize(inst)
    if corrupt is not None:
        g = np.array(G.data)
        delta = Fraction(corrupt.delta) if inst.mode is ScalarMode.EXACT else float(corrupt.delta)
        g[corrupt.row - 1, corrupt.col - 1] += delta
        G = DenseMatrix._wrap(g, inst.mode)
    dense = lu_sign_log_det(G)
    abs_diff, log_diff = _differences(cf, dense)
    return VerificationReport(inst.mode, inst.N, inst.F, cf, dense, abs_diff, log_diff,
                              within_tolerance(cf, dense), corrupt is not None, label)
