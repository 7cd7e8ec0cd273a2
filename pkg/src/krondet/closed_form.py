"""Determinant of the structured operator from its factors alone.

``det(G) = prod_n det(A[n]) * det(X)**F * det(Y)**F``; G is never formed.
Aggregation happens in (sign, log) space so that the product over N factors
and the F-th powers cannot overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import lcm

import numpy as np
from scipy.linalg import lapack

from .core import (DenseMatrix, DetValue, KronRankOneInstance, ScalarMode,
                   ShapeError, SignLogDet)

# FLOAT singularity rule: |pivot| <= PIVOT_RTOL * max|M_ij| after pivot search
PIVOT_RTOL = 1e-12


def bareiss_det(M: DenseMatrix | np.ndarray) -> Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination.

    Each row is first scaled to integers by the lcm of its denominators, so
    the elimination itself runs on Python ints and every division is exact.
    """
    data = M.data if isinstance(M, DenseMatrix) else np.asarray(M, dtype=object)
    n, m = data.shape
    if n != m:
        raise ShapeError(f"determinant of a non-square {n}x{m} matrix")
    scale = 1
    rows = []
    for r in data:
        fr = [Fraction(v) for v in r]
        d = lcm(*(v.denominator for v in fr))
        scale *= d
        rows.append([v.numerator * (d // v.denominator) for v in fr])
    return Fraction(_bareiss_int(rows), scale)


def _bareiss_int(a: list[list[int]]) -> int:
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * akk - aik * rk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def _getrf_pivots(a: np.ndarray) -> tuple[np.ndarray, int]:
    """Diagonal of U and the number of row interchanges from LAPACK getrf."""
    lu, piv, _ = lapack.dgetrf(a)
    return lu.diagonal().copy(), int(np.count_nonzero(piv != np.arange(piv.size)))


def _from_pivots(pivots: np.ndarray, swaps: int, scale: float, rtol: float) -> SignLogDet:
    if scale == 0.0 or np.any(np.abs(pivots) <= rtol * scale):
        return SignLogDet.zero()
    sign = -1 if (swaps + int(np.count_nonzero(pivots < 0))) & 1 else 1
    return SignLogDet(sign, float(np.sum(np.log(np.abs(pivots)))))


def _float_sign_log_det(a: np.ndarray, rtol: float) -> SignLogDet:
    pivots, swaps = _getrf_pivots(a)
    return _from_pivots(pivots, swaps, float(np.max(np.abs(a))), rtol)


def lu_sign_log_det(M: DenseMatrix, pivot_rtol: float = PIVOT_RTOL) -> SignLogDet:
    """Sign and log-magnitude of ``det(M)``.

    FLOAT: LU with partial pivoting; a pivot at or below
    ``pivot_rtol * max|M_ij|`` makes the matrix singular (sign 0).
    EXACT: Bareiss elimination; the exact value rides along.
    """
    if not M.is_square:
        raise ShapeError(f"determinant of a non-square {M.rows}x{M.cols} matrix")
    if M.mode is ScalarMode.EXACT:
        return SignLogDet.from_value(bareiss_det(M))
    return _float_sign_log_det(np.array(M.data), pivot_rtol)


def batched_sign_log_det(stack: np.ndarray, pivot_rtol: float = PIVOT_RTOL) -> list[SignLogDet]:
    """FLOAT sign/log-det for a stack of equal-size square matrices.

    Calls getrf directly per matrix, which avoids the per-call validation
    overhead of the high-level wrappers; same singularity rule as
    :func:`lu_sign_log_det`.
    """
    a = np.asarray(stack, dtype=np.float64)
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ShapeError(f"expected a stack of square matrices, got shape {a.shape}")
    scales = np.max(np.abs(a), axis=(1, 2))
    out = []
    for m, scale in zip(a, scales):
        pivots, swaps = _getrf_pivots(m)
        out.append(_from_pivots(pivots, swaps, float(scale), pivot_rtol))
    return out


@dataclass(frozen=True)
class ClosedFormBreakdown:
    detA: tuple[SignLogDet, ...]
    detX: SignLogDet
    detY: SignLogDet
    total: SignLogDet

    def zero_factors(self) -> list[str]:
        """Labels (1-based) of the factors whose determinant vanished."""
        names = [f"A[{n}]" for n, d in enumerate(self.detA, start=1) if d.is_zero]
        names += [name for name, d in (("X", self.detX), ("Y", self.detY)) if d.is_zero]
        return names

    def to_dict(self) -> dict:
        v = self.total.value()
        return {
            "total": self.total.to_dict(),
            "value": str(v.value) if isinstance(v.value, Fraction) else v.value,
            "overflow": v.overflow,
            "underflow": v.underflow,
            "detA": [d.to_dict() for d in self.detA],
            "detX": self.detX.to_dict(),
            "detY": self.detY.to_dict(),
            "zero_factors": self.zero_factors(),
        }


def closed_form_det(inst: KronRankOneInstance) -> ClosedFormBreakdown:
    if inst.mode is ScalarMode.EXACT:
        detA = tuple(lu_sign_log_det(a) for a in inst.A)
    else:
        detA = tuple(batched_sign_log_det(inst.A_stack()))
    detX = lu_sign_log_det(inst.X)
    detY = lu_sign_log_det(inst.Y)
    total = reduce(lambda acc, d: acc * d, detA) * detX ** inst.F * detY ** inst.F
    return ClosedFormBreakdown(detA, detX, detY, total)


def closed_form_value(inst: KronRankOneInstance) -> DetValue:
    """Plain determinant; exact ``Fraction`` in EXACT mode, else a float with
    overflow/underflow flags."""
    return closed_form_det(inst).total.value()


def log_total(breakdown: ClosedFormBreakdown, F: int) -> float:
    """Recombine the per-factor logs; matches ``breakdown.total.log_abs``."""
    if breakdown.total.is_zero:
        return -math.inf
    return (sum(d.log_abs for d in breakdown.detA)
            + F * breakdown.detX.log_abs + F * breakdown.detY.log_abs)
