"""Brute-force ground truth: build G explicitly and take its determinant."""

from __future__ import annotations

import os
from fractions import Fraction

import numpy as np

from .closed_form import lu_sign_log_det
from .core import (DenseMatrix, KronRankOneInstance, ResourceError, ScalarMode,
                   ShapeError, SignLogDet)

DEFAULT_DENSE_CAP = 4096
DENSE_CAP_ENV = "KRONDET_DENSE_CAP"
LEIBNIZ_MAX_SIZE = 9


def dense_cap(cap: int | None = None) -> int:
    """Resolve the NF cap: explicit argument, then environment, then default."""
    if cap is not None:
        return int(cap)
    env = os.environ.get(DENSE_CAP_ENV)
    return int(env) if env else DEFAULT_DENSE_CAP


def kron(A: DenseMatrix, B: DenseMatrix) -> DenseMatrix:
    """Kronecker product with A's indices as the block indices.

    Entry ``((i-1)*p + k, (j-1)*q + l)`` (1-based) equals ``A_ij * B_kl``
    where B is p x q.
    """
    if A.mode is not B.mode:
        raise ValueError("kron of FLOAT and EXACT matrices")
    a, b = A.data, B.data
    m, n = a.shape
    p, q = b.shape
    out = (a[:, None, :, None] * b[None, :, None, :]).reshape(m * p, n * q)
    return DenseMatrix._wrap(out, A.mode)


def outer(x, y, mode: ScalarMode | None = None) -> DenseMatrix:
    x = np.asarray(x)
    y = np.asarray(y)
    if x.ndim != 1 or y.ndim != 1 or len(x) != len(y):
        raise ShapeError(f"outer needs two vectors of equal length, got {x.shape} and {y.shape}")
    if mode is None:
        mode = ScalarMode.EXACT if x.dtype == object else ScalarMode.FLOAT
    return DenseMatrix(np.multiply.outer(x, y), mode)


def materialize(inst: KronRankOneInstance) -> DenseMatrix:
    """The NF x NF matrix ``sum_n kron(A[n], outer(x(n), y(n)))``.

    Evaluated as one contraction over n:
    ``G[(i,k),(j,l)] = sum_n A[n]_ij * X_kn * Y_ln``.
    """
    F, N = inst.F, inst.N
    A = inst.A_stack()                                   # (n, i, j)
    XY = inst.X.data.T[:, :, None] * inst.Y.data.T[:, None, :]   # (n, k, l)
    g = np.tensordot(A, XY, axes=([0], [0]))             # (i, j, k, l)
    g = g.transpose(0, 2, 1, 3).reshape(N * F, N * F)
    return DenseMatrix._wrap(g, inst.mode)


def materialize_by_terms(inst: KronRankOneInstance) -> DenseMatrix:
    """Same matrix as :func:`materialize`, summed term by term with ``kron``."""
    total = None
    for n in range(1, inst.N + 1):
        term = kron(inst.A[n - 1], inst.B(n)).data
        total = term if total is None else total + term
    return DenseMatrix._wrap(total, inst.mode)


def materialized_det(inst: KronRankOneInstance, cap: int | None = None) -> SignLogDet:
    cap = dense_cap(cap)
    if inst.size > cap:
        raise ResourceError(f"NF = {inst.size} exceeds the dense cap {cap}")
    return lu_sign_log_det(materialize(inst))


def leibniz_det(M: DenseMatrix, max_size: int = LEIBNIZ_MAX_SIZE):
    """Determinant by explicit enumeration of all m! permutations.

    Permutations are visited in lexicographic order by a depth-first walk
    that carries the partial product and the sign; the sign of choosing the
    c-th smallest unused column contributes ``(-1)**c``. Integer-valued
    EXACT matrices are summed in Python ints.
    """
    if not M.is_square:
        raise ShapeError(f"determinant of a non-square {M.rows}x{M.cols} matrix")
    m = M.rows
    if m > max_size:
        raise ResourceError(f"Leibniz expansion of size {m} exceeds the limit {max_size}")
    if M.mode is ScalarMode.EXACT:
        fr = [[Fraction(v) for v in row] for row in M.data]
        if all(v.denominator == 1 for row in fr for v in row):
            rows = [[v.numerator for v in row] for row in fr]
            return Fraction(_leibniz(rows, 1, 0))
        return Fraction(_leibniz(fr, Fraction(1), Fraction(0)))
    return float(_leibniz(M.data.tolist(), 1.0, 0.0))


def _leibniz(rows, one, zero):
    m = len(rows)

    def walk(i, unused, prod):
        if i == m:
            return prod
        row = rows[i]
        acc = zero
        for c, col in enumerate(unused):
            term = walk(i + 1, unused[:c] + unused[c + 1:], prod * row[col])
            acc = acc - term if c & 1 else acc + term
        return acc

    return walk(0, tuple(range(m)), one)


def kron_det_identity(A: DenseMatrix, B: DenseMatrix) -> tuple[SignLogDet, SignLogDet]:
    """Both sides of ``det(A kron B) = det(A)**size(B) * det(B)**size(A)``."""
    lhs = lu_sign_log_det(kron(A, B))
    rhs = lu_sign_log_det(A) ** B.rows * lu_sign_log_det(B) ** A.rows
    return lhs, rhs
