"""Permutation-expansion checks for the block-diagonal part of det(G).

A tuple ``gamma = (gamma_1, ..., gamma_F)`` in ``(S_N)^F`` picks, for each
diagonal block f and each column j inside it, the term ``gamma_f(j)`` whose
Kronecker summand supplies that column. Diagonal block f then reads

    C_f[k, j] = A[gamma_f(j)]_ff * Y[j, gamma_f(j)] * X[k, gamma_f(j)]

and the functions here evaluate these contributions, their sum over all of
``(S_N)^F``, and the identities that collapse that sum. Only the
block-diagonal terms are expanded; agreement of the whole determinant is
checked end-to-end by ``full_leibniz_check``.

All checks default to EXACT instances. FLOAT instances are accepted and
compared with ``FLOAT_RTOL``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .closed_form import bareiss_det, closed_form_value, lu_sign_log_det
from .core import (DenseMatrix, KronRankOneInstance, PermutationTuple, ResourceError,
                   ScalarMode, ShapeError, VerificationError, is_permutation, perm_sign)
from .dense_oracle import leibniz_det, materialize, outer

DEFAULT_TUPLE_LIMIT = 10**6
FLOAT_RTOL = 1e-9


def tuple_count(N: int, F: int) -> int:
    return math.factorial(N) ** F


def enumerate_gamma(N: int, F: int, limit: int = DEFAULT_TUPLE_LIMIT) -> Iterator[PermutationTuple]:
    """Every element of ``(S_N)^F`` once, lexicographic in ``(gamma_1, ..., gamma_F)``.

    Tuple index t (0-based) in this order is reproducible from (N, F) alone.
    """
    if N < 1 or F < 1:
        raise ValueError("N and F must be positive")
    count = tuple_count(N, F)
    if count > limit:
        raise ResourceError(f"(S_{N})^{F} has {count} tuples, above the limit {limit}")
    perms = list(itertools.permutations(range(N)))
    for gammas in itertools.product(perms, repeat=F):
        yield PermutationTuple(N, F, gammas)


def _det_scalar(M: DenseMatrix):
    if M.mode is ScalarMode.EXACT:
        return bareiss_det(M)
    return lu_sign_log_det(M).value().value


def _agree(a, b, mode: ScalarMode, scale: float = 1.0) -> bool:
    if mode is ScalarMode.EXACT:
        return a == b
    return math.isclose(a, b, rel_tol=FLOAT_RTOL, abs_tol=FLOAT_RTOL * scale)


def _check_perm(gamma: Sequence[int], N: int) -> tuple[int, ...]:
    gamma = tuple(int(v) for v in gamma)
    if not is_permutation(gamma, N):
        raise ValueError(f"{gamma} is not a permutation of 0..{N - 1}")
    return gamma


def b_columns_matrix(inst: KronRankOneInstance, gamma_i: Sequence[int]) -> DenseMatrix:
    """Column j is column j of ``B[gamma_i(j)] = outer(x, y)`` of that term."""
    gamma_i = _check_perm(gamma_i, inst.N)
    cols = [inst.B(g + 1).data[:, j] for j, g in enumerate(gamma_i)]
    return DenseMatrix._wrap(np.column_stack(cols), inst.mode)


def y_diagonal_product(Y: DenseMatrix, gamma_i: Sequence[int]):
    """``prod_k Y[k, gamma_i(k)]``."""
    prod = Fraction(1) if Y.mode is ScalarMode.EXACT else 1.0
    for k, g in enumerate(gamma_i):
        prod *= Y.data[k, g]
    return prod


def b_columns_det(inst: KronRankOneInstance, gamma_i: Sequence[int], det_x=None):
    """Determinant of the gathered rank-one columns, computed two ways.

    (a) dense determinant of :func:`b_columns_matrix`;
    (b) ``prod_k Y[k, gamma(k)] * det(X) * sgn(gamma)``.
    Raises :class:`VerificationError` when they disagree; returns (a).
    ``gamma_i`` is a 0-based image tuple. ``det_x`` may be passed to avoid
    recomputing ``det(X)`` across many permutations.
    """
    gamma_i = _check_perm(gamma_i, inst.N)
    direct = _det_scalar(b_columns_matrix(inst, gamma_i))
    if det_x is None:
        det_x = _det_scalar(inst.X)
    via_formula = y_diagonal_product(inst.Y, gamma_i) * det_x * perm_sign(gamma_i)
    scale = 1.0
    if inst.mode is ScalarMode.FLOAT:
        scale = float(np.max(np.abs(inst.X.data))) ** inst.N * float(np.max(np.abs(inst.Y.data))) ** inst.N
    if not _agree(direct, via_formula, inst.mode, scale):
        raise VerificationError(
            f"rank-one column determinant mismatch for gamma={gamma_i}: "
            f"direct {direct} vs formula {via_formula}")
    return direct


@dataclass(frozen=True)
class BlockDiagonalContribution:
    gamma: PermutationTuple
    per_block_dets: tuple
    total: object


def _a_diagonal_product(inst: KronRankOneInstance, f: int, gamma_f: Sequence[int]):
    prod = Fraction(1) if inst.mode is ScalarMode.EXACT else 1.0
    for g in gamma_f:
        prod *= inst.A[g].data[f, f]
    return prod


def block_det(inst: KronRankOneInstance, f: int, gamma_f: Sequence[int], det_x=None):
    """Determinant of diagonal block f (0-based) for permutation ``gamma_f``."""
    return _a_diagonal_product(inst, f, gamma_f) * b_columns_det(inst, gamma_f, det_x)


def c_diag_det(inst: KronRankOneInstance, gamma: PermutationTuple) -> BlockDiagonalContribution:
    _check_tuple(inst, gamma)
    det_x = _det_scalar(inst.X)
    blocks = tuple(block_det(inst, f, g, det_x) for f, g in enumerate(gamma.gammas))
    total = Fraction(1) if inst.mode is ScalarMode.EXACT else 1.0
    for b in blocks:
        total *= b
    return BlockDiagonalContribution(gamma, blocks, total)


def _check_tuple(inst: KronRankOneInstance, gamma: PermutationTuple) -> None:
    if gamma.N != inst.N or gamma.F != inst.F:
        raise ShapeError(f"tuple in (S_{gamma.N})^{gamma.F} does not fit an instance "
                         f"with N={inst.N}, F={inst.F}")


def assemble_c_diag(inst: KronRankOneInstance, gamma: PermutationTuple) -> DenseMatrix:
    """The NF x NF block-diagonal matrix with off-diagonal blocks zeroed.

    Row ``f*N + k`` and column ``f*N + j`` (0-based), matching the block
    layout of the Kronecker ordering.
    """
    _check_tuple(inst, gamma)
    N, F = inst.N, inst.F
    zero = Fraction(0) if inst.mode is ScalarMode.EXACT else 0.0
    c = np.full((N * F, N * F), zero, dtype=object if inst.mode is ScalarMode.EXACT else float)
    for f, g in enumerate(gamma.gammas):
        for j, n in enumerate(g):
            a_ff = inst.A[n].data[f, f]
            c[f * N:(f + 1) * N, f * N + j] = a_ff * inst.B(n + 1).data[:, j]
    return DenseMatrix._wrap(c, inst.mode)


def total_off_rhs(inst: KronRankOneInstance):
    """``(prod_f prod_n A[n]_ff) * det(X)**F * det(Y)**F``."""
    prod = Fraction(1) if inst.mode is ScalarMode.EXACT else 1.0
    for a in inst.A:
        for f in range(inst.F):
            prod *= a.data[f, f]
    return prod * _det_scalar(inst.X) ** inst.F * _det_scalar(inst.Y) ** inst.F


def sum_block_diagonal(inst: KronRankOneInstance, limit: int = DEFAULT_TUPLE_LIMIT):
    """Sum of every block-diagonal contribution over ``(S_N)^F``.

    Each block determinant depends only on ``(f, gamma_f)``, so the N!*F
    distinct values are tabulated once and every tuple's contribution is the
    product of F table lookups. The sum is checked against
    :func:`total_off_rhs`.
    """
    perms = list(itertools.permutations(range(inst.N)))
    det_x = _det_scalar(inst.X)
    table = [{g: block_det(inst, f, g, det_x) for g in perms} for f in range(inst.F)]
    acc = Fraction(0) if inst.mode is ScalarMode.EXACT else 0.0
    one = Fraction(1) if inst.mode is ScalarMode.EXACT else 1.0
    for gamma in enumerate_gamma(inst.N, inst.F, limit):
        term = one
        for f, g in enumerate(gamma.gammas):
            term *= table[f][g]
        acc += term
    rhs = total_off_rhs(inst)
    if not _agree(acc, rhs, inst.mode, _float_scale(acc, rhs)):
        raise VerificationError(f"block-diagonal sum {acc} differs from {rhs}")
    return acc


def _float_scale(a, b) -> float:
    try:
        return max(1.0, abs(float(a)), abs(float(b)))
    except OverflowError:
        return math.inf


def signed_y_term(Y: DenseMatrix, gamma_i: Sequence[int]):
    """``sgn(gamma) * prod_k Y[k, gamma(k)]``; summed over S_N this is det(Y)."""
    return perm_sign(gamma_i) * y_diagonal_product(Y, gamma_i)


def y_power_identity(Y: DenseMatrix, F: int, limit: int = DEFAULT_TUPLE_LIMIT):
    """Sum over ``(S_N)^F`` of ``prod_i sgn(gamma_i) prod_k Y[k, gamma_i(k)]``.

    Checked against ``det(Y)**F`` from an elimination determinant.
    """
    if not Y.is_square:
        raise ShapeError(f"Y must be square, got {Y.rows}x{Y.cols}")
    N = Y.rows
    exact = Y.mode is ScalarMode.EXACT
    terms = {g: signed_y_term(Y, g) for g in itertools.permutations(range(N))}
    acc = Fraction(0) if exact else 0.0
    for gamma in enumerate_gamma(N, F, limit):
        term = Fraction(1) if exact else 1.0
        for g in gamma.gammas:
            term *= terms[g]
        acc += term
    rhs = _det_scalar(Y) ** F
    if not _agree(acc, rhs, Y.mode, _float_scale(acc, rhs)):
        raise VerificationError(f"sum over tuples {acc} differs from det(Y)^F = {rhs}")
    return acc


def full_leibniz_check(inst: KronRankOneInstance):
    """Leibniz determinant of the materialised G against the closed form.

    Returns ``(leibniz, closed_form)``; raises on disagreement.
    """
    lhs = leibniz_det(materialize(inst))
    rhs = closed_form_value(inst).value
    if not _agree(lhs, rhs, inst.mode, _float_scale(lhs, rhs)):
        raise VerificationError(f"Leibniz determinant {lhs} differs from closed form {rhs}")
    return lhs, rhs
