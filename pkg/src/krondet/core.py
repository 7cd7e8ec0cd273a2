"""Shared data model: matrices, problem instances, determinant values.

Indexing convention
-------------------
Accessors that take matrix or term indices (``matrix_get``, ``column``,
``KronRankOneInstance.x``/``y``/``B``) are 1-based. Everything array-level
is 0-based: ``DenseMatrix.data``, permutation image tuples, loop counters.
The single mapping is ``public index i -> storage index i - 1``.
"""

from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import NamedTuple, Sequence

import numpy as np


class ShapeError(ValueError):
    """Matrix or instance dimensions are inconsistent."""


class ModeError(ValueError):
    """FLOAT and EXACT scalars were mixed in one pipeline."""


class BoundsError(IndexError):
    pass


class ResourceError(RuntimeError):
    """A size or enumeration cap would be exceeded."""


class VerificationError(AssertionError):
    """Two routes that must agree did not."""


class ScalarMode(enum.Enum):
    FLOAT = "float"
    EXACT = "exact"


def _to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (bool, np.bool_)):
        raise TypeError("booleans are not matrix entries")
    if isinstance(v, (int, np.integer, Rational)):
        return Fraction(int(v)) if isinstance(v, np.integer) else Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, (float, np.floating)):
        if not math.isfinite(v):
            raise ValueError(f"non-finite entry {v!r}")
        return Fraction(float(v))
    raise TypeError(f"cannot use {type(v).__name__} as an exact scalar")


class DenseMatrix:
    """Immutable dense matrix, row-major, in one scalar mode.

    FLOAT matrices hold a float64 array; EXACT matrices hold an object array
    of ``Fraction``. The backing array is read-only.
    """

    __slots__ = ("_data", "_mode")

    def __init__(self, data, mode: ScalarMode = ScalarMode.FLOAT):
        mode = ScalarMode(mode)
        if mode is ScalarMode.FLOAT:
            arr = np.array(data, dtype=np.float64)
        else:
            src = np.asarray(data, dtype=object)
            arr = np.empty(src.shape, dtype=object)
            for idx, v in np.ndenumerate(src):
                arr[idx] = _to_fraction(v)
        if arr.ndim != 2:
            raise ShapeError(f"expected a 2-D matrix, got {arr.ndim} dimension(s)")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeError(f"matrix dimensions must be positive, got {arr.shape}")
        if mode is ScalarMode.FLOAT and not np.all(np.isfinite(arr)):
            raise ValueError("FLOAT matrix contains NaN or Inf")
        arr.setflags(write=False)
        self._data = arr
        self._mode = mode

    @classmethod
    def _wrap(cls, arr: np.ndarray, mode: ScalarMode) -> "DenseMatrix":
        # trusted internal constructor: arr already has the right dtype/contents
        obj = cls.__new__(cls)
        arr = np.array(arr, copy=True)
        if arr.ndim != 2:
            raise ShapeError(f"expected a 2-D matrix, got {arr.ndim} dimension(s)")
        if mode is ScalarMode.FLOAT and not np.all(np.isfinite(arr)):
            raise ValueError("FLOAT matrix contains NaN or Inf")
        arr.setflags(write=False)
        obj._data = arr
        obj._mode = mode
        return obj

    @classmethod
    def identity(cls, n: int, mode: ScalarMode = ScalarMode.FLOAT) -> "DenseMatrix":
        return cls(np.eye(n, dtype=np.int64), mode)

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Sequence,
                     mode: ScalarMode = ScalarMode.FLOAT) -> "DenseMatrix":
        if len(entries) != rows * cols:
            raise ShapeError(f"{len(entries)} entries for a {rows}x{cols} matrix")
        return cls(np.array(list(entries), dtype=object).reshape(rows, cols), mode)

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def mode(self) -> ScalarMode:
        return self._mode

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._data.shape

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def entries(self) -> tuple:
        return tuple(self._data.ravel())

    def to_mode(self, mode: ScalarMode) -> "DenseMatrix":
        mode = ScalarMode(mode)
        if mode is self._mode:
            return self
        if mode is ScalarMode.FLOAT:
            return DenseMatrix(np.array([[float(v) for v in row] for row in self._data]), mode)
        return DenseMatrix(self._data, mode)

    def tolist(self) -> list[list]:
        return self._data.tolist()

    def __eq__(self, other):
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        return (self._mode is other._mode and self.shape == other.shape
                and bool(np.all(self._data == other._data)))

    __hash__ = None

    def __repr__(self):
        return f"DenseMatrix({self.tolist()!r}, mode={self._mode.name})"


def matrix_get(M: DenseMatrix, i: int, j: int):
    """Entry ``M_ij`` with 1-based ``i`` and ``j``."""
    if not (1 <= i <= M.rows and 1 <= j <= M.cols):
        raise BoundsError(f"index ({i}, {j}) outside a {M.rows}x{M.cols} matrix")
    return M.data[i - 1, j - 1]


def column(M: DenseMatrix, j: int) -> np.ndarray:
    """Column ``j`` (1-based) as a fresh 1-D array."""
    if not 1 <= j <= M.cols:
        raise BoundsError(f"column {j} outside a matrix with {M.cols} columns")
    return M.data[:, j - 1].copy()


@dataclass(frozen=True)
class KronRankOneInstance:
    """The operator ``G = sum_n A[n] kron outer(X[:, n], Y[:, n])``.

    ``A`` holds N square F x F matrices, ``X`` and ``Y`` are N x N, and the
    n-th rank-one factor is built from the n-th columns of ``X`` and ``Y``.
    The rank-one factors themselves are never stored.
    """

    F: int
    N: int
    A: tuple[DenseMatrix, ...]
    X: DenseMatrix
    Y: DenseMatrix

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(self.A))
        if not (isinstance(self.F, int) and isinstance(self.N, int)) or self.F < 1 or self.N < 1:
            raise ShapeError(f"F and N must be positive integers, got F={self.F!r}, N={self.N!r}")
        if len(self.A) != self.N:
            raise ShapeError(f"expected {self.N} A matrices, got {len(self.A)}")
        for n, a in enumerate(self.A, start=1):
            if a.shape != (self.F, self.F):
                raise ShapeError(f"A[{n}] is {a.rows}x{a.cols}, expected {self.F}x{self.F}")
        for name, m in (("X", self.X), ("Y", self.Y)):
            if m.shape != (self.N, self.N):
                raise ShapeError(f"{name} is {m.rows}x{m.cols}, expected {self.N}x{self.N}")
        modes = {m.mode for m in (*self.A, self.X, self.Y)}
        if len(modes) != 1:
            raise ModeError("instance mixes FLOAT and EXACT matrices")

    @property
    def mode(self) -> ScalarMode:
        return self.X.mode

    @property
    def size(self) -> int:
        return self.N * self.F

    def x(self, n: int) -> np.ndarray:
        return column(self.X, n)

    def y(self, n: int) -> np.ndarray:
        return column(self.Y, n)

    def B(self, n: int) -> DenseMatrix:
        """The rank-one factor ``x(n) y(n)^T`` (1-based n), built on demand."""
        return DenseMatrix._wrap(np.multiply.outer(self.x(n), self.y(n)), self.mode)

    def A_stack(self) -> np.ndarray:
        return np.stack([a.data for a in self.A])

    def to_mode(self, mode: ScalarMode) -> "KronRankOneInstance":
        return KronRankOneInstance(self.F, self.N, tuple(a.to_mode(mode) for a in self.A),
                                   self.X.to_mode(mode), self.Y.to_mode(mode))


class DetValue(NamedTuple):
    """Plain view of a determinant with range flags."""

    value: float | Fraction
    overflow: bool = False
    underflow: bool = False


_LOG_MAX = math.log(sys.float_info.max)
_LOG_MIN_NORMAL = math.log(sys.float_info.min)


def _log_abs_fraction(q: Fraction) -> float:
    # math.log accepts arbitrarily large ints, so this never overflows
    return math.log(abs(q.numerator)) - math.log(q.denominator)


@dataclass(frozen=True)
class SignLogDet:
    """A determinant as ``(sign, log|det|)``, optionally with its exact value.

    ``sign == 0`` pairs with ``log_abs == -inf``, the undefined sentinel.
    EXACT-mode results also carry ``exact``; equality of two EXACT values is
    then decided on ``exact`` alone.
    """

    sign: int
    log_abs: float
    exact: Fraction | None = None

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign!r}")
        if self.sign == 0:
            object.__setattr__(self, "log_abs", -math.inf)
        elif not math.isfinite(self.log_abs):
            raise ValueError("a nonzero determinant needs a finite log_abs")

    @classmethod
    def zero(cls, exact: bool = False) -> "SignLogDet":
        return cls(0, -math.inf, Fraction(0) if exact else None)

    @classmethod
    def from_value(cls, v) -> "SignLogDet":
        if isinstance(v, (Fraction, int)) and not isinstance(v, bool):
            q = Fraction(v)
            if q == 0:
                return cls.zero(exact=True)
            return cls(1 if q > 0 else -1, _log_abs_fraction(q), q)
        v = float(v)
        if not math.isfinite(v):
            raise ValueError(f"non-finite determinant value {v!r}")
        if v == 0.0:
            return cls.zero()
        return cls(1 if v > 0 else -1, math.log(abs(v)))

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def value(self) -> DetValue:
        if self.exact is not None:
            return DetValue(self.exact)
        if self.sign == 0:
            return DetValue(0.0)
        if self.log_abs > _LOG_MAX:
            return DetValue(self.sign * math.inf, overflow=True)
        mag = math.exp(self.log_abs)
        if mag == math.inf:
            return DetValue(self.sign * math.inf, overflow=True)
        if self.log_abs < _LOG_MIN_NORMAL:
            return DetValue(self.sign * mag, underflow=True)
        return DetValue(self.sign * mag)

    def __mul__(self, other: "SignLogDet") -> "SignLogDet":
        if not isinstance(other, SignLogDet):
            return NotImplemented
        exact = (self.exact * other.exact
                 if self.exact is not None and other.exact is not None else None)
        if self.sign == 0 or other.sign == 0:
            return SignLogDet(0, -math.inf, exact)
        return SignLogDet(self.sign * other.sign, self.log_abs + other.log_abs, exact)

    def __pow__(self, k: int) -> "SignLogDet":
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        exact = self.exact ** k if self.exact is not None else None
        if k == 0:
            return SignLogDet(1, 0.0, exact)
        if self.sign == 0:
            return SignLogDet(0, -math.inf, exact)
        return SignLogDet(self.sign ** k, k * self.log_abs, exact)

    def to_dict(self) -> dict:
        out = {"sign": self.sign,
               "log_abs": None if self.sign == 0 else self.log_abs}
        if self.exact is not None:
            out["exact"] = str(self.exact)
        return out


def perm_sign(p: Sequence[int]) -> int:
    """Parity of the inversion count of a 0-based permutation."""
    inv = 0
    n = len(p)
    for i in range(n):
        pi = p[i]
        for j in range(i + 1, n):
            if p[j] < pi:
                inv += 1
    return -1 if inv & 1 else 1


def compose(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """``p o q``, i.e. ``i -> p[q[i]]``."""
    if len(p) != len(q):
        raise ShapeError("cannot compose permutations of different sizes")
    return tuple(p[i] for i in q)


def is_permutation(p: Sequence[int], n: int) -> bool:
    return len(p) == n and sorted(p) == list(range(n))


@dataclass(frozen=True)
class PermutationTuple:
    """An element ``(gamma_1, ..., gamma_F)`` of ``(S_N)^F``.

    Each ``gammas[f]`` is a 0-based image tuple: ``gammas[f][k]`` is where
    the k-th column draws its term from.
    """

    N: int
    F: int
    gammas: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        gammas = tuple(tuple(int(v) for v in g) for g in self.gammas)
        object.__setattr__(self, "gammas", gammas)
        if len(gammas) != self.F:
            raise ShapeError(f"expected {self.F} permutations, got {len(gammas)}")
        for g in gammas:
            if not is_permutation(g, self.N):
                raise ValueError(f"{g} is not a permutation of 0..{self.N - 1}")

    @classmethod
    def from_one_based(cls, gammas: Sequence[Sequence[int]]) -> "PermutationTuple":
        gammas = [tuple(v - 1 for v in g) for g in gammas]
        return cls(len(gammas[0]) if gammas else 0, len(gammas), tuple(gammas))

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(perm_sign(g) for g in self.gammas)

    def one_based(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(v + 1 for v in g) for g in self.gammas)
