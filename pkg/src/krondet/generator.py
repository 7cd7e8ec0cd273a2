"""Seeded test instances.

Randomness comes from SplitMix64 (Steele, Lea & Flood 2014), used in its
counter form: draw ``i`` (1-based) is ``mix(seed + i * 0x9E3779B97F4A7C15)``
with the finaliser constants 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB, all
arithmetic mod 2**64. Doubles take the top 53 bits; small integers use a
multiply-shift on those same 53 bits. Nothing depends on a host RNG, so a
seed reproduces the same instance on any platform or language.

Draw order for one instance: A[1], ..., A[N] (each row-major), then X, then
Y. Redraws for the SINGULAR_* profiles continue the same stream.
"""

from __future__ import annotations

import enum

import numpy as np

from .closed_form import lu_sign_log_det
from .core import DenseMatrix, KronRankOneInstance, ScalarMode

GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1
_TWO_M53 = 2.0 ** -53

INT_LO, INT_HI = -3, 3
ILL_DECADES = 8
MAX_REDRAWS = 1000


class Profile(enum.Enum):
    UNIFORM = "UNIFORM"
    INTEGER_SMALL = "INTEGER_SMALL"
    ILL_CONDITIONED = "ILL_CONDITIONED"
    SINGULAR_A = "SINGULAR_A"
    SINGULAR_X = "SINGULAR_X"
    SINGULAR_Y = "SINGULAR_Y"
    IDENTITY = "IDENTITY"


def splitmix64(seed: int, start: int, count: int) -> np.ndarray:
    """Outputs ``start+1 .. start+count`` of the SplitMix64 stream for ``seed``."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & _MASK64) + idx * GOLDEN_GAMMA
        z = (z ^ (z >> np.uint64(30))) * MIX1
        z = (z ^ (z >> np.uint64(27))) * MIX2
    return z ^ (z >> np.uint64(31))


class SplitMixStream:
    """Sequential reader over one seed's stream. Local to a single call."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.counter = 0

    def raw(self, count: int) -> np.ndarray:
        out = splitmix64(self.seed, self.counter, count)
        self.counter += count
        return out

    def uniform(self, shape, lo: float = -1.0, hi: float = 1.0) -> np.ndarray:
        n = int(np.prod(shape))
        u = (self.raw(n) >> np.uint64(11)).astype(np.float64) * _TWO_M53
        return (lo + (hi - lo) * u).reshape(shape)

    def integers(self, shape, lo: int, hi: int) -> np.ndarray:
        """Integers in ``[lo, hi]`` inclusive."""
        n = int(np.prod(shape))
        span = np.uint64(hi - lo + 1)
        top = self.raw(n) >> np.uint64(11)
        return ((top * span) >> np.uint64(53)).astype(np.int64).reshape(shape) + lo


def _default_mode(profile: Profile) -> ScalarMode:
    return ScalarMode.EXACT if profile is Profile.INTEGER_SMALL else ScalarMode.FLOAT


def _draw(stream: SplitMixStream, m: int, profile: Profile, mode: ScalarMode) -> np.ndarray:
    if profile is Profile.INTEGER_SMALL:
        return stream.integers((m, m), INT_LO, INT_HI)
    if profile is Profile.UNIFORM:
        return stream.uniform((m, m))
    if profile is Profile.ILL_CONDITIONED:
        cols = 10.0 ** (-ILL_DECADES * np.arange(m) / max(m - 1, 1))
        return stream.uniform((m, m)) * cols[None, :]
    # SINGULAR_* base entries: small integers for exact work, uniform otherwise
    if mode is ScalarMode.EXACT:
        return stream.integers((m, m), INT_LO, INT_HI)
    return stream.uniform((m, m))


def _make_singular(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    if a.shape[0] == 1:
        a[0, 0] = 0
    else:
        a[:, -1] = a[:, 0]
    return a


def _draw_nonsingular(stream, m, profile, mode) -> DenseMatrix:
    for _ in range(MAX_REDRAWS):
        M = DenseMatrix(_draw(stream, m, profile, mode), mode)
        if not lu_sign_log_det(M).is_zero:
            return M
    raise RuntimeError(f"no nonsingular {m}x{m} draw after {MAX_REDRAWS} attempts")


def random_instance(N: int, F: int, seed: int, profile: Profile | str = Profile.UNIFORM,
                    mode: ScalarMode | str | None = None) -> KronRankOneInstance:
    """Deterministic instance for ``(N, F, seed, profile)``.

    ``mode`` defaults to EXACT for INTEGER_SMALL and FLOAT otherwise; float
    draws converted to EXACT keep their exact binary value. SINGULAR_A,
    SINGULAR_X and SINGULAR_Y make exactly the named factor rank deficient
    (for SINGULAR_A, the term index is drawn from the stream) and redraw the
    other factors until they are nonsingular.
    """
    if N < 1 or F < 1:
        raise ValueError("N and F must be positive")
    profile = Profile(profile)
    mode = _default_mode(profile) if mode is None else ScalarMode(mode)

    if profile is Profile.IDENTITY:
        return KronRankOneInstance(F, N, tuple(DenseMatrix.identity(F, mode) for _ in range(N)),
                                   DenseMatrix.identity(N, mode), DenseMatrix.identity(N, mode))

    stream = SplitMixStream(seed)
    if profile not in (Profile.SINGULAR_A, Profile.SINGULAR_X, Profile.SINGULAR_Y):
        A = tuple(DenseMatrix(_draw(stream, F, profile, mode), mode) for _ in range(N))
        X = DenseMatrix(_draw(stream, N, profile, mode), mode)
        Y = DenseMatrix(_draw(stream, N, profile, mode), mode)
        return KronRankOneInstance(F, N, A, X, Y)

    target_a = int(stream.integers((1,), 0, N - 1)[0]) if profile is Profile.SINGULAR_A else -1
    A = []
    for n in range(N):
        if n == target_a:
            A.append(DenseMatrix(_make_singular(_draw(stream, F, profile, mode)), mode))
        else:
            A.append(_draw_nonsingular(stream, F, profile, mode))
    if profile is Profile.SINGULAR_X:
        X = DenseMatrix(_make_singular(_draw(stream, N, profile, mode)), mode)
    else:
        X = _draw_nonsingular(stream, N, profile, mode)
    if profile is Profile.SINGULAR_Y:
        Y = DenseMatrix(_make_singular(_draw(stream, N, profile, mode)), mode)
    else:
        Y = _draw_nonsingular(stream, N, profile, mode)
    return KronRankOneInstance(F, N, tuple(A), X, Y)
