"""Wall-clock comparison of the closed form against dense evaluation.

Timings run with BLAS/LAPACK pinned to one thread. One warm-up call is
discarded before the recorded repetitions; tables report medians.
"""

from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from .closed_form import closed_form_det
from .core import KronRankOneInstance, ResourceError
from .dense_oracle import dense_cap, materialized_det
from .generator import Profile, random_instance

CSV_COLUMNS = ("N", "F", "NF", "t_closed_ns", "t_dense_ns", "speedup")


@dataclass(frozen=True)
class DurationStats:
    samples_ns: tuple[int, ...]

    @property
    def min_ns(self) -> int:
        return min(self.samples_ns)

    @property
    def median_ns(self) -> float:
        return statistics.median(self.samples_ns)

    @property
    def max_ns(self) -> int:
        return max(self.samples_ns)


def _time(fn, reps: int) -> DurationStats:
    if reps < 1:
        raise ValueError("reps must be at least 1")
    with threadpool_limits(limits=1):
        fn()
        samples = []
        for _ in range(reps):
            t0 = time.perf_counter_ns()
            fn()
            samples.append(time.perf_counter_ns() - t0)
    return DurationStats(tuple(samples))


def time_closed_form(inst: KronRankOneInstance, reps: int = 5) -> DurationStats:
    return _time(lambda: closed_form_det(inst), reps)


def time_dense(inst: KronRankOneInstance, reps: int = 5, cap: int | None = None) -> DurationStats:
    """Times ``materialize`` plus the dense determinant, as one unit."""
    limit = dense_cap(cap)
    if inst.size > limit:
        raise ResourceError(f"NF = {inst.size} exceeds the dense cap {limit}")
    return _time(lambda: materialized_det(inst, cap=limit), reps)


@dataclass(frozen=True)
class BenchRow:
    N: int
    F: int
    t_closed_ns: float
    t_dense_ns: float | None

    @property
    def NF(self) -> int:
        return self.N * self.F

    @property
    def speedup(self) -> float | None:
        if self.t_dense_ns is None:
            return None
        return self.t_dense_ns / self.t_closed_ns

    def as_dict(self) -> dict:
        return {"N": self.N, "F": self.F, "NF": self.NF, "t_closed_ns": self.t_closed_ns,
                "t_dense_ns": self.t_dense_ns, "speedup": self.speedup}


def run_grid(sizes, reps: int = 5, seed: int = 0, cap: int | None = None) -> list[BenchRow]:
    """Benchmark each ``(N, F)`` in ``sizes`` on a UNIFORM instance.

    Rows above the dense cap get no dense timing.
    """
    limit = dense_cap(cap)
    rows = []
    for N, F in sizes:
        inst = random_instance(N, F, seed, Profile.UNIFORM)
        t_closed = time_closed_form(inst, reps).median_ns
        t_dense = time_dense(inst, reps, limit).median_ns if inst.size <= limit else None
        rows.append(BenchRow(N, F, t_closed, t_dense))
    return rows


def loglog_slope(x, t) -> float:
    """Least-squares slope of ``log t`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(t, float)), 1)[0])


def _cell(col: str, v) -> str:
    if v is None:
        return ""
    if col == "speedup":
        return f"{v:.3f}"
    if col.startswith("t_"):
        return str(int(round(v)))
    return str(v)


def rows_to_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        d = r.as_dict()
        writer.writerow([_cell(c, d[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def parse_grid(text: str) -> list[tuple[int, int]]:
    """``"4,8,16"`` means N = F for each value; ``"64x2"`` means N=64, F=2."""
    sizes = []
    for item in text.split(","):
        item = item.strip().lower()
        if not item:
            continue
        if "x" in item:
            n, f = item.split("x", 1)
            sizes.append((int(n), int(f)))
        else:
            sizes.append((int(item), int(item)))
    if not sizes:
        raise ValueError("empty size grid")
    return sizes
