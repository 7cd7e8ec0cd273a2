"""Exit criteria. Each test records one summary line, printed after the run
as ``PASS``/``FAIL  C<k> ...`` under "acceptance criteria"."""

import itertools
import time

import numpy as np
import pytest

from krondet import proof_expansion as pe
from krondet.bench import run_grid
from krondet.cli import main
from krondet.closed_form import bareiss_det, closed_form_det, closed_form_value
from krondet.core import DenseMatrix, ScalarMode
from krondet.dense_oracle import kron_det_identity, leibniz_det, materialize, materialized_det
from krondet.generator import Profile, random_instance
from krondet.verify import LOG_ATOL, LOG_RTOL, within_tolerance

EXACT = ScalarMode.EXACT


@pytest.fixture
def criterion(record_property):
    def record(label, detail):
        record_property("criterion", f"{label}: {detail}")
    return record


def test_c1_product_formula_exact(criterion):
    t0 = time.perf_counter()
    count = nonzero = 0
    for N in range(1, 5):
        for F in range(1, 5):
            for seed in range(100):
                inst = random_instance(N, F, seed, Profile.INTEGER_SMALL)
                cf = closed_form_det(inst).total.exact
                dense = materialized_det(inst).exact
                assert cf is not None and cf == dense, (N, F, seed, cf, dense)
                count += 1
                nonzero += cf != 0
    elapsed = time.perf_counter() - t0
    criterion("C1 product formula vs dense, EXACT",
              f"{count} instances equal ({nonzero} nonzero), {elapsed:.1f} s < 120 s")
    assert count == 1600 and nonzero > 800
    assert elapsed < 120


def test_c2_product_formula_float(criterion):
    t0 = time.perf_counter()
    worst = 0.0
    count = 0
    for N in range(1, 6):
        for F in range(1, 6):
            for seed in range(500):
                inst = random_instance(N, F, seed, Profile.UNIFORM)
                cf = closed_form_det(inst).total
                dense = materialized_det(inst)
                assert cf.sign == dense.sign, (N, F, seed)
                assert within_tolerance(cf, dense), (N, F, seed, cf, dense)
                if cf.sign:
                    worst = max(worst, abs(cf.log_abs - dense.log_abs)
                                / (LOG_ATOL + LOG_RTOL * max(1.0, abs(dense.log_abs))))
                count += 1
    elapsed = time.perf_counter() - t0
    criterion("C2 product formula vs dense, FLOAT",
              f"{count} instances within tolerance (worst |dlog| = {worst:.2e} of allowance), "
              f"{elapsed:.1f} s < 60 s")
    assert count == 12500
    assert elapsed < 60


def test_c3_proof_expansion(criterion):
    t0 = time.perf_counter()
    perms_checked = tuples = 0
    for N in range(1, 5):
        for seed in range(3):
            inst = random_instance(N, 1, seed, Profile.SINGULAR_A, EXACT)
            for g in itertools.permutations(range(N)):
                direct = pe.b_columns_det(inst, g)
                assert direct == pe.y_diagonal_product(inst.Y, g) * bareiss_det(inst.X) \
                    * (1 if pe.perm_sign(g) > 0 else -1)
                perms_checked += 1
    for N in range(1, 5):
        for F in range(1, 4):
            for seed in range(2):
                inst = random_instance(N, F, 100 * N + 10 * F + seed, Profile.INTEGER_SMALL)
                assert pe.sum_block_diagonal(inst) == pe.total_off_rhs(inst)
                assert pe.y_power_identity(inst.Y, F) == bareiss_det(inst.Y) ** F
                tuples += 2 * pe.tuple_count(N, F)
    elapsed = time.perf_counter() - t0
    criterion("C3 proof-expansion identities, EXACT",
              f"{perms_checked} dual-path permutations, {tuples} tuples summed, {elapsed:.1f} s < 120 s")
    assert elapsed < 120


def test_c4_full_leibniz(criterion):
    t0 = time.perf_counter()
    pairs = [(N, F) for N in range(1, 9) for F in range(1, 9) if N * F <= 8]
    for N, F in pairs:
        for seed in range(20):
            inst = random_instance(N, F, seed, Profile.INTEGER_SMALL)
            assert leibniz_det(materialize(inst)) == closed_form_value(inst).value, (N, F, seed)
    elapsed = time.perf_counter() - t0
    criterion("C4 full Leibniz cross-check, EXACT",
              f"{len(pairs)} (N,F) pairs x 20 seeds equal, {elapsed:.1f} s < 60 s")
    assert elapsed < 60


def test_c5_degenerate(criterion):
    count = 0
    for profile in (Profile.SINGULAR_A, Profile.SINGULAR_X, Profile.SINGULAR_Y):
        for N in range(1, 5):
            for F in range(1, 5):
                for seed in range(50):
                    inst = random_instance(N, F, seed, profile, EXACT)
                    assert closed_form_det(inst).total.sign == 0
                    assert materialized_det(inst).sign == 0
                    count += 1
    criterion("C5 degenerate profiles", f"{count} instances give sign 0 on both routes")


def test_c6_kron_identity(criterion):
    rng = np.random.default_rng(606)
    count = 0
    for na in range(1, 5):
        for nb in range(1, 5):
            for _ in range(10):
                A = DenseMatrix(rng.integers(-5, 6, (na, na)), EXACT)
                B = DenseMatrix(rng.integers(-5, 6, (nb, nb)), EXACT)
                lhs, rhs = kron_det_identity(A, B)
                assert lhs.exact == rhs.exact
                count += 1
    criterion("C6 det(A kron B) identity, EXACT", f"{count} random integer pairs up to 4x4")


def test_c7_performance(criterion):
    t0 = time.perf_counter()
    rows = run_grid([(s, s) for s in (4, 8, 16, 32)], reps=5)
    elapsed = time.perf_counter() - t0
    speedup = rows[-1].speedup
    criterion("C7 performance at N=F=32",
              f"median speedup {speedup:.1f}x >= 10x, grid {elapsed:.1f} s < 300 s")
    assert speedup >= 10
    assert elapsed < 300


def test_c8_negative_control(criterion, capsys):
    clean = main(["verify", "--N", "3", "--F", "2", "--seed", "42"])
    corrupted = main(["verify", "--N", "3", "--F", "2", "--seed", "42", "--debug-corrupt", "1,1"])
    capsys.readouterr()
    criterion("C8 negative control", f"clean exit {clean}, corrupted exit {corrupted}")
    assert clean == 0
    assert corrupted == 1
