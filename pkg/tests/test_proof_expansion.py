import itertools
from fractions import Fraction

import numpy as np
import pytest
import sympy

from krondet import proof_expansion as pe
from krondet.closed_form import bareiss_det
from krondet.core import (DenseMatrix, KronRankOneInstance, PermutationTuple, ResourceError,
                          ScalarMode, VerificationError, perm_sign)
from krondet.dense_oracle import kron, leibniz_det
from krondet.generator import Profile, random_instance

EXACT = ScalarMode.EXACT


def sympy_det(M: DenseMatrix) -> Fraction:
    d = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row]
                      for row in M.data]).det()
    return Fraction(int(d.p), int(d.q))


def identity_instance(N, F):
    return random_instance(N, F, 0, Profile.IDENTITY, EXACT)


def test_enumerate_counts():
    assert len(list(pe.enumerate_gamma(1, 3))) == 1
    assert len(list(pe.enumerate_gamma(3, 2))) == 36


def test_enumerate_n2_f2_order():
    got = [t.gammas for t in pe.enumerate_gamma(2, 2)]
    ident, swap = (0, 1), (1, 0)
    assert got == [(ident, ident), (ident, swap), (swap, ident), (swap, swap)]


def test_enumerate_unique_and_lexicographic():
    got = [t.gammas for t in pe.enumerate_gamma(3, 3)]
    assert len(set(got)) == 216
    assert got == sorted(got)


def test_enumerate_limit():
    with pytest.raises(ResourceError):
        next(pe.enumerate_gamma(5, 3, limit=10**6))
    assert pe.tuple_count(4, 3) == 13824


def test_b_columns_identity():
    inst = identity_instance(3, 1)
    assert pe.b_columns_det(inst, (0, 1, 2)) == 1
    assert pe.b_columns_det(inst, (1, 0, 2)) == 0


def test_b_columns_all_perms_3x3_against_direct_construction():
    inst = random_instance(3, 2, 17, Profile.INTEGER_SMALL)
    X, Y = inst.X.data, inst.Y.data
    for g in itertools.permutations(range(3)):
        # column j = Y[j, g(j)] * X[:, g(j)], built here without the library
        cols = [[Y[j, g[j]] * X[k, g[j]] for j in range(3)] for k in range(3)]
        expect = sympy_det(DenseMatrix(cols, EXACT))
        assert pe.b_columns_det(inst, g) == expect
        assert expect == pe.y_diagonal_product(inst.Y, g) * bareiss_det(inst.X) * perm_sign(g)


def test_b_columns_float():
    inst = random_instance(4, 1, 3, Profile.UNIFORM)
    for g in itertools.permutations(range(4)):
        pe.b_columns_det(inst, g)


def test_b_columns_detects_convention_bug(monkeypatch):
    # with the sign dropped, the two routes disagree on odd permutations;
    # SINGULAR_A guarantees nonsingular X and Y
    inst = random_instance(3, 1, 2, Profile.SINGULAR_A, EXACT)
    monkeypatch.setattr(pe, "perm_sign", lambda g: 1)
    with pytest.raises(VerificationError):
        for g in itertools.permutations(range(3)):
            pe.b_columns_det(inst, g)


def literal_c_diag(inst, gamma):
    """Column (f, j) taken from term gamma_f(j)'s Kronecker summand, then every
    off-diagonal block zeroed."""
    N, F = inst.N, inst.F
    terms = [kron(inst.A[n], inst.B(n + 1)).data for n in range(N)]
    C = np.full((N * F, N * F), Fraction(0), dtype=object)
    for f, g in enumerate(gamma.gammas):
        for j in range(N):
            C[:, f * N + j] = terms[g[j]][:, f * N + j]
    for f in range(F):
        for h in range(F):
            if f != h:
                C[f * N:(f + 1) * N, h * N:(h + 1) * N] = Fraction(0)
    return DenseMatrix(C, EXACT)


def test_c_diag_identity():
    inst = identity_instance(3, 2)
    ident = PermutationTuple(3, 2, ((0, 1, 2), (0, 1, 2)))
    assert pe.c_diag_det(inst, ident).total == 1


def test_c_diag_single_block():
    inst = random_instance(3, 1, 5, Profile.INTEGER_SMALL)
    for t in pe.enumerate_gamma(3, 1):
        g = t.gammas[0]
        scale = Fraction(1)
        for n in g:
            scale *= inst.A[n].data[0, 0]
        assert pe.c_diag_det(inst, t).total == scale * pe.b_columns_det(inst, g)


def test_c_diag_against_literal_assembly():
    for seed in range(5):
        inst = random_instance(2, 2, seed, Profile.INTEGER_SMALL)
        for t in pe.enumerate_gamma(2, 2):
            contrib = pe.c_diag_det(inst, t)
            C = literal_c_diag(inst, t)
            assert pe.assemble_c_diag(inst, t) == C
            assert contrib.total == leibniz_det(C)
            prod = Fraction(1)
            for b in contrib.per_block_dets:
                prod *= b
            assert contrib.total == prod


def test_c_diag_assembly_n3_f2():
    inst = random_instance(3, 2, 8, Profile.INTEGER_SMALL)
    for t in pe.enumerate_gamma(3, 2):
        assert pe.c_diag_det(inst, t).total == bareiss_det(literal_c_diag(inst, t))


def test_sum_block_diagonal_identity():
    assert pe.sum_block_diagonal(identity_instance(3, 2)) == 1


def test_sum_block_diagonal_f1():
    for seed in range(5):
        inst = random_instance(3, 1, seed, Profile.INTEGER_SMALL)
        a = Fraction(1)
        for m in inst.A:
            a *= m.data[0, 0]
        got = pe.sum_block_diagonal(inst)
        assert got == a * bareiss_det(inst.X) * bareiss_det(inst.Y)
        # F = 1: the formula reads det(X diag(a) Y^T)
        G = inst.X.data.dot(np.diag([m.data[0, 0] for m in inst.A])).dot(inst.Y.data.T)
        assert sympy_det(DenseMatrix(G, EXACT)) == got


def test_sum_block_diagonal_n3_f2_brute_force():
    inst = random_instance(3, 2, 30, Profile.INTEGER_SMALL)
    brute = sum((pe.c_diag_det(inst, t).total for t in pe.enumerate_gamma(3, 2)), Fraction(0))
    assert pe.sum_block_diagonal(inst) == brute == pe.total_off_rhs(inst)


def test_sum_block_diagonal_float():
    inst = random_instance(3, 2, 30, Profile.UNIFORM)
    assert pe.sum_block_diagonal(inst) == pytest.approx(float(pe.total_off_rhs(inst)), rel=1e-9)


def test_y_power_examples():
    assert pe.y_power_identity(DenseMatrix.identity(2, EXACT), 2) == 1
    Y = random_instance(1, 3, 4, Profile.INTEGER_SMALL).A[0]
    leib = sum((perm_sign(g) * Y.data[0, g[0]] * Y.data[1, g[1]] * Y.data[2, g[2]]
                for g in itertools.permutations(range(3))), Fraction(0))
    assert pe.y_power_identity(Y, 1) == leib
    Y = DenseMatrix([[2, -1, 3], [0, 1, -2], [1, 3, 1]], EXACT)
    assert pe.y_power_identity(Y, 3) == sympy_det(Y) ** 3


def test_y_power_factorises():
    Y = DenseMatrix([["1/2", -1, 3], [0, 1, "-2/3"], [1, 3, 1]], EXACT)
    single = sum((pe.signed_y_term(Y, g) for g in itertools.permutations(range(3))), Fraction(0))
    for F in (1, 2, 3):
        brute = Fraction(0)
        for gammas in itertools.product(itertools.permutations(range(3)), repeat=F):
            term = Fraction(1)
            for g in gammas:
                term *= perm_sign(g)
                for k in range(3):
                    term *= Y.data[k, g[k]]
            brute += term
        assert brute == single ** F == pe.y_power_identity(Y, F)


def test_full_leibniz_small():
    for N, F in [(1, 1), (2, 2), (2, 3), (3, 2), (4, 2)]:
        lhs, rhs = pe.full_leibniz_check(random_instance(N, F, 13, Profile.INTEGER_SMALL))
        assert lhs == rhs


def test_full_leibniz_tracks_scaling():
    inst = random_instance(2, 2, 0, Profile.SINGULAR_A)
    inst = KronRankOneInstance(2, 2, (inst.X, inst.Y), inst.X, inst.Y).to_mode(EXACT)
    l1, r1 = pe.full_leibniz_check(inst)
    assert r1 != 0
    X2 = DenseMatrix(np.array(inst.X.data) * 2, EXACT)
    l2, _ = pe.full_leibniz_check(KronRankOneInstance(2, 2, inst.A, X2, inst.Y))
    assert l2 == 2 ** 4 * l1
