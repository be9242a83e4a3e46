import itertools
import math
from functools import reduce

import numpy as np
import pytest
import scipy.sparse as sps
from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors as sympy_factors

from morsewitten.errors import NotAComplex
from morsewitten.homology import (
    HomologyProfile,
    homology_of_complex,
    invariant_factors,
    smith_normal_form,
)


def _determinant_divisor_factors(A):
    # d_k = D_k / D_{k-1} with D_k the gcd of all k x k minors
    A = Matrix(A)
    m, n = A.shape
    prev, out = 1, []
    for k in range(1, min(m, n) + 1):
        minors = [A.extract(list(r), list(c)).det()
                  for r in itertools.combinations(range(m), k)
                  for c in itertools.combinations(range(n), k)]
        D = reduce(math.gcd, (abs(int(x)) for x in minors), 0)
        if D == 0:
            break
        out.append(D // prev)
        prev = D
    return tuple(out)


def _check(A):
    res = smith_normal_form(A)
    A = np.asarray(A, dtype=object)
    assert (res.U.dot(A).dot(res.V) == res.S).all()
    return res


def test_snf_examples():
    assert _check(np.eye(4, dtype=int)).S.tolist() == np.eye(4, dtype=int).tolist()
    assert not _check(np.zeros((3, 2), int)).S.any()
    assert _check([[2, 4], [6, 8]]).invariant_factors == (2, 4)


def test_snf_empty_shapes():
    res = smith_normal_form(np.zeros((0, 3), int))
    assert res.S.shape == (0, 3) and res.V.shape == (3, 3)
    assert invariant_factors(np.zeros((2, 0), int)) == ()


def test_snf_against_determinant_divisors():
    rng = np.random.default_rng(3)
    for _ in range(150):
        m, n = rng.integers(1, 5, size=2)
        A = rng.integers(-6, 7, size=(m, n))
        assert _check(A).invariant_factors == _determinant_divisor_factors(A)


def test_snf_against_sympy_on_larger_matrices():
    rng = np.random.default_rng(4)
    for _ in range(60):
        m, n = rng.integers(1, 9, size=2)
        A = rng.integers(-9, 10, size=(m, n))
        # low-rank products force nontrivial factors
        if rng.random() < 0.5:
            A = A @ rng.integers(-2, 3, size=(n, n))
        expected = tuple(int(d) for d in sympy_factors(Matrix(A.tolist()), domain=ZZ) if d != 0)
        expected = tuple(abs(d) for d in expected)
        assert _check(A).invariant_factors == expected
        assert invariant_factors(A) == expected
        assert invariant_factors(sps.csr_matrix(A)) == expected


def test_large_entries_stay_exact():
    A = [[10 ** 30, 3], [7, 10 ** 25]]
    res = _check(A)
    assert res.invariant_factors[-1] == abs(10 ** 55 - 21)


matrices = st.integers(1, 6).flatmap(lambda m: st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n),
                       min_size=m, max_size=m)))


@settings(max_examples=150, deadline=None)
@given(matrices, st.randoms(use_true_random=False))
def test_invariant_factors_unchanged_by_permutation_and_sign(A, rnd):
    A = np.array(A)
    base = smith_normal_form(A).invariant_factors
    rows, cols = list(range(A.shape[0])), list(range(A.shape[1]))
    rnd.shuffle(rows)
    rnd.shuffle(cols)
    B = A[rows][:, cols] * np.array([rnd.choice((-1, 1)) for _ in rows])[:, None]
    assert smith_normal_form(B).invariant_factors == base
    assert invariant_factors(B) == base


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_divisibility_chain(A):
    d = smith_normal_form(A).invariant_factors
    assert all(x > 0 for x in d)
    assert all(d[i + 1] % d[i] == 0 for i in range(len(d) - 1))


def test_homology_examples():
    circle = [[-1, 0, 1], [1, -1, 0], [0, 1, -1]]
    assert homology_of_complex([3, 3], [None, circle]).betti == (1, 1)
    assert homology_of_complex([1, 2, 1], [None, None, None]) == HomologyProfile.from_betti((1, 2, 1))
    prof = homology_of_complex([1, 1], [None, [[2]]])
    assert prof.groups[0].betti == 0 and prof.groups[0].torsion == (2,)
    assert prof.groups[1].betti == 0


def test_not_a_complex():
    with pytest.raises(NotAComplex) as err:
        homology_of_complex([1, 1, 1], [None, [[1]], [[1]]])
    assert err.value.degree == 2


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=2, max_size=4), st.integers(0, 10 ** 6))
def test_euler_characteristic_identity(ranks, seed):
    # only d_1 is nonzero, so every composition vanishes
    rng = np.random.default_rng(seed)
    bs = [None]
    for k in range(1, len(ranks)):
        B = np.zeros((ranks[k - 1], ranks[k]), dtype=np.int64)
        if k == 1 and ranks[0] and ranks[1]:
            B = rng.integers(-3, 4, size=B.shape)
        bs.append(B)
    prof = homology_of_complex(ranks, bs)
    assert prof.euler_characteristic == sum((-1) ** k * r for k, r in enumerate(ranks))


def test_profile_equality_ignores_trailing_zero_degrees():
    a = HomologyProfile.from_betti((1, 0, 1))
    assert a == HomologyProfile.from_betti((1, 0, 1, 0))
    assert a != HomologyProfile.from_betti((1, 1, 1))
    assert a.as_dict() == [{"degree": 0, "betti": 1, "torsion": []},
                           {"degree": 1, "betti": 0, "torsion": []},
                           {"degree": 2, "betti": 1, "torsion": []}]
    assert str(HomologyProfile.from_betti((1, 0), {1: (2,)})) == "H0=Z, H1=Z/2"
