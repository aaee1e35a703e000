import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from daeindex.diffpoly import NEG_INF as NI
from daeindex.errors import InfiniteEntry, KTooSmall, TooLarge
from daeindex.jacobi import (
    DualCover,
    binary_matrix,
    bounds,
    jacobi_bruteforce,
    jacobi_number,
    koenig_dual,
    optimal_injection,
    rational_rank_bound,
    triangular_block,
    triangular_expand,
)
from daeindex.linalg import rank_exact
from daeindex.prolong import pseudo_jacobian
from daeindex.rank import extend_witness
from daeindex.system import order_matrix

from conftest import load


def test_pendulum_order_matrices():
    assert jacobi_number([[2, 0, 0], [0, 2, 0], [0, 0, 0]]) == 4
    assert jacobi_number([[2, NI, 0], [NI, 2, 0], [0, 0, NI]]) == 2


def test_trivial_matrices():
    assert jacobi_number([[1 if i == j else 0 for j in range(4)] for i in range(4)]) == 4
    assert jacobi_number([[1, 2], [NI, NI]]) == NI
    assert jacobi_number([]) == 0
    assert jacobi_bruteforce([[5]]) == 5
    assert jacobi_bruteforce([[1, 2], [3, 4]]) == 5
    assert jacobi_bruteforce([[1, 0, 0], [0, 1, 0], [0, 0, 0]]) == 2


def test_rectangular_and_tall():
    A = [[3, 1, 4, 1], [5, 9, 2, 6]]
    assert jacobi_number(A) == jacobi_bruteforce(A) == 13
    tall = [list(c) for c in zip(*A)]
    assert jacobi_number(tall) == 13
    inj = optimal_injection(A)
    assert sum(A[i][inj[i]] for i in range(2)) == 13 and len(set(inj)) == 2


def test_ragged_rejected():
    with pytest.raises(ValueError):
        jacobi_number([[1, 2], [3]])


def test_bruteforce_cap():
    with pytest.raises(TooLarge):
        jacobi_bruteforce([[0] * 12 for _ in range(12)])


def test_dual_examples():
    d = koenig_dual([[2, 0, 0], [0, 2, 0], [0, 0, 0]])
    assert d.total == 4 and d.covers([[2, 0, 0], [0, 2, 0], [0, 0, 0]])
    assert koenig_dual([[0, 0], [0, 0]]) == DualCover((0, 0), (0, 0))
    d = koenig_dual([[1, 2], [3, 4]])
    assert d.total == 5 and d.covers([[1, 2], [3, 4]])
    with pytest.raises(InfiniteEntry):
        koenig_dual([[NI, 1]])


def test_binary_matrix():
    assert binary_matrix([[0, 5], [7, 0]]) == [[0, 1], [1, 0]]
    assert binary_matrix([[0, 0]]) == [[0, 0]]


def test_binary_of_pendulum_first_matrix(pendulum, pendulum_witness):
    w = extend_witness(pendulum, pendulum_witness, 2)
    M = pseudo_jacobian(pendulum, 1, 1).evaluate(w.values)
    assert binary_matrix(M) == [[1, 0, 0], [0, 1, 0], [0, 0, 0]]


def test_triangular_blocks():
    assert triangular_block(3, 0) == [[0] * 3] * 3
    assert triangular_block(2, 2) == [[1, 0], [1, 1]]
    assert triangular_block(3, 1) == [[0, 0, 0], [0, 0, 0], [1, 0, 0]]
    with pytest.raises(KTooSmall):
        triangular_expand([[3]], 2)
    T = triangular_expand([[1, 2]], 2)
    assert T == [[0, 0, 1, 0], [1, 0, 1, 1]]


def test_bounds_examples(pendulum, expode):
    b = bounds(pendulum)
    assert (b.J_E0, b.index_bound_rhs, b.J_E) == (4, 6, 2)
    b = bounds(expode)
    assert (b.J_E0, b.index_bound_rhs) == (1, 1)
    for n in (3, 4, 5):
        b = bounds(load(f"hessenberg{n}"))
        assert (b.J_E0, b.index_bound_rhs, b.J_E) == (n - 1, n, 0)


ext_entry = st.one_of(st.just(NI), st.integers(0, 4))


@st.composite
def ext_matrices(draw, max_rows=4, max_cols=5, entry=ext_entry):
    rows = draw(st.integers(1, max_rows))
    cols = draw(st.integers(1, max_cols))
    return [[draw(entry) for _ in range(cols)] for _ in range(rows)]


@given(ext_matrices())
def test_hungarian_matches_bruteforce(A):
    assert jacobi_number(A) == jacobi_bruteforce(A)


@given(ext_matrices(entry=st.integers(0, 3)))
def test_duality(A):
    d = koenig_dual(A)
    assert d.covers(A)
    assert d.total == jacobi_number(A)
    assert all(x >= 0 for x in d.lam + d.phi)


@given(ext_matrices(entry=st.integers(0, 3), max_rows=4, max_cols=4), st.randoms(use_true_random=False))
def test_weak_duality_with_random_covers(A, rnd):
    s, m = len(A), len(A[0])
    lam = [max(A[i]) - rnd.randint(0, 2) for i in range(s)]
    lam = [max(0, x) for x in lam]
    phi = [max([0] + [A[i][j] - lam[i] for i in range(s)]) for j in range(m)]
    cover = DualCover(tuple(lam), tuple(phi))
    assert cover.covers(A)
    assert cover.total >= jacobi_number(A)


@given(ext_matrices(entry=st.integers(0, 4), max_rows=3, max_cols=4), st.integers(0, 2))
def test_triangular_expansion_preserves_jacobi_number(A, extra):
    k = max(1, max(max(r) for r in A) + extra)
    assert jacobi_number(triangular_expand(A, k)) == jacobi_bruteforce(A)


@given(st.lists(st.lists(st.fractions(-3, 3, max_denominator=3), min_size=7, max_size=7), min_size=1, max_size=5),
       st.integers(1, 7))
def test_rank_bounded_by_binary_jacobi(rows, cols):
    M = [r[:cols] for r in rows]
    assert rank_exact(M) <= rational_rank_bound(M)


@given(ext_matrices(), st.randoms(use_true_random=False))
def test_permutation_invariance(A, rnd):
    rows = A[:]
    rnd.shuffle(rows)
    perm = list(range(len(A[0])))
    rnd.shuffle(perm)
    assert jacobi_number([[r[p] for p in perm] for r in rows]) == jacobi_number(A)


@given(st.integers(1, 4), st.integers(0, 5), st.randoms(use_true_random=False))
def test_constant_shift(n, c, rnd):
    A = [[rnd.randint(0, 4) for _ in range(n)] for _ in range(n)]
    assert jacobi_number([[a + c for a in r] for r in A]) == jacobi_number(A) + n * c


@pytest.mark.parametrize("name", ["pendulum", "hessenberg3", "hessenberg4", "hessenberg5", "expode", "nonqr"])
def test_order_bound_below_index_bound(name):
    om = order_matrix(load(name))
    assert jacobi_number(om.E) <= jacobi_number(om.E0)
