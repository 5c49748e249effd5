import random

import pytest

from multloc.intlinalg import (
    determinant,
    exgcd,
    hnf_rows,
    lattice_member,
    left_nullspace,
    mat_mul,
    smith_normal_form,
    solve_left,
)


def test_exgcd_basic():
    for a, b in [(0, 0), (0, 5), (5, 0), (12, 18), (-12, 18), (7, -3), (-4, -6)]:
        g, x, y = exgcd(a, b)
        assert g >= 0
        assert x * a + y * b == g
        import math
        assert g == math.gcd(a, b)


def test_snf_identity():
    res = smith_normal_form([[1, 0], [0, 1]])
    assert res.factors == [1, 1]
    assert res.D == [[1, 0], [0, 1]]


def test_snf_diag_2_3():
    # hand-checkable: diag(2, 3) is equivalent to diag(1, 6)
    res = smith_normal_form([[2, 0], [0, 3]])
    assert res.factors == [1, 6]


def test_snf_zero_matrix():
    res = smith_normal_form([[0]])
    assert res.factors == [0]


def _check_snf_postconditions(a):
    res = smith_normal_form(a)
    rows, cols = len(a), len(a[0])
    assert mat_mul(mat_mul(res.U, a), res.V) == res.D
    assert abs(determinant(res.U)) == 1
    assert abs(determinant(res.V)) == 1
    # diagonal with divisibility chain
    for i in range(rows):
        for j in range(cols):
            if i != j:
                assert res.D[i][j] == 0
    nz = [d for d in res.factors if d != 0]
    for i in range(len(nz) - 1):
        assert nz[i + 1] % nz[i] == 0
    assert all(d >= 0 for d in res.factors)


def test_snf_random_postconditions():
    rng = random.Random(1234)
    for _ in range(120):
        r = rng.randint(1, 8)
        c = rng.randint(1, 8)
        a = [[rng.randint(-50, 50) for _ in range(c)] for _ in range(r)]
        _check_snf_postconditions(a)


def test_snf_rectangular():
    _check_snf_postconditions([[2, 4, 6], [4, 8, 10]])
    _check_snf_postconditions([[3], [6], [9]])


def test_hnf_canonical_equality():
    # same row lattice, different generating sets
    a = hnf_rows([[2, 0], [0, 3]])
    b = hnf_rows([[2, 3], [2, 0], [4, 3]])
    assert a == b
    assert lattice_member(a, [2, 3])
    assert lattice_member(a, [0, 3])
    assert not lattice_member(a, [1, 0])


def test_hnf_random_membership():
    rng = random.Random(99)
    for _ in range(60):
        r = rng.randint(1, 5)
        c = rng.randint(1, 5)
        a = [[rng.randint(-9, 9) for _ in range(c)] for _ in range(r)]
        basis = hnf_rows(a)
        # every original row is a member
        for row in a:
            assert lattice_member(basis, row)
        # random combinations are members
        for _ in range(5):
            coeffs = [rng.randint(-3, 3) for _ in range(r)]
            combo = [sum(coeffs[i] * a[i][j] for i in range(r)) for j in range(c)]
            assert lattice_member(basis, combo)


def test_left_nullspace():
    a = [[1, 2], [2, 4], [0, 1]]
    null = left_nullspace(a)
    for v in null:
        assert all(sum(v[i] * a[i][j] for i in range(3)) == 0 for j in range(2))
    # (2, -1, 0) is in the left kernel
    basis = hnf_rows(null)
    assert lattice_member(basis, [2, -1, 0])


def test_solve_left():
    a = [[2, 0], [0, 3]]
    v = solve_left(a, [4, 3])
    assert v is not None
    assert [sum(v[i] * a[i][j] for i in range(2)) for j in range(2)] == [4, 3]
    assert solve_left(a, [1, 0]) is None


def test_determinant():
    assert determinant([[2, 0], [0, 3]]) == 6
    assert determinant([[0, 1], [1, 0]]) == -1
    assert determinant([[1, 2], [2, 4]]) == 0
    rng = random.Random(7)
    for _ in range(30):
        n = rng.randint(1, 5)
        a = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(n)]
        # compare against cofactor expansion
        def cof(m):
            k = len(m)
            if k == 1:
                return m[0][0]
            tot = 0
            for j in range(k):
                minor = [row[:j] + row[j + 1:] for row in m[1:]]
                tot += (-1) ** j * m[0][j] * cof(minor)
            return tot
        assert determinant(a) == cof(a)
