import random
from fractions import Fraction

import pytest

from orbigenus.exactmath import (
    CycNum,
    NotRationalError,
    SingularMatrixError,
    cyc_to_rational,
    cyclotomic_polynomial,
    euler_phi,
    int_matrix,
    invert_rational_matrix,
    mat_det,
    mat_mul,
    root_of_unity,
    smith_normal_form,
)

F = Fraction


def test_invert_scalar_matrix():
    a = int_matrix([[5 if i == j else 0 for j in range(5)] for i in range(5)])
    inv = invert_rational_matrix(a)
    assert inv == tuple(tuple(F(1, 5) if i == j else F(0) for j in range(5)) for i in range(5))


def test_invert_loop_matrix():
    inv = invert_rational_matrix(int_matrix([[2, 1], [1, 2]]))
    assert inv == ((F(2, 3), F(-1, 3)), (F(-1, 3), F(2, 3)))


def test_invert_chain_matrix():
    inv = invert_rational_matrix(int_matrix([[3, 1], [0, 4]]))
    assert inv == ((F(1, 3), F(-1, 12)), (F(0), F(1, 4)))


def test_invert_singular_raises():
    with pytest.raises(SingularMatrixError):
        invert_rational_matrix(int_matrix([[1, 2], [2, 4]]))


def test_invert_round_trip_random():
    rng = random.Random(7)
    for _ in range(25):
        n = rng.randint(1, 5)
        a = int_matrix([[rng.randint(-6, 6) for _ in range(n)] for _ in range(n)])
        if mat_det(a) == 0:
            continue
        prod = mat_mul(a, invert_rational_matrix(a))
        assert prod == tuple(tuple(F(int(i == j)) for j in range(n)) for i in range(n))


def test_snf_scalar_matrix():
    a = int_matrix([[5 if i == j else 0 for j in range(5)] for i in range(5)])
    assert smith_normal_form(a).factors == (5, 5, 5, 5, 5)


@pytest.mark.parametrize(
    "mat,factors",
    [([[2, 1], [1, 2]], (1, 3)), ([[3, 1], [0, 4]], (1, 12))],
)
def test_snf_small_examples(mat, factors):
    res = smith_normal_form(int_matrix(mat))
    assert res.factors == factors


def test_snf_transforms_random():
    rng = random.Random(13)
    for _ in range(30):
        rows = rng.randint(1, 4)
        cols = rng.randint(1, 4)
        a = int_matrix([[rng.randint(-9, 9) for _ in range(cols)] for _ in range(rows)])
        res = smith_normal_form(a)
        assert mat_det(res.left) in (1, -1)
        assert mat_det(res.right) in (1, -1)
        d = mat_mul(mat_mul(res.left, a), res.right)
        for i in range(rows):
            for j in range(cols):
                expected = res.factors[i] if i == j and i < len(res.factors) else 0
                assert d[i][j] == expected
        # divisibility chain
        nonzero = [f for f in res.factors if f]
        for x, y in zip(nonzero, nonzero[1:]):
            assert y % x == 0
        if rows == cols:
            prod = 1
            for f in res.factors:
                prod *= f
            assert prod == abs(mat_det(a))


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(2) == (1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(5) == (1, 1, 1, 1, 1)
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)
    assert euler_phi(12) == 4


def test_root_of_unity_identity():
    for n in (1, 2, 3, 4, 5, 7, 12, 30):
        assert cyc_to_rational(root_of_unity(0, n)) == 1


def test_root_of_unity_fourth():
    i = root_of_unity(1, 4)
    assert cyc_to_rational(i * i) == -1


def test_fifth_roots_sum_to_zero():
    total = CycNum.zero(5)
    for k in range(5):
        total = total + root_of_unity(k, 5)
    assert total.is_zero()


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 10, 12])
def test_root_of_unity_orders(n):
    for k in range(n):
        z = root_of_unity(k, n)
        order = n // __import__("math").gcd(k, n) if k else 1
        acc = CycNum.one(n)
        seen_one_early = False
        for step in range(1, order + 1):
            acc = acc * z
            if step < order and acc == CycNum.one(n):
                seen_one_early = True
        assert acc == CycNum.one(n)
        assert not seen_one_early


def test_inverse_roots_multiply_to_one():
    for n in (3, 5, 8, 12):
        for k in range(n):
            assert root_of_unity(k, n) * root_of_unity(-k, n) == CycNum.one(n)


def test_cyc_to_rational_cases():
    assert cyc_to_rational(CycNum.one(5)) == 1
    z = root_of_unity(1, 4) + root_of_unity(3, 4)
    assert cyc_to_rational(z) == 0
    with pytest.raises(NotRationalError) as err:
        cyc_to_rational(root_of_unity(1, 5))
    assert err.value.residual  # carries the nonzero components


def test_cycnum_ring_axioms_random():
    rng = random.Random(5)
    for n in (2, 4, 5, 6, 12):
        phi = euler_phi(n)

        def rand_elem():
            return CycNum(n, tuple(F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(phi)))

        for _ in range(15):
            a, b, c = rand_elem(), rand_elem(), rand_elem()
            assert a * b == b * a
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c


def test_conjugate_and_lift():
    z = root_of_unity(1, 5)
    assert z.conjugate() == root_of_unity(4, 5)
    assert (z * z.conjugate()) == CycNum.one(5)
    lifted = z.lift(10)
    assert lifted == root_of_unity(2, 10)
    # lifting a rational keeps it rational
    assert CycNum.from_rational(5, F(3, 7)).lift(10) == CycNum.from_rational(10, F(3, 7))


def test_complex_value_agrees():
    import cmath

    for n in (3, 5, 12):
        for k in range(n):
            approx = root_of_unity(k, n).complex_value()
            exact = cmath.exp(2j * cmath.pi * k / n)
            assert abs(approx - exact) < 1e-12
