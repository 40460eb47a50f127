import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given

from raqmod.scalar import PeriodScalar, bernoulli, divisor_sum, numeric_value, zeta_value

from .conftest import scalars

Z3 = PeriodScalar.zeta(3)
Z5 = PeriodScalar.zeta(5)


@pytest.mark.parametrize("n, expected", [(0, Fraction(1)), (2, Fraction(1, 6)), (4, Fraction(-1, 30)), (12, Fraction(-691, 2730))])
def test_bernoulli_values(n, expected):
    assert bernoulli(n) == expected


def test_bernoulli_matches_mpmath():
    for n in range(0, 31, 2):
        assert bernoulli(n) == Fraction(mpmath.bernfrac(n)[0], mpmath.bernfrac(n)[1])


def test_bernoulli_recurrence():
    for n in range(2, 31, 2):
        # Σ_{j=0}^{n} C(n+1, j) B_j with B_1 = -1/2 and odd B_j = 0 otherwise
        total = sum(math.comb(n + 1, j) * bernoulli(j) for j in range(0, n + 1, 2)) - Fraction(n + 1, 2)
        assert total == 0


@pytest.mark.parametrize("n", [1, 3, -2])
def test_bernoulli_rejects_odd_or_negative(n):
    with pytest.raises(ValueError):
        bernoulli(n)


def test_divisor_sum_examples():
    assert divisor_sum(1, 4) == 7
    assert divisor_sum(5, 1) == 1
    assert divisor_sum(3, 2) == 9


def test_divisor_sum_brute_force():
    for k in range(1, 6):
        for n in range(1, 60):
            assert divisor_sum(k, n) == sum(d**k for d in range(1, n + 1) if n % d == 0)


def test_divisor_sum_rejects_nonpositive():
    with pytest.raises(ValueError):
        divisor_sum(1, 0)


def test_scalar_examples():
    assert (2 + Z3) * Z3 == 2 * Z3 + Z3 * Z3
    assert (Z3 + (-1) * Z3).is_zero()
    assert dict((Z3 * Z5).terms) == {(3, 5): Fraction(1)}
    assert str(PeriodScalar.zeta(3, Fraction(-1, 2))) == "-1/2·ζ3"


def test_json_round_trip():
    s = PeriodScalar({(3, 3): Fraction(-1, 2), (): Fraction(7, 3)}) + PeriodScalar.symbol("c", 2)
    assert PeriodScalar.from_json(s.to_json()) == s
    assert {"zetas": [3, 3], "rat": "-1/2"} in s.to_json()["terms"]


def test_zeta_value_matches_mpmath():
    for n in (2, 3, 5, 7, 9, 11):
        assert abs(zeta_value(n) - float(mpmath.zeta(n))) < 1e-15


def test_numeric_value_examples():
    assert abs(numeric_value(Z3, 1e-9) - 1.2020569032) < 1e-9
    assert numeric_value(PeriodScalar.rational(Fraction(1, 240))) == 1 / 240
    assert abs(numeric_value(Z3 * Z3) - numeric_value(Z3) ** 2) < 1e-15


def test_numeric_value_needs_symbols():
    c = PeriodScalar.symbol("c")
    with pytest.raises(KeyError):
        numeric_value(c)
    assert numeric_value(c * 2, symbols={"c": 0.25}) == 0.5


def test_substitute_symbol():
    c = PeriodScalar.symbol("c", 3) + Z3
    assert c.substitute({"c": Z5}) == 3 * Z5 + Z3


@given(scalars(), scalars(), scalars())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()


@given(scalars(), scalars())
def test_numeric_value_is_a_homomorphism(a, b):
    va, vb = numeric_value(a), numeric_value(b)
    tol = 1e-12 * (1 + abs(va)) * (1 + abs(vb))
    assert abs(numeric_value(a * b) - va * vb) < tol
    assert abs(numeric_value(a + b) - (va + vb)) < tol
