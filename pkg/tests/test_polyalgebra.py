"""Exact integer polynomial arithmetic and the rounding/certification steps."""

import random
from fractions import Fraction

import pytest
from mpmath import mp, mpc, mpf

from classpoly.errors import PowerCheckError, RoundingFailureError
from classpoly.modfunc import APComplex
from classpoly.polyalgebra import (
    IntPolynomial,
    eval_poly,
    exact_divide,
    poly_gcd,
    power_check,
    round_coefficients,
    squarefree_part,
)


def P(*desc):
    """Build from descending coefficients, matching how humans write them."""
    return IntPolynomial(reversed(desc))


# ----------------------------------------------------------------------
# basics
# ----------------------------------------------------------------------

def test_construction_strips_trailing_zeros():
    p = IntPolynomial([1, 2, 0, 0])
    assert p.coeffs == (1, 2)
    assert p.degree == 1
    assert IntPolynomial([]).degree == -1
    assert IntPolynomial([0, 0]).is_zero()


def test_immutability():
    p = P(1, 2, 3)
    with pytest.raises(AttributeError):
        p.coeffs = (1,)


def test_pretty_printing():
    assert str(P(1, -2, 1)) == "x^2 - 2*x + 1"
    assert str(P(1, 0, -6896880000, -567663552000000)) == (
        "x^3 - 6896880000*x - 567663552000000"
    )
    assert str(P(-1, 1)) == "-x + 1"
    assert str(IntPolynomial(())) == "0"


def test_mul_and_pow():
    x_minus_1 = P(1, -1)
    x_plus_1 = P(1, 1)
    assert x_minus_1 * x_plus_1 == P(1, 0, -1)
    assert x_minus_1 * 3 == P(3, -3)
    assert 3 * x_minus_1 == P(3, -3)
    assert x_minus_1 ** 3 == P(1, -3, 3, -1)
    assert x_minus_1 ** 0 == P(1)
    with pytest.raises(ValueError):
        x_minus_1 ** -1
    rng = random.Random(41)
    for _ in range(25):
        a = IntPolynomial(rng.randint(-9, 9) for _ in range(rng.randint(1, 6)))
        b = IntPolynomial(rng.randint(-9, 9) for _ in range(rng.randint(1, 6)))
        c = IntPolynomial(rng.randint(-9, 9) for _ in range(rng.randint(1, 6)))
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)


def test_derivative_and_evaluate():
    p = P(3, 0, -2, 5)  # 3x^3 - 2x + 5
    assert p.derivative() == P(9, 0, -2)
    assert p.evaluate(2) == 3 * 8 - 4 + 5
    assert p.evaluate(Fraction(1, 2)) == Fraction(3, 8) - 1 + 5
    with mp.workprec(128):
        z = mpc(1, 1)
        assert abs(p.evaluate(z) - (3 * z ** 3 - 2 * z + 5)) < mpf(2) ** -100


def test_content_and_primitive_positive():
    p = P(-4, 8, -12)
    assert p.content() == 4
    assert p.primitive_positive() == P(1, -2, 3)
    assert P(2, 4).primitive_positive() == P(1, 2)


def test_json_round_trip_with_huge_coefficients():
    p = P(1, -(10 ** 40), 567663552000000)
    strings = p.to_json_list()
    assert all(isinstance(s, str) for s in strings)
    assert IntPolynomial.from_json_list(strings) == p


# ----------------------------------------------------------------------
# rounding
# ----------------------------------------------------------------------

def test_round_coefficients_basic():
    values = [mpf(1) + mpf(2) ** -40, mpf("81.99999999"), mpf("-996.00000001")]
    poly, residual = round_coefficients(values)
    assert poly == IntPolynomial([1, 82, -996])
    assert mpf("0.9e-8") < residual < mpf("1.1e-8")


def test_round_coefficients_failure_threshold():
    values = [mpf("0.4"), mpf(1)]
    with pytest.raises(RoundingFailureError) as info:
        round_coefficients(values, fail_above=mpf("0.25"))
    assert info.value.residual >= mpf("0.25")
    poly, residual = round_coefficients(values)  # no threshold: best effort
    assert poly == IntPolynomial([0, 1])
    assert residual == mpf("0.4")


def test_round_coefficients_counts_imaginary_leakage():
    values = [mpc(3, "0.3"), mpf(1)]
    _, residual = round_coefficients(values)
    assert residual == mpf("0.3")


def test_round_coefficients_keeps_high_precision_payloads():
    """A coefficient near 2^120 with a 2^-60 offset must survive the trip
    through rounding even when the ambient precision is the default 53."""
    with mp.workprec(320):
        big = mpf(2) ** 120
        values = [APComplex.from_mpc(mpc(big + mpf(2) ** -60), 320)]
    poly, residual = round_coefficients(values)
    assert poly.coeffs[0] == 2 ** 120
    with mp.workprec(320):
        assert abs(residual - mpf(2) ** -60) < mpf(2) ** -90


# ----------------------------------------------------------------------
# gcd, division, squarefree part
# ----------------------------------------------------------------------

def test_poly_gcd_examples():
    assert poly_gcd(P(1, 0, -1), P(1, -2, 1)) == P(1, -1)
    shared = P(1, 0, 1)
    assert poly_gcd(shared * P(1, -2), shared * P(1, 5)) == shared
    assert poly_gcd(P(2, 2), P(4, 4)) == P(1, 1)
    assert poly_gcd(P(1, 1), IntPolynomial(())) == P(1, 1)
    with pytest.raises(ValueError):
        poly_gcd(IntPolynomial(()), IntPolynomial(()))


def test_poly_gcd_random_products():
    rng = random.Random(42)
    for _ in range(20):
        g = IntPolynomial([rng.randint(-5, 5) for _ in range(3)] + [1])
        a = IntPolynomial([rng.randint(-5, 5) for _ in range(2)] + [1])
        while True:
            b = IntPolynomial([rng.randint(-5, 5) for _ in range(2)] + [1])
            if poly_gcd(a, b).degree == 0:
                break
        # coprime cofactors leave exactly the planted monic factor
        assert poly_gcd(g * a, g * b) == g


def test_exact_divide():
    q = exact_divide(P(1, -2, 1), P(1, -1))
    assert q == P(1, -1)
    with pytest.raises(ValueError):
        exact_divide(P(1, 0, -1), P(1, -2))  # remainder 3
    with pytest.raises(ValueError):
        exact_divide(P(1, 1), P(2, 1))  # quotient not integral
    with pytest.raises(ZeroDivisionError):
        exact_divide(P(1, 1), IntPolynomial(()))


def test_squarefree_part():
    base = P(1, 0, 1)
    assert squarefree_part(base ** 3) == base
    assert squarefree_part(P(1, -3) ** 4) == P(1, -3)
    assert squarefree_part(P(1, 5, 6)) == P(1, 5, 6)
    assert squarefree_part(P(1)) == P(1)  # degree-0 passthrough
    with pytest.raises(ValueError):
        squarefree_part(P(2, 0, 2))  # not monic
    with pytest.raises(ValueError):
        squarefree_part(IntPolynomial(()))


def test_squarefree_part_random_powers():
    rng = random.Random(43)
    for _ in range(15):
        while True:
            g = IntPolynomial([rng.randint(-6, 6) for _ in range(3)] + [1])
            if poly_gcd(g, g.derivative()).degree == 0:
                break  # need a squarefree base
        ell = rng.randint(1, 4)
        assert squarefree_part(g ** ell) == g


def test_power_check():
    base = P(1, 2, -1)
    assert power_check(base ** 3, base) == 3
    assert power_check(base, base) == 1
    with pytest.raises(PowerCheckError):
        power_check(base ** 2 * P(1, 1), base)  # degree multiple, wrong poly
    with pytest.raises(PowerCheckError):
        power_check(P(1, 0, 0, 1), P(1, 1, 1))  # wrong cube
    with pytest.raises(PowerCheckError):
        power_check(P(1, 1, 1), P(1, 1))  # degree 2 vs 1 but not a square
    with pytest.raises(PowerCheckError):
        power_check(base, P(5))


def test_eval_poly_accepts_wrapped_values():
    p = P(1, 0, -2)
    with mp.workprec(200):
        root = APComplex.from_mpc(mpc(mp.sqrt(2)), 200)
        assert abs(eval_poly(p, root)) < mpf(2) ** -190
        assert abs(eval_poly(p, mpc(2)) - 2) < mpf(2) ** -190
