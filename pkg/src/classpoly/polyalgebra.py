"""Exact arithmetic on integer polynomials.

Coefficients are Python ints stored in ascending degree order; rational
intermediate steps (gcd, exact division) run on fractions.Fraction so no
precision is ever lost.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from mpmath import mp, mpc, mpf

from .errors import PowerCheckError, RoundingFailureError


class IntPolynomial:
    """Immutable integer polynomial; index k holds the x^k coefficient."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("IntPolynomial is immutable")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def leading(self) -> int:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def constant(self) -> int:
        return self.coeffs[0] if self.coeffs else 0

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = gcd(g, abs(c))
        return g

    def primitive_positive(self) -> "IntPolynomial":
        """Divide out the content and make the leading coefficient positive."""
        if self.is_zero():
            return self
        g = self.content()
        sign = 1 if self.leading() > 0 else -1
        return IntPolynomial(c * sign // g for c in self.coeffs)

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(k * c for k, c in enumerate(self.coeffs) if k)

    def __eq__(self, other):
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPolynomial(c * other for c in self.coeffs)
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return IntPolynomial(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = IntPolynomial((1,))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def evaluate(self, x):
        """Horner evaluation; works for int, Fraction, mpf, mpc inputs."""
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def to_int_list(self):
        return list(self.coeffs)

    def to_json_list(self):
        # decimal strings survive JSON integer-size limits in consumers
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json_list(cls, items) -> "IntPolynomial":
        return cls(int(s) for s in items)

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if k == 0:
                body = f"{mag}"
            elif k == 1:
                body = "x" if mag == 1 else f"{mag}*x"
            else:
                body = f"x^{k}" if mag == 1 else f"{mag}*x^{k}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"IntPolynomial({list(self.coeffs)})"


def round_coefficients(values, fail_above=None):
    """Round inexact coefficients (ascending degree) to the nearest integers.

    Returns (IntPolynomial, max_residual) where the residual of a value is
    the larger of its distance to the nearest integer and its imaginary
    magnitude.  When fail_above is given, a residual at or above it raises
    RoundingFailureError.
    """
    prec = 64
    for v in values:
        prec = max(prec, getattr(v, "precision_bits", 64))
    ints = []
    with mp.workprec(prec + 64):
        max_residual = mpf(0)
        for v in values:
            z = v.to_mpc() if hasattr(v, "to_mpc") else mpc(v)
            nearest = mp.nint(z.real)
            residual = max(abs(z.real - nearest), abs(z.imag))
            max_residual = max(max_residual, residual)
            ints.append(int(nearest))
    if fail_above is not None and max_residual >= fail_above:
        raise RoundingFailureError(max_residual, fail_above)
    return IntPolynomial(ints), max_residual


def _fraction_coeffs(p: IntPolynomial):
    return [Fraction(c) for c in p.coeffs]


def _frac_degree(cs) -> int:
    d = len(cs) - 1
    while d >= 0 and cs[d] == 0:
        d -= 1
    return d


def _frac_mod(a, b):
    """Remainder of a by b over the rationals (lists, ascending)."""
    a = a[:]
    da, db = _frac_degree(a), _frac_degree(b)
    lead = b[db]
    while da >= db:
        factor = a[da] / lead
        shift = da - db
        for k in range(db + 1):
            a[k + shift] -= factor * b[k]
        da = _frac_degree(a)
    return a[: da + 1]


def poly_gcd(p: IntPolynomial, q: IntPolynomial) -> IntPolynomial:
    """Greatest common divisor in Z[x], primitive with positive leading
    coefficient.  gcd(p, 0) is the primitive positive part of p."""
    if p.is_zero() and q.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    if p.is_zero():
        return q.primitive_positive()
    if q.is_zero():
        return p.primitive_positive()
    a, b = _fraction_coeffs(p), _fraction_coeffs(q)
    while _frac_degree(b) >= 0:
        a, b = b, _frac_mod(a, b)
    # clear denominators, then strip content
    lcm = 1
    for c in a:
        lcm = lcm * c.denominator // gcd(lcm, c.denominator)
    ints = IntPolynomial(int(c * lcm) for c in a)
    return ints.primitive_positive()


def exact_divide(p: IntPolynomial, d: IntPolynomial) -> IntPolynomial:
    """Quotient p / d when the division is exact over Z[x]; raises otherwise."""
    if d.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    a = _fraction_coeffs(p)
    b = _fraction_coeffs(d)
    da, db = _frac_degree(a), _frac_degree(b)
    if da < db:
        raise ValueError("division is not exact")
    out = [Fraction(0)] * (da - db + 1)
    lead = b[db]
    while da >= db:
        factor = a[da] / lead
        out[da - db] = factor
        shift = da - db
        for k in range(db + 1):
            a[k + shift] -= factor * b[k]
        da = _frac_degree(a)
    if da >= 0:
        raise ValueError("division is not exact")
    if any(c.denominator != 1 for c in out):
        raise ValueError("division is not exact over the integers")
    return IntPolynomial(int(c) for c in out)


def squarefree_part(p: IntPolynomial) -> IntPolynomial:
    """For monic p = g^ell with g squarefree (the pipeline shape), returns g.

    In general returns p divided by gcd(p, p'), the squarefree kernel."""
    if p.is_zero():
        raise ValueError("zero polynomial has no squarefree part")
    if not p.is_monic():
        raise ValueError("expected a monic polynomial")
    if p.degree == 0:
        return p
    g = poly_gcd(p, p.derivative())
    result = exact_divide(p, g)
    assert result.is_monic()
    return result


def power_check(p: IntPolynomial, g: IntPolynomial) -> int:
    """The exponent ell with p = g^ell exactly; raises PowerCheckError when
    no such exponent exists."""
    if p.is_zero() or g.is_zero():
        raise PowerCheckError("zero polynomial")
    if g.degree == 0:
        raise PowerCheckError("claimed base is constant")
    if p.degree % g.degree:
        raise PowerCheckError(
            f"degree {p.degree} is not a multiple of {g.degree}"
        )
    ell = p.degree // g.degree
    if g ** ell != p:
        raise PowerCheckError(f"polynomial is not the {ell}-th power of the base")
    return ell


def eval_poly(p: IntPolynomial, z) -> mpc:
    """Evaluate at an inexact point under the caller's working precision."""
    if hasattr(z, "to_mpc"):
        z = z.to_mpc()
    return p.evaluate(mpc(z))
