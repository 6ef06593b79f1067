"""Integral binary quadratic forms and imaginary quadratic orders.

A form (a, b, c) stands for a*x^2 + b*x*y + c*y^2; throughout the package
forms are primitive and positive definite, so the discriminant b^2 - 4ac is
negative.  The order of discriminant D is Z[tau] where tau is a root of
x^2 + b*x + c chosen in the upper half-plane.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from mpmath import mp, mpc

from .modgroup import IDENTITY, S, UnimodularMatrix, translation


@dataclass(frozen=True)
class ExactCMPoint:
    """Point u + v*sqrt(r) of the upper half-plane, with u, v rational.

    r is a negative integer and v > 0.  Two points are equal when they agree
    as complex numbers, regardless of how the radical is carried.
    """

    rational_part: Fraction
    radical_coefficient: Fraction
    radicand: int

    def __post_init__(self):
        object.__setattr__(self, "rational_part", Fraction(self.rational_part))
        object.__setattr__(
            self, "radical_coefficient", Fraction(self.radical_coefficient)
        )
        if self.radicand >= 0:
            raise ValueError("radicand must be negative")
        if self.radical_coefficient <= 0:
            raise ValueError("imaginary part must be positive")

    def _key(self):
        # (u, v^2 * r) determines the point: v > 0 and r < 0 fix the branch
        return (self.rational_part, self.radical_coefficient ** 2 * self.radicand)

    def __eq__(self, other):
        if not isinstance(other, ExactCMPoint):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def neg_conjugate(self) -> "ExactCMPoint":
        """-conj(self); stays in the upper half-plane."""
        return ExactCMPoint(
            -self.rational_part, self.radical_coefficient, self.radicand
        )

    def mobius(self, gamma: UnimodularMatrix) -> "ExactCMPoint":
        """Exact fractional-linear image under a determinant-1 matrix."""
        u, v, r = self.rational_part, self.radical_coefficient, self.radicand
        # numerator (a u + b + a v s) with s = sqrt(r), denominator likewise
        nu, nv = gamma.a * u + gamma.b, gamma.a * v
        du, dv = gamma.c * u + gamma.d, gamma.c * v
        # divide by du + dv s: multiply by conjugate; |den|^2 = du^2 - dv^2 r
        norm = du * du - dv * dv * r
        new_u = (nu * du - nv * dv * r) / norm
        new_v = (nv * du - nu * dv) / norm
        return ExactCMPoint(new_u, new_v, r)

    def to_mpc(self) -> mpc:
        """Value at the current working precision."""
        u = mp.mpf(self.rational_part.numerator) / self.rational_part.denominator
        v = (
            mp.mpf(self.radical_coefficient.numerator)
            / self.radical_coefficient.denominator
        )
        return u + v * mp.sqrt(mpc(self.radicand))

    def __str__(self):
        return f"{self.rational_part} + {self.radical_coefficient}*sqrt({self.radicand})"


def _validate_discriminant(d: int) -> None:
    if d >= 0:
        raise ValueError("discriminant must be negative")
    if d % 4 not in (0, 1):
        raise ValueError("discriminant must be 0 or 1 mod 4")


@dataclass(frozen=True)
class QuadraticForm:
    """Primitive positive definite form a*x^2 + b*x*y + c*y^2."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a <= 0 or self.discriminant >= 0:
            raise ValueError(f"form {self.coefficients()} is not positive definite")
        if gcd(gcd(self.a, self.b), self.c) != 1:
            raise ValueError(f"form {self.coefficients()} is not primitive")

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def coefficients(self):
        return (self.a, self.b, self.c)

    def transform(self, gamma: UnimodularMatrix) -> "QuadraticForm":
        """Right action: substitute (x, y) -> gamma * (x, y)."""
        p, q, r, s = gamma.a, gamma.b, gamma.c, gamma.d
        a, b, c = self.a, self.b, self.c
        return QuadraticForm(
            a * p * p + b * p * r + c * r * r,
            2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
            a * q * q + b * q * s + c * s * s,
        )

    def is_reduced(self) -> bool:
        """Gauss-reduced: |b| <= a <= c, with b >= 0 on the boundary."""
        if not (abs(self.b) <= self.a <= self.c):
            return False
        if (abs(self.b) == self.a or self.a == self.c) and self.b < 0:
            return False
        return True

    def cm_point(self) -> ExactCMPoint:
        """Root (-b + sqrt(D)) / (2a) of the form, in the upper half-plane."""
        return ExactCMPoint(
            Fraction(-self.b, 2 * self.a),
            Fraction(1, 2 * self.a),
            self.discriminant,
        )

    def __str__(self):
        return f"{self.a}x^2 + {self.b}xy + {self.c}y^2"


def reduce_form(form: QuadraticForm):
    """Gauss reduction.  Returns (reduced, gamma) with form.transform(gamma)
    equal to reduced; gamma is the exact witness in SL2(Z)."""
    current = form
    gamma = IDENTITY
    for _ in range(10 ** 6):
        # translate b into (-a, a]
        s = (current.a - current.b) // (2 * current.a)
        if s:
            t = translation(s)
            current = current.transform(t)
            gamma = gamma @ t
        if current.a > current.c:
            current = current.transform(S)
            gamma = gamma @ S
            continue
        if current.a == current.c and current.b < 0:
            current = current.transform(S)
            gamma = gamma @ S
        assert current.is_reduced()
        return current, gamma
    raise ValueError("reduction did not terminate")


def reduced_forms(discriminant: int) -> list:
    """All reduced primitive positive definite forms of the discriminant,
    sorted lexicographically by (a, b, c)."""
    _validate_discriminant(discriminant)
    out = []
    a_max = isqrt(-discriminant // 3)
    for a in range(1, a_max + 1):
        for b in range(-a, a + 1):
            if (b * b - discriminant) % (4 * a):
                continue
            c = (b * b - discriminant) // (4 * a)
            if c < a:
                continue
            if b < 0 and (a == c or -b == a):
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            out.append(QuadraticForm(a, b, c))
    return sorted(out, key=lambda f: f.coefficients())


def class_number(discriminant: int) -> int:
    return len(reduced_forms(discriminant))


def _conductor(discriminant: int) -> int:
    """Largest f with discriminant / f^2 still a discriminant that is
    fundamental (squarefree odd part pattern)."""
    best = 1
    f = 1
    while f * f <= -discriminant:
        if discriminant % (f * f) == 0:
            d0 = discriminant // (f * f)
            if d0 % 4 in (0, 1) and _is_fundamental(d0):
                best = max(best, f)
        f += 1
    return best


def _squarefree(n: int) -> bool:
    n = abs(n)
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


def _is_fundamental(d: int) -> bool:
    if d % 4 == 1:
        return _squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return _squarefree(m) and m % 4 in (2, 3)
    return False


@dataclass(frozen=True)
class CMOrder:
    """Imaginary quadratic order of discriminant disc.

    The generator tau satisfies x^2 + b*x + c = 0 with (b, c) read off the
    discriminant parity; conductor is the index of the order in the maximal
    one, i.e. the largest f with disc/f^2 fundamental.
    """

    disc: int
    b: int
    c: int
    fundamental_discriminant: int
    conductor: int

    @classmethod
    def from_discriminant(cls, discriminant: int) -> "CMOrder":
        _validate_discriminant(discriminant)
        b = discriminant % 2  # 0 or 1 matching parity
        c = (b * b - discriminant) // 4
        f = _conductor(discriminant)
        return cls(
            disc=discriminant,
            b=b,
            c=c,
            fundamental_discriminant=discriminant // (f * f),
            conductor=f,
        )

    def generator(self) -> ExactCMPoint:
        """tau with Z[tau] the order: sqrt(D)/2 or (-1 + sqrt(D))/2."""
        return ExactCMPoint(Fraction(-self.b, 2), Fraction(1, 2), self.disc)

    def principal_form(self) -> QuadraticForm:
        return QuadraticForm(1, self.b, self.c)
