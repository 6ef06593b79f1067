"""Integer 2x2 matrices of determinant 1 and their congruence structure.

Provides the matrix type used everywhere else, coset tables for the image of
+-Gamma_1(N) inside SL2(Z), lifts from SL2(Z/N) back to SL2(Z), Mobius action
on points of the upper half-plane, and reduction to the standard fundamental
domain with a generator word recording the moves.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd

from mpmath import mp, mpc, mpf


def _egcd(a: int, b: int):
    """Return (g, u, v) with u*a + v*b = g = gcd(a, b)."""
    old_r, r = a, b
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_u, u = u, old_u - q * u
        old_v, v = v, old_v - q * v
    return old_r, old_u, old_v


@dataclass(frozen=True)
class UnimodularMatrix:
    """Element [[a, b], [c, d]] of SL2(Z)."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant must be 1: {self.rows()}")

    @classmethod
    def identity(cls) -> "UnimodularMatrix":
        return cls(1, 0, 0, 1)

    def rows(self):
        return ((self.a, self.b), (self.c, self.d))

    def __matmul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "UnimodularMatrix":
        return UnimodularMatrix(self.d, -self.b, -self.c, self.a)

    def hat(self) -> "UnimodularMatrix":
        """Swap the diagonal entries.  An involution preserving determinant."""
        return UnimodularMatrix(self.d, self.b, self.c, self.a)

    def mod(self, n: int):
        """Entries reduced to [0, n), as a pair of row tuples."""
        return ((self.a % n, self.b % n), (self.c % n, self.d % n))

    def first_column(self):
        return (self.a, self.c)

    def __str__(self):
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


IDENTITY = UnimodularMatrix(1, 0, 0, 1)
S = UnimodularMatrix(0, -1, 1, 0)
T = UnimodularMatrix(1, 1, 0, 1)


def translation(n: int) -> UnimodularMatrix:
    return UnimodularMatrix(1, n, 0, 1)


def mobius_apply(gamma: UnimodularMatrix, tau):
    """Fractional-linear action of gamma on a point of the upper half-plane.

    Accepts exact points (anything with a .mobius method) or inexact complex
    values; the result type matches the input.
    """
    if hasattr(tau, "mobius"):
        return tau.mobius(gamma)
    z = mpc(tau)
    if z.imag <= 0:
        raise ValueError("point must lie in the upper half-plane")
    return (gamma.a * z + gamma.b) / (gamma.c * z + gamma.d)


# ----------------------------------------------------------------------
# cosets of +-Gamma_1(N) in SL2(Z)
# ----------------------------------------------------------------------

def normalize_vector(a: int, c: int, n: int, tie_break: str = "min"):
    """Canonical representative of {(a, c), (-a, -c)} mod n.

    Requires gcd(n, a, c) = 1.  tie_break picks the lexicographic min or max
    of the pair; either choice labels the same coset.
    """
    if n < 1:
        raise ValueError("modulus must be positive")
    if gcd(gcd(a, c), n) != 1:
        raise ValueError(f"column ({a}, {c}) is not primitive mod {n}")
    v = (a % n, c % n)
    w = ((-a) % n, (-c) % n)
    if tie_break == "min":
        return min(v, w)
    if tie_break == "max":
        return max(v, w)
    raise ValueError(f"unknown tie_break {tie_break!r}")


def lift_vector_to_sl2(a: int, c: int, n: int) -> UnimodularMatrix:
    """Some gamma in SL2(Z) whose first column is congruent to (a, c) mod n.

    The integer first column (a', c') is chosen with gcd(a', c') = 1 and then
    completed via the extended Euclidean algorithm.
    """
    if n == 1:
        return IDENTITY
    a0, c0 = a % n, c % n
    if gcd(gcd(a0, c0), n) != 1:
        raise ValueError(f"column ({a}, {c}) is not primitive mod {n}")
    if c0 == 0 and a0 == 1:
        return IDENTITY
    if c0 == 0 and a0 == n - 1:
        return UnimodularMatrix(-1, 0, 0, -1)
    cp = c0 if c0 != 0 else n
    ap = a0
    while gcd(ap, cp) != 1:  # terminates: some a0 + t*n is coprime to cp
        ap += n
    g, u, v = _egcd(ap, cp)
    assert g == 1
    # det [[ap, -v], [cp, u]] = ap*u + cp*v = 1; shift keeps column two small
    shift = u // cp
    u -= shift * cp
    v += shift * ap
    return UnimodularMatrix(ap, -v, cp, u)


def lift_sl2_mod_n(rows, n: int) -> UnimodularMatrix:
    """Lift a matrix in SL2(Z/n) to SL2(Z), congruent entrywise mod n.

    rows is ((m11, m12), (m21, m22)); its determinant must be 1 mod n.
    """
    (m11, m12), (m21, m22) = rows
    if n == 1:
        return IDENTITY
    if (m11 * m22 - m12 * m21) % n != 1:
        raise ValueError("matrix determinant is not 1 mod n")
    g0 = lift_vector_to_sl2(m11, m21, n)
    # g0^(-1) * M is unit upper triangular mod n; extract the translation part
    inv = g0.inverse()
    b11 = inv.a * m11 + inv.b * m21
    b12 = inv.a * m12 + inv.b * m22
    b21 = inv.c * m11 + inv.d * m21
    b22 = inv.c * m12 + inv.d * m22
    assert b21 % n == 0 and b11 % n == 1 and b22 % n == 1
    return g0 @ translation(b12 % n)


def _coset_class_keys(n: int, tie_break: str):
    seen = set()
    for a in range(n):
        for c in range(n):
            if gcd(gcd(a, c), n) != 1:
                continue
            seen.add(normalize_vector(a, c, n, tie_break))
    return sorted(seen)


@dataclass(frozen=True)
class CosetTable:
    """Representatives of the cosets of +-Gamma_1(N) in SL2(Z).

    Cosets correspond to primitive columns (a, c) mod N up to global sign;
    reps[k] is an SL2(Z) lift of the k-th class and key_of maps a normalized
    column to its index.
    """

    level: int
    reps: tuple
    key_of: dict = field(compare=False)
    tie_break: str = "min"

    def size(self) -> int:
        return len(self.reps)

    def index_of_column(self, a: int, c: int) -> int:
        return self.key_of[normalize_vector(a, c, self.level, self.tie_break)]

    def to_json_dict(self):
        return {
            "level": self.level,
            "tie_break": self.tie_break,
            "reps": [[g.a, g.b, g.c, g.d] for g in self.reps],
        }

    @classmethod
    def from_json_dict(cls, data) -> "CosetTable":
        level = int(data["level"])
        tie_break = data.get("tie_break", "min")
        reps = tuple(UnimodularMatrix(*map(int, r)) for r in data["reps"])
        key_of = {
            normalize_vector(g.a, g.c, level, tie_break): k
            for k, g in enumerate(reps)
        }
        if len(key_of) != len(reps):
            raise ValueError("coset table has duplicate classes")
        return cls(level=level, reps=reps, key_of=key_of, tie_break=tie_break)

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> "CosetTable":
        return cls.from_json_dict(json.loads(text))


def enumerate_cosets(n: int, tie_break: str = "min") -> CosetTable:
    """Build the full coset table for level n."""
    if n < 1:
        raise ValueError("level must be positive")
    keys = _coset_class_keys(n, tie_break)
    reps = tuple(lift_vector_to_sl2(a, c, n) for (a, c) in keys)
    key_of = {key: k for k, key in enumerate(keys)}
    return CosetTable(level=n, reps=reps, key_of=key_of, tie_break=tie_break)


# ----------------------------------------------------------------------
# fundamental domain
# ----------------------------------------------------------------------

TOKEN_S = "S"
TOKEN_T = "T"
TOKEN_T_INV = "T^-1"

_TOKEN_MATRIX = {TOKEN_S: S, TOKEN_T: T, TOKEN_T_INV: translation(-1)}


@dataclass(frozen=True)
class GeneratorWord:
    """Sequence of generator moves, in the order they were applied."""

    tokens: tuple

    def __post_init__(self):
        for t in self.tokens:
            if t not in _TOKEN_MATRIX:
                raise ValueError(f"unknown token {t!r}")

    def __len__(self):
        return len(self.tokens)

    def matrix(self) -> UnimodularMatrix:
        """Product matrix; applying it equals applying the tokens in order."""
        m = IDENTITY
        for t in self.tokens:
            m = _TOKEN_MATRIX[t] @ m
        return m

    def __str__(self):
        return " ".join(self.tokens) if self.tokens else "(empty)"


_MAX_TRANSLATION = 10 ** 6  # guards against absurd real parts


def fundamental_domain_reduce(tau, prec: int | None = None):
    """Move tau into the standard fundamental domain for SL2(Z).

    Returns (tau_star, word) where word records the applied generators, so
    word.matrix() maps tau to tau_star.  Boundary ties (|tau| within
    2^(-prec/2) of 1) are accepted on either side.
    """
    if prec is None:
        prec = mp.prec
    z = mpc(tau)
    if z.imag <= 0:
        raise ValueError("point must lie in the upper half-plane")
    tol = mpf(2) ** (-(prec // 2))
    tokens = []
    max_iters = 64 * (prec + 64)
    for _ in range(max_iters):
        shift = int(mp.nint(z.real))
        if shift:
            if abs(shift) > _MAX_TRANSLATION:
                raise ValueError("real part too large to reduce")
            z -= shift
            tokens.extend([TOKEN_T_INV if shift > 0 else TOKEN_T] * abs(shift))
        if abs(z) ** 2 >= 1 - tol:
            return z, GeneratorWord(tuple(tokens))
        z = -1 / z
        tokens.append(TOKEN_S)
    raise ValueError("fundamental domain reduction did not terminate")
