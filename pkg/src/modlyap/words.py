"""Exact algebra of words in the two shear generators.

A word is a finite product T^(a1) V^(a2) T^(a3) ... with

    T = (1 1; 0 1),   V = (1 0; 1 1).

Words, nonnegative integer matrices of determinant one, and periodic
continued fractions are three views of the same object: the strict word
[a1, ..., al] (all exponents >= 1, l even) is the period of the continued
fraction of the attracting fixed point of its matrix.  Everything here is
exact integer / rational arithmetic; floating point appears only in the
explicit ``value()`` evaluations of quadratic surds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, isqrt, lcm
import math

from .errors import (
    BadRange,
    EqualWords,
    NotHyperbolic,
    NotInMonoid,
    NotStrict,
)

__all__ = [
    "Mat2",
    "TVWord",
    "QuadSurd",
    "GEN_T",
    "GEN_V",
    "SWAP",
    "word_to_matrix",
    "matrix_to_word",
    "fixed_points",
    "surd_of_word",
    "cf_of_word",
    "cycle_sequence",
    "opposite",
    "conjunction",
    "cyclic_shift",
    "cyclic_strict",
    "normalize_exps",
    "b_match",
    "f_match",
    "automorph_eps",
    "parse_word",
    "format_word",
    "log_of_int",
]


# ---------------------------------------------------------------- matrices


@dataclass(frozen=True)
class Mat2:
    """Integer 2x2 matrix (p q; r s) with exact arithmetic."""

    p: int
    q: int
    r: int
    s: int

    @staticmethod
    def identity() -> "Mat2":
        return Mat2(1, 0, 0, 1)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.p * other.p + self.q * other.r,
            self.p * other.q + self.q * other.s,
            self.r * other.p + self.s * other.r,
            self.r * other.q + self.s * other.s,
        )

    def det(self) -> int:
        return self.p * self.s - self.q * self.r

    def trace(self) -> int:
        return self.p + self.s

    def inverse(self) -> "Mat2":
        d = self.det()
        if d == 1:
            return Mat2(self.s, -self.q, -self.r, self.p)
        if d == -1:
            return Mat2(-self.s, self.q, self.r, -self.p)
        raise ValueError("inverse requires determinant +-1")

    def __neg__(self) -> "Mat2":
        return Mat2(-self.p, -self.q, -self.r, -self.s)

    def __pow__(self, n: int) -> "Mat2":
        if n < 0:
            return self.inverse() ** (-n)
        out = Mat2.identity()
        base = self
        while n:
            if n & 1:
                out = out @ base
            base = base @ base
            n >>= 1
        return out

    def is_nonneg(self) -> bool:
        return self.p >= 0 and self.q >= 0 and self.r >= 0 and self.s >= 0

    def is_hyperbolic(self) -> bool:
        return abs(self.trace()) > 2

    def mobius(self, z: complex) -> complex:
        """Fractional-linear action on a complex number."""
        return (self.p * z + self.q) / (self.r * z + self.s)

    def entries(self) -> tuple[int, int, int, int]:
        return (self.p, self.q, self.r, self.s)


GEN_T = Mat2(1, 1, 0, 1)
GEN_V = Mat2(1, 0, 1, 1)
# Determinant -1 involution exchanging the two generators by conjugation.
SWAP = Mat2(0, 1, 1, 0)


def _pow_t(k: int) -> Mat2:
    return Mat2(1, k, 0, 1)


def _pow_v(k: int) -> Mat2:
    return Mat2(1, 0, k, 1)


# ---------------------------------------------------------------- words


def _canonical_exps(exps: tuple[int, ...]) -> tuple[int, ...]:
    # Trailing (0, 0) pairs are pure padding.
    while len(exps) >= 2 and exps[-1] == 0 and exps[-2] == 0:
        exps = exps[:-2]
    return exps


@dataclass(frozen=True)
class TVWord:
    """Alternating exponent list [a1, a2, ..., al] of T^(a1) V^(a2) ...

    Odd positions are T-exponents, even positions V-exponents.  The length
    is even by convention; only the first and last exponent may be zero,
    which encodes words that start with V or end with T.
    """

    exps: tuple[int, ...]

    def __post_init__(self) -> None:
        exps = _canonical_exps(tuple(int(a) for a in self.exps))
        object.__setattr__(self, "exps", exps)
        if len(exps) % 2:
            raise ValueError("exponent list must have even length")
        if any(a < 0 for a in exps):
            raise ValueError("exponents must be nonnegative")
        if any(a == 0 for a in exps[1:-1]):
            raise ValueError("only the outer exponents may be zero")

    # -- basic views ----------------------------------------------------

    @property
    def total(self) -> int:
        """Generator count s(w) = a1 + ... + al."""
        return sum(self.exps)

    @property
    def ell(self) -> int:
        return len(self.exps)

    @property
    def is_empty(self) -> bool:
        return not self.exps

    @property
    def is_strict(self) -> bool:
        return bool(self.exps) and all(a >= 1 for a in self.exps)

    def require_strict(self) -> "TVWord":
        if not self.is_strict:
            raise NotStrict(f"word {format_word(self)!r} is not strict")
        return self

    def matrix(self) -> Mat2:
        out = Mat2.identity()
        for i, a in enumerate(self.exps):
            if a:
                out = out @ (_pow_t(a) if i % 2 == 0 else _pow_v(a))
        return out

    # -- period structure ------------------------------------------------

    def primitive_period_length(self) -> int:
        """Smallest d dividing l with exps equal to its d-prefix repeated.

        May be odd: [1, 1] has primitive period length 1.
        """
        self.require_strict()
        n = self.ell
        for d in range(1, n + 1):
            if n % d == 0 and self.exps == self.exps[:d] * (n // d):
                return d
        return n

    def minimal_even_period_length(self) -> int:
        d = self.primitive_period_length()
        return d if d % 2 == 0 else 2 * d

    def minimal_even_period(self) -> "TVWord":
        d = self.minimal_even_period_length()
        return TVWord(self.exps[:d])

    # -- constructions ---------------------------------------------------

    def shifted(self, i: int) -> "TVWord":
        """Cyclic shift w_(i) = [a_(i+1), ..., al, a1, ..., a_i]."""
        self.require_strict()
        i %= self.ell
        return TVWord(self.exps[i:] + self.exps[:i])

    def opposite(self) -> "TVWord":
        """Reversed period [al, ..., a1]."""
        self.require_strict()
        return TVWord(self.exps[::-1])

    def conjoin(self, other: "TVWord") -> "TVWord":
        """Period concatenation of two strict words."""
        self.require_strict()
        other.require_strict()
        return TVWord(self.exps + other.exps)

    def repeat(self, k: int) -> "TVWord":
        if k < 0:
            raise ValueError("repeat count must be nonnegative")
        self.require_strict()
        return TVWord(self.exps * k) if k else TVWord(())

    def __str__(self) -> str:
        return format_word(self)


def parse_word(text: str) -> TVWord:
    """Parse the comma-separated exponent literal, e.g. '2,2,1,1'."""
    text = text.strip()
    if not text:
        return TVWord(())
    try:
        exps = tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise ValueError(f"bad word literal {text!r}") from exc
    if len(exps) % 2:
        exps = exps + (0,)
    return TVWord(exps)


def format_word(word: TVWord) -> str:
    return ",".join(str(a) for a in word.exps)


def format_cf(word: TVWord) -> str:
    """Render the periodic continued fraction, e.g. '[2;2,1,1]*'."""
    word.require_strict()
    head, *rest = word.exps
    inner = f"{head};" + ",".join(str(a) for a in rest) if rest else str(head)
    return f"[{inner}]*"


def normalize_exps(exps) -> TVWord:
    """Collapse zero exponents by merging the same-generator runs they join.

    Accepts arbitrary nonnegative integer sequences (odd length allowed)
    and returns the canonical word with the same matrix.
    """
    runs: list[list[int]] = []  # [generator parity, count]
    for i, a in enumerate(exps):
        if a < 0:
            raise ValueError("exponents must be nonnegative")
        if a == 0:
            continue
        par = i % 2
        if runs and runs[-1][0] == par:
            runs[-1][1] += a
        else:
            runs.append([par, a])
    out: list[int] = []
    if runs and runs[0][0] == 1:
        out.append(0)
    for par, count in runs:
        out.append(count)
    if len(out) % 2:
        out.append(0)
    return TVWord(tuple(out))


def word_to_matrix(word: TVWord) -> Mat2:
    return word.matrix()


def matrix_to_word(mat: Mat2) -> TVWord:
    """Unique factorization of a nonnegative determinant-one matrix.

    Greedy run peeling: T acts by adding the second row to the first, so a
    matrix with first row >= second row (entrywise) starts with T, and
    symmetrically for V.  Raises NotInMonoid otherwise.
    """
    if mat.det() != 1 or not mat.is_nonneg():
        raise NotInMonoid(f"{mat} is not a nonnegative word matrix")
    p, q, r, s = mat.entries()
    runs: list[tuple[int, int]] = []  # (parity, count), parity 0 = T
    while (p, q, r, s) != (1, 0, 0, 1):
        if p >= r and q >= s:
            k = q if r == 0 else min(p // r, q // s if s else p // r)
            k = max(k, 1)
            if p - k * r < 0 or q - k * s < 0:
                k -= 1
            p, q = p - k * r, q - k * s
            par = 0
        elif r >= p and s >= q:
            k = r if q == 0 else min(r // p if p else s // q, s // q)
            k = max(k, 1)
            if r - k * p < 0 or s - k * q < 0:
                k -= 1
            r, s = r - k * p, s - k * q
            par = 1
        else:
            raise NotInMonoid(f"{mat} cannot be peeled into shear generators")
        if k == 0:
            raise NotInMonoid(f"{mat} cannot be peeled into shear generators")
        if runs and runs[-1][0] == par:
            runs[-1] = (par, runs[-1][1] + k)
        else:
            runs.append((par, k))
    exps: list[int] = []
    if runs and runs[0][0] == 1:
        exps.append(0)
    exps.extend(count for _, count in runs)
    if len(exps) % 2:
        exps.append(0)
    return TVWord(tuple(exps))


# ---------------------------------------------------------------- surds


def _sqrt_fraction(d: int, bits: int = 128) -> Fraction:
    """Rational lower approximation of sqrt(d) with 2^-bits relative slack."""
    if d < 0:
        raise ValueError("negative radicand")
    return Fraction(isqrt(d << (2 * bits)), 1 << bits)


def log_of_int(n: int) -> float:
    """Natural log of a positive integer, safe for values beyond 1e308."""
    if n <= 0:
        raise ValueError("log of nonpositive integer")
    excess = n.bit_length() - 64
    if excess <= 0:
        return math.log(n)
    return math.log(n >> excess) + excess * math.log(2.0)


def _log_fraction(x: Fraction) -> float:
    return log_of_int(x.numerator) - log_of_int(x.denominator)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _sign_one_radical(p: Fraction, q: Fraction, d: int) -> int:
    """Exact sign of p + q*sqrt(d) for rational p, q and integer d >= 0."""
    if q == 0 or d == 0:
        return _sign(p)
    if p == 0:
        return _sign(q)
    sp, sq = _sign(p), _sign(q)
    if sp == sq:
        return sp
    # Opposite signs: compare p^2 against q^2 d.
    t = _sign(p * p - q * q * d)
    return sp if t > 0 else (sq if t < 0 else 0)


def _sign_two_radicals(p: Fraction, q1: Fraction, d1: int, q2: Fraction, d2: int) -> int:
    """Exact sign of p + q1*sqrt(d1) + q2*sqrt(d2)."""
    if d1 == d2:
        return _sign_one_radical(p, q1 + q2, d1)
    if q1 == 0:
        return _sign_one_radical(p, q2, d2)
    if q2 == 0:
        return _sign_one_radical(p, q1, d1)
    su = _sign_one_radical(p, q1, d1)
    sv = _sign(q2)
    if su == 0:
        return sv
    if su == sv:
        return su
    # u = p + q1 sqrt(d1) and v = q2 sqrt(d2) have opposite signs; compare
    # squares, which again contains a single radical.
    t = _sign_one_radical(p * p + q1 * q1 * d1 - q2 * q2 * d2, 2 * p * q1, d1)
    return su if t > 0 else (sv if t < 0 else 0)


@dataclass(frozen=True)
class QuadSurd:
    """Designated root (-b + sqrt(D)) / (2a) of a x^2 + b x + c.

    The triple is primitive and D = b^2 - 4ac is a positive nonsquare.
    The stored sign of ``a`` encodes which root is designated: with
    sgn(a) = sgn(w - conj(w)) the designated root w is always the one
    carrying +sqrt(D).  Negating all three coefficients therefore swaps
    the root and its algebraic conjugate.
    """

    a: int
    b: int
    c: int

    def __post_init__(self) -> None:
        if self.a == 0:
            raise ValueError("leading coefficient must be nonzero")
        g = gcd(gcd(abs(self.a), abs(self.b)), abs(self.c))
        if g > 1:
            object.__setattr__(self, "a", self.a // g)
            object.__setattr__(self, "b", self.b // g)
            object.__setattr__(self, "c", self.c // g)
        d = self.disc
        if d <= 0 or isqrt(d) ** 2 == d:
            raise ValueError("discriminant must be a positive nonsquare")

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    # -- numeric views ----------------------------------------------------

    @cached_property
    def _value_fraction(self) -> Fraction:
        return (-self.b + _sqrt_fraction(self.disc)) / (2 * self.a)

    @cached_property
    def _conj_fraction(self) -> Fraction:
        return (-self.b - _sqrt_fraction(self.disc)) / (2 * self.a)

    def value(self) -> float:
        return float(self._value_fraction)

    def conj_value(self) -> float:
        return float(self._conj_fraction)

    def conjugate(self) -> "QuadSurd":
        return QuadSurd(-self.a, -self.b, -self.c)

    # -- exact comparisons -------------------------------------------------

    def compare_rational(self, x) -> int:
        """Sign of (value - x) for a Fraction or integer x."""
        x = Fraction(x)
        p = Fraction(-self.b, 2 * self.a) - x
        q = Fraction(1, 2 * self.a)
        return _sign_one_radical(p, q, self.disc)

    def compare(self, other: "QuadSurd") -> int:
        p = Fraction(-self.b, 2 * self.a) - Fraction(-other.b, 2 * other.a)
        return _sign_two_radicals(
            p,
            Fraction(1, 2 * self.a),
            self.disc,
            Fraction(-1, 2 * other.a),
            other.disc,
        )

    def _cmp(self, other) -> int:
        if isinstance(other, QuadSurd):
            return self.compare(other)
        return self.compare_rational(other)

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other) -> bool:
        return self._cmp(other) >= 0

    # -- exact Moebius action ----------------------------------------------

    def apply(self, mat: Mat2) -> "QuadSurd":
        """Image of the designated root under a determinant +-1 matrix."""
        det = mat.det()
        if det not in (1, -1):
            raise ValueError("matrix action requires determinant +-1")
        p, q, r, s = mat.entries()
        a, b, c = self.a, self.b, self.c
        a2 = a * s * s - b * r * s + c * r * r
        b2 = -2 * a * q * s + b * (p * s + q * r) - 2 * c * p * r
        c2 = a * q * q - b * p * q + c * p * p
        if a2 == 0:
            # Designated root would map to infinity; cannot happen for
            # irrational roots under integer matrices.
            raise ValueError("degenerate image form")
        # Track root order: M(w) - M(conj w) has the sign of
        # det(M) * (w - conj w) / ((r w + s)(r conj(w) + s)).
        num = Fraction(2 * a * s - r * b, 2 * a)
        rad = Fraction(r, 2 * a)
        s_w = _sign_one_radical(num, rad, self.disc)
        s_cw = _sign_one_radical(num, -rad, self.disc)
        new_order = _sign(self.a) * det * s_w * s_cw
        if _sign(a2) != new_order:
            a2, b2, c2 = -a2, -b2, -c2
        return QuadSurd(a2, b2, c2)


def fixed_points(mat: Mat2) -> tuple[QuadSurd, QuadSurd]:
    """Attracting and repelling fixed points of a hyperbolic matrix.

    Both are returned as exact surds; the second is the algebraic
    conjugate of the first.
    """
    if not mat.is_hyperbolic():
        raise NotHyperbolic(f"{mat} has trace {mat.trace()}")
    p, q, r, s = mat.entries()
    if r == 0:
        raise NotHyperbolic(f"{mat} fixes infinity")
    a, b, c = r, s - p, -q
    # The attracting root carries +sqrt(D) exactly when sgn(a) matches
    # sgn(w_att - w_rep) = sgn(r) * sgn(trace).
    want = _sign(r) * _sign(mat.trace())
    if _sign(a) != want:
        a, b, c = -a, -b, -c
    surd = QuadSurd(a, b, c)
    return surd, surd.conjugate()


def surd_of_word(word: TVWord) -> QuadSurd:
    """Attracting fixed point of a strict word, i.e. the value of its CF."""
    word.require_strict()
    return fixed_points(word.matrix())[0]


def cf_of_word(word: TVWord) -> tuple[int, ...]:
    """Periodic continued-fraction quotients of the word's fixed point.

    For strict words these are exactly the exponents.
    """
    word.require_strict()
    return word.exps


def cycle_sequence(word: TVWord) -> list[tuple[QuadSurd, QuadSurd]]:
    """The s(w) surd pairs (w^(k), conj w^(k)) along the cycle of w.

    Built by index arithmetic on the word: position k corresponds to the
    pair (i, j) with i the exponent block and j counting down from a_i,
    and w^(k) equals j + 1/y or 1/(j + 1/y) where y is the shifted word's
    fixed point, depending on the block's generator.
    """
    word.require_strict()
    exps = word.exps
    ell = len(exps)
    tails = [surd_of_word(word.shifted(i + 1)) for i in range(ell)]
    out: list[tuple[QuadSurd, QuadSurd]] = []
    for i0 in range(ell):
        y = tails[i0]
        for j in range(exps[i0], 0, -1):
            m = _pow_t(j) @ SWAP  # x -> j + 1/x
            if i0 % 2 == 1:
                m = SWAP @ m  # x -> 1/(j + 1/x)
            x = y.apply(m)
            out.append((x, x.conjugate()))
    return out


def opposite(word: TVWord) -> TVWord:
    return word.opposite()


def conjunction(left: TVWord, right: TVWord) -> TVWord:
    return left.conjoin(right)


def cyclic_shift(word: TVWord, i: int) -> TVWord:
    return word.shifted(i)


def cyclic_strict(word: TVWord) -> TVWord | None:
    """Conjugate a relaxed word into strict form by rotating its runs.

    Returns None when only one generator occurs (the matrix is then a
    shear power, not hyperbolic).  The result has the same cycle
    integrals as the input by conjugation invariance.
    """
    runs: list[list[int]] = []
    for i, a in enumerate(word.exps):
        if a == 0:
            continue
        par = i % 2
        if runs and runs[-1][0] == par:
            runs[-1][1] += a
        else:
            runs.append([par, a])
    if not runs:
        return None
    # Wrap-around merge when first and last runs share a generator.
    if len(runs) > 1 and runs[0][0] == runs[-1][0]:
        runs[0][1] += runs[-1][1]
        runs.pop()
    if len(runs) < 2:
        return None
    if runs[0][0] == 1:  # rotate one run so the word starts with T
        runs = runs[1:] + runs[:1]
    return TVWord(tuple(count for _, count in runs))


def _equal_cf(u: TVWord, v: TVWord) -> bool:
    du = u.primitive_period_length()
    dv = v.primitive_period_length()
    return du == dv and u.exps[:du] == v.exps[:dv]


def b_match(u: TVWord, v: TVWord) -> int:
    """Length of the common suffix of the periods repeated to equal length."""
    u.require_strict()
    v.require_strict()
    if _equal_cf(u, v):
        raise EqualWords("words describe the same continued fraction")
    cap = lcm(u.ell, v.ell)
    k = 0
    while k < cap and u.exps[-1 - k % u.ell] == v.exps[-1 - k % v.ell]:
        k += 1
    return k


def f_match(u: TVWord, v: TVWord) -> int:
    """Length of the common prefix of the periods repeated to equal length."""
    u.require_strict()
    v.require_strict()
    if _equal_cf(u, v):
        raise EqualWords("words describe the same continued fraction")
    cap = lcm(u.ell, v.ell)
    k = 0
    while k < cap and u.exps[k % u.ell] == v.exps[k % v.ell]:
        k += 1
    return k


def automorph_eps(mat: Mat2) -> tuple[float, float]:
    """Largest eigenvalue modulus eps and the length 2 log eps."""
    if not mat.is_hyperbolic():
        raise NotHyperbolic(f"{mat} has trace {mat.trace()}")
    t = abs(mat.trace())
    eps_frac = (t + _sqrt_fraction(t * t - 4)) / 2
    length = 2.0 * _log_fraction(eps_frac)
    try:
        eps = float(eps_frac)
    except OverflowError:
        eps = math.inf
    return eps, length
