"""Farey trees, turn paths, and the half-tree word parametrization.

Two binary mediant trees are used: the full tree rooted at (0/1, 1/0) and
the half tree rooted at (0/1, 1/2).  A real number x > 0 corresponds to a
path of T/V turns; the partial products A_n of the turn matrices satisfy
x_n = A_n(1) -> x.  Rationals take the unique path that ends in infinitely
many V turns.  The half tree carries the word parametrization w(p/q) built
by conjunction, with s(w(p/q)) = 2q.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, inf
from typing import Iterable, Iterator

from .errors import InvalidCF, NotConsecutive, NotNeighbors, OutOfRange
from .words import GEN_T, GEN_V, SWAP, Mat2, TVWord

__all__ = [
    "FareyFraction",
    "FareyPath",
    "mediant",
    "associated_matrix",
    "path_matrices",
    "turns_for_fraction",
    "turns_for_quotients",
    "transformed_path",
    "farey_level",
    "markov_word",
    "minimal_level",
    "parents_of",
    "triple_structure",
    "TripleStructure",
]


# ---------------------------------------------------------------- fractions


@dataclass(frozen=True, order=False)
class FareyFraction:
    """Nonnegative fraction p/q in lowest terms; 1/0 stands for infinity."""

    p: int
    q: int

    def __post_init__(self) -> None:
        if self.p < 0 or self.q < 0:
            raise ValueError("numerator and denominator must be nonnegative")
        if self.p == 0 and self.q == 0:
            raise ValueError("0/0 is not a fraction")
        if gcd(self.p, self.q) != 1:
            raise ValueError(f"{self.p}/{self.q} is not in lowest terms")

    @staticmethod
    def parse(text: str) -> "FareyFraction":
        num, _, den = text.partition("/")
        if not den:
            raise ValueError(f"bad fraction literal {text!r}")
        return FareyFraction(int(num), int(den))

    @staticmethod
    def of(x) -> "FareyFraction":
        if isinstance(x, FareyFraction):
            return x
        if isinstance(x, str):
            return FareyFraction.parse(x)
        frac = Fraction(x)
        return FareyFraction(frac.numerator, frac.denominator)

    @property
    def is_infinite(self) -> bool:
        return self.q == 0

    def value(self):
        return inf if self.q == 0 else Fraction(self.p, self.q)

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"

    def _key(self):
        # Cross-multiplication order with 1/0 as the maximum.
        return (1, 0) if self.q == 0 else (0, Fraction(self.p, self.q))

    def __lt__(self, other: "FareyFraction") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "FareyFraction") -> bool:
        return self._key() <= other._key()

    def is_neighbor(self, other: "FareyFraction") -> bool:
        """True iff the pair spans determinant -1 in tree order."""
        a, b = (self, other) if self < other else (other, self)
        return a.p * b.q - a.q * b.p == -1


def mediant(left, right) -> FareyFraction:
    a, c = FareyFraction.of(left), FareyFraction.of(right)
    if a.p * c.q - a.q * c.p != -1:
        raise NotNeighbors(f"{a} and {c} are not Farey neighbors")
    return FareyFraction(a.p + c.p, a.q + c.q)


def associated_matrix(left, right) -> Mat2:
    """Matrix (c a; d b) sending 0, 1, infinity to a/b, mediant, c/d."""
    a, c = FareyFraction.of(left), FareyFraction.of(right)
    if a.p * c.q - a.q * c.p != -1:
        raise NotNeighbors(f"{a} and {c} are not Farey neighbors")
    return Mat2(c.p, a.p, c.q, a.q)


# ---------------------------------------------------------------- paths


def _validated_quotients(quotients: Iterable[int]) -> Iterator[int]:
    for i, a in enumerate(quotients):
        a = int(a)
        if i == 0:
            if a < 0:
                raise InvalidCF("leading partial quotient must be >= 0")
        elif a < 1:
            raise InvalidCF(f"partial quotient #{i + 1} is {a}, must be >= 1")
        yield a


def turns_for_quotients(quotients: Iterable[int], n_turns: int) -> str:
    """First n_turns turn letters of the path T^(c0) V^(c1) T^(c2)...

    The quotient stream is consumed lazily; raises InvalidCF when the
    stream is exhausted before n_turns letters exist (the stream then
    describes a rational; use turns_for_fraction instead).
    """
    out: list[str] = []
    for i, a in enumerate(_validated_quotients(quotients)):
        out.append(("T" if i % 2 == 0 else "V") * a)
        if sum(map(len, out)) >= n_turns:
            return "".join(out)[:n_turns]
    raise InvalidCF("quotient stream too short for the requested depth")


def _odd_length_cf(x: Fraction) -> list[int]:
    """CF of x > 0 with an odd number of quotients (the V-tail convention)."""
    if x <= 0:
        raise OutOfRange("paths are defined for positive reals")
    quots: list[int] = []
    num, den = x.numerator, x.denominator
    while den:
        quots.append(num // den)
        num, den = den, num % den
    if len(quots) % 2 == 0:
        if quots[-1] > 1:
            quots[-1] -= 1
            quots.append(1)
        else:
            quots.pop()
            quots[-1] += 1
    return quots


def turns_for_fraction(x, n_turns: int) -> str:
    """Turn letters of the rational path: finite prefix then V forever."""
    x = Fraction(x) if not isinstance(x, Fraction) else x
    quots = _odd_length_cf(x)
    out = []
    for i, a in enumerate(quots):
        out.append(("T" if i % 2 == 0 else "V") * a)
    head = "".join(out)
    if len(head) >= n_turns:
        return head[:n_turns]
    return head + "V" * (n_turns - len(head))


class FareyPath:
    """A finite prefix of a T/V turn path with its matrices A_0..A_N."""

    def __init__(self, turns: str):
        if any(ch not in "TV" for ch in turns):
            raise ValueError("turns must be a string over 'T' and 'V'")
        self.turns = turns
        self._mats = [Mat2.identity()]

    @classmethod
    def from_quotients(cls, quotients: Iterable[int], n_turns: int) -> "FareyPath":
        return cls(turns_for_quotients(quotients, n_turns))

    @classmethod
    def from_fraction(cls, x, n_turns: int) -> "FareyPath":
        return cls(turns_for_fraction(x, n_turns))

    def __len__(self) -> int:
        return len(self.turns)

    def matrix(self, n: int) -> Mat2:
        """A_n, the product of the first n turn matrices."""
        if n < 0 or n > len(self.turns):
            raise InvalidCF(f"path holds {len(self.turns)} turns, asked for {n}")
        while len(self._mats) <= n:
            k = len(self._mats)
            step = GEN_T if self.turns[k - 1] == "T" else GEN_V
            self._mats.append(self._mats[-1] @ step)
        return self._mats[n]

    def matrices(self, n: int | None = None) -> list[Mat2]:
        n = len(self.turns) if n is None else n
        self.matrix(n)
        return self._mats[: n + 1]

    def fraction(self, n: int) -> FareyFraction:
        """x_n = A_n(1) = (p+q)/(r+s)."""
        m = self.matrix(n)
        g = gcd(m.p + m.q, m.r + m.s)
        return FareyFraction((m.p + m.q) // g, (m.r + m.s) // g)

    def fractions(self, n: int | None = None) -> list[FareyFraction]:
        n = len(self.turns) if n is None else n
        return [self.fraction(k) for k in range(n + 1)]


def path_matrices(quotients: Iterable[int], n: int, *, rational: bool = False) -> list[Mat2]:
    """A_0..A_n for the path of the given partial-quotient stream.

    With rational=True the stream must be finite and the rational V-tail
    convention is applied.
    """
    if rational:
        quots = list(_validated_quotients(quotients))
        x = Fraction(quots[-1])
        for a in reversed(quots[:-1]):
            x = a + 1 / x
        return FareyPath.from_fraction(x, n).matrices(n)
    return FareyPath.from_quotients(quotients, n).matrices(n)


def _swap_turns(turns: str) -> str:
    return turns.translate(str.maketrans("TV", "VT"))


def transformed_path(path: FareyPath, op: str) -> FareyPath:
    """Path of T(x), V(x), 1/x, or 1-x built from the path of x.

    op is one of 'T', 'V', 'inv', 'one_minus'.  The new path satisfies
    B_n = M A_{n-1} for the shears, B_n = S~ A_n S~ for 1/x, and
    B_n = V T^{-1} S~ A_n S~ for 1-x (which requires x in (0, 1/2)).
    """
    turns = path.turns
    if op == "T":
        return FareyPath("T" + turns)
    if op == "V":
        return FareyPath("V" + turns)
    if op == "inv":
        return FareyPath(_swap_turns(turns))
    if op == "one_minus":
        swapped = _swap_turns(turns)
        if not swapped.startswith("TT"):
            raise OutOfRange("1-x transformation requires x in (0, 1/2)")
        return FareyPath("V" + swapped[1:])
    raise ValueError(f"unknown path transformation {op!r}")


# ---------------------------------------------------------------- levels


_ROOTS = {
    "full": (FareyFraction(0, 1), FareyFraction(1, 0)),
    "half": (FareyFraction(0, 1), FareyFraction(1, 2)),
}


@lru_cache(maxsize=64)
def farey_level(tree: str, n: int) -> tuple[FareyFraction, ...]:
    """The 2^n + 1 ordered fractions of the n-th level of the tree."""
    if tree not in _ROOTS:
        raise ValueError("tree must be 'full' or 'half'")
    if n < 0:
        raise OutOfRange("level must be nonnegative")
    if n == 0:
        return _ROOTS[tree]
    prev = farey_level(tree, n - 1)
    out: list[FareyFraction] = []
    for left, right in zip(prev, prev[1:]):
        out.append(left)
        out.append(mediant(left, right))
    out.append(prev[-1])
    return tuple(out)


# ---------------------------------------------------------------- words


_HALF_LO = FareyFraction(0, 1)
_HALF_HI = FareyFraction(1, 2)


def _require_half_tree(frac) -> FareyFraction:
    f = FareyFraction.of(frac)
    if f.is_infinite or not (_HALF_LO <= f <= _HALF_HI):
        raise OutOfRange(f"{f} is outside [0/1, 1/2]")
    return f


def _descend(target: FareyFraction):
    """Mediant descent to target; yields (lo, hi, mediant) per step."""
    lo, hi = _HALF_LO, _HALF_HI
    while True:
        mid = mediant(lo, hi)
        yield lo, hi, mid
        if mid == target:
            return
        if target < mid:
            hi = mid
        else:
            lo = mid


_word_cache: dict[tuple[int, int], TVWord] = {
    (0, 1): TVWord((1, 1)),
    (1, 2): TVWord((2, 2)),
}


def markov_word(frac) -> TVWord:
    """The half-tree word w(p/q), built by w(mediant) = w(right) (+) w(left)."""
    f = _require_half_tree(frac)
    key = (f.p, f.q)
    if key in _word_cache:
        return _word_cache[key]
    for lo, hi, mid in _descend(f):
        mkey = (mid.p, mid.q)
        if mkey not in _word_cache:
            _word_cache[mkey] = _word_cache[(hi.p, hi.q)].conjoin(
                _word_cache[(lo.p, lo.q)]
            )
    return _word_cache[key]


def minimal_level(frac) -> int:
    """First half-tree level containing the fraction (0 for the roots)."""
    f = _require_half_tree(frac)
    if f in (_HALF_LO, _HALF_HI):
        return 0
    return sum(1 for _ in _descend(f))


def parents_of(frac) -> tuple[FareyFraction, FareyFraction]:
    """The half-tree neighbor pair whose mediant is the given fraction."""
    f = _require_half_tree(frac)
    if f in (_HALF_LO, _HALF_HI):
        raise OutOfRange(f"{f} is a root of the half tree and has no parents")
    for lo, hi, mid in _descend(f):
        if mid == f:
            return lo, hi
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class TripleStructure:
    """Structure of a consecutive level triple around x2 = tuple's middle."""

    k: int
    parent_left: FareyFraction
    parent_right: FareyFraction
    w1: TVWord
    w2: TVWord
    w3: TVWord
    identities_hold: bool


def triple_structure(f1, f2, f3, level: int) -> TripleStructure:
    """Validate a consecutive half-tree triple and its word identities.

    k = level - minimal_level(x2); checks p1+p3 = (2k+1)p2 (and the q
    version) plus w2 = W3 (+) W1, w1 = w2^k (+) W1, w3 = W3 (+) w2^k.
    """
    x1, x2, x3 = (FareyFraction.of(f) for f in (f1, f2, f3))
    nodes = farey_level("half", level)
    try:
        i = nodes.index(x2)
    except ValueError as exc:
        raise NotConsecutive(f"{x2} is not in half-tree level {level}") from exc
    if i == 0 or i == len(nodes) - 1 or nodes[i - 1] != x1 or nodes[i + 1] != x3:
        raise NotConsecutive(f"({x1}, {x2}, {x3}) is not consecutive at level {level}")
    k = level - minimal_level(x2)
    pl, pr = parents_of(x2)
    w1, w2, w3 = markov_word(x1), markov_word(x2), markov_word(x3)
    wl, wr = markov_word(pl), markov_word(pr)
    pow_k = w2.repeat(k)
    ok = (
        x1.p + x3.p == (2 * k + 1) * x2.p
        and x1.q + x3.q == (2 * k + 1) * x2.q
        and w2 == wr.conjoin(wl)
        and w1.exps == pow_k.exps + wl.exps
        and w3.exps == wr.exps + pow_k.exps
    )
    return TripleStructure(k, pl, pr, w1, w2, w3, ok)
