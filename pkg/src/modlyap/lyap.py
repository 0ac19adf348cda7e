"""Lyapunov exponents of modular cycle integrals along Farey paths.

The central quantity is the limsup of Re I_f(A_n)/n over the path
matrices A_n of a number's turn sequence.  For eventually periodic
sequences this collapses to the closed form Re I_f(period)/s(period),
which lambda_periodic computes; lambda_estimate produces the running
ratios for arbitrary quotient streams and rationals.  tilde_lambda is
the half-tree parametrization, val the length-normalized variant, and
construct_attainer builds a turn sequence whose ratio oscillates around
a prescribed target value.
"""

from __future__ import annotations

import math
import os
from bisect import bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .cycint import DEFAULT_ORDER, cycle_integral_S
from .errors import EmptyData, InvalidCF, NoSuchA, OutOfRange
from .farey import (
    FareyFraction,
    farey_level,
    markov_word,
    turns_for_fraction,
    turns_for_quotients,
)
from .modfun import FourierSeries, j_series
from .words import TVWord, automorph_eps, cyclic_strict, word_to_matrix

__all__ = [
    "LyapunovEstimate",
    "AttainerResult",
    "lambda_periodic",
    "period_word",
    "lambda_estimate",
    "tilde_lambda",
    "val",
    "tilde_val",
    "construct_attainer",
    "piecewise_extension",
    "tilde_level_data",
    "thread_count",
]

MAX_SWITCHES = 64
DEFAULT_A_MAX = 2048


@dataclass(frozen=True)
class LyapunovEstimate:
    """Running ratios Re I_f(A_n)/n and a trailing-window limsup proxy.

    status is "Exact" when the input was eventually periodic (the
    estimate is then the closed-form period value), else "Estimated".
    """

    samples: tuple[tuple[int, float], ...]
    limsup_window: int
    estimate: float
    status: str

    @property
    def is_exact(self) -> bool:
        return self.status == "Exact"


def lambda_periodic(word: TVWord, f: FourierSeries, order: int = DEFAULT_ORDER) -> float:
    """Closed-form exponent Re I_f(word)/s(word) of a periodic path."""
    word.require_strict()
    return cycle_integral_S(word, f, order) / word.total


def period_word(quotients: Sequence[int]) -> TVWord:
    """Word of a periodic quotient block, doubling odd-length blocks."""
    qs = tuple(int(a) for a in quotients)
    if not qs:
        raise InvalidCF("empty periodic part")
    if any(a < 1 for a in qs):
        raise InvalidCF("periodic partial quotients must be >= 1")
    if len(qs) % 2:
        qs = qs + qs
    return TVWord(qs)


def _runs_ratio(runs: list[list[int]], n: int, f: FourierSeries, order: int) -> float:
    """Re I_f(A_n)/n for the prefix with the given generator runs.

    A_n is conjugate to the matrix of the rotated strict word, so the
    cycle integral may be taken there; single-generator prefixes are
    parabolic and contribute 0.
    """
    exps: list[int] = []
    if runs and runs[0][0] == 1:
        exps.append(0)
    exps.extend(count for _, count in runs)
    if len(exps) % 2:
        exps.append(0)
    strict = cyclic_strict(TVWord(tuple(exps)))
    if strict is None:
        return 0.0
    return cycle_integral_S(strict, f, order, check=False) / n


def _sampled_ratios(
    letters: str, f: FourierSeries, order: int, sample_every: int
) -> list[tuple[int, float]]:
    n_max = len(letters)
    samples: list[tuple[int, float]] = []
    runs: list[list[int]] = []  # [generator parity, run length], parity 0 is T
    for i, ch in enumerate(letters):
        par = 0 if ch == "T" else 1
        if runs and runs[-1][0] == par:
            runs[-1][1] += 1
        else:
            runs.append([par, 1])
        n = i + 1
        if n == n_max or n % sample_every == 0:
            samples.append((n, _runs_ratio(runs, n, f, order)))
    return samples


def _window_max(samples: Sequence[tuple[int, float]], window: int) -> float:
    tail = samples[-window:]
    return max(r for _, r in tail)


def lambda_estimate(
    x,
    n_max: int,
    f: FourierSeries,
    order: int = DEFAULT_ORDER,
    sample_every: int = 0,
    limsup_window: int = 0,
) -> LyapunovEstimate:
    """Estimate the exponent of x from its quotient stream.

    x may be a Fraction/int (rational path, V-padded), a pair
    (preperiod, period) of quotient sequences (dispatched to the exact
    periodic value; the preperiod is irrelevant by the invariance of
    the exponent under integer Moebius maps), or an iterable quotient
    stream long enough to cover n_max turn letters.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if (
        isinstance(x, tuple)
        and len(x) == 2
        and all(isinstance(part, (list, tuple)) for part in x)
    ):
        pre, period = x
        if pre:
            head = [int(a) for a in pre]
            if head[0] < 0 or any(a < 1 for a in head[1:]):
                raise InvalidCF("bad preperiod quotients")
        word = period_word(period)
        value = lambda_periodic(word, f, order)
        return LyapunovEstimate(((word.total, value),), 1, value, "Exact")

    if isinstance(x, (Fraction, int)):
        letters = turns_for_fraction(Fraction(x), n_max)
    elif isinstance(x, str):
        letters = turns_for_fraction(Fraction(x), n_max)
    elif isinstance(x, Iterable):
        letters = turns_for_quotients(x, n_max)
    else:
        raise TypeError(f"cannot read a quotient stream from {type(x).__name__}")

    if sample_every <= 0:
        sample_every = max(1, n_max // 256)
    samples = _sampled_ratios(letters, f, order, sample_every)
    if not samples:
        raise EmptyData("no turn letters to sample")
    if limsup_window <= 0:
        limsup_window = max(1, math.ceil(len(samples) / 4))
    return LyapunovEstimate(
        tuple(samples), limsup_window, _window_max(samples, limsup_window), "Estimated"
    )


# ------------------------------------------------------------- half tree


@lru_cache(maxsize=None)
def _tilde_cached(p: int, q: int, f: FourierSeries, order: int) -> float:
    return lambda_periodic(markov_word(FareyFraction(p, q)), f, order)


def tilde_lambda(frac, f: FourierSeries, order: int = DEFAULT_ORDER) -> float:
    """Exponent of the half-tree word of p/q in [0, 1/2]; equals
    Re I_f(word)/(2q)."""
    fr = FareyFraction.of(frac)
    return _tilde_cached(fr.p, fr.q, f, order)


def val(word: TVWord, order: int = DEFAULT_ORDER, series: FourierSeries | None = None) -> float:
    """Cycle integral of j normalized by the geodesic length 2 log eps."""
    word.require_strict()
    series = j_series() if series is None else series
    numer = cycle_integral_S(word, series, order)
    _, length = automorph_eps(word_to_matrix(word))
    return numer / length


def tilde_val(frac, order: int = DEFAULT_ORDER) -> float:
    return val(markov_word(FareyFraction.of(frac)), order)


def thread_count() -> int:
    """Worker count from MODLYAP_THREADS; 0 or unset means one per CPU."""
    raw = os.environ.get("MODLYAP_THREADS", "0").strip()
    try:
        k = int(raw)
    except ValueError as exc:
        raise ValueError(f"MODLYAP_THREADS must be an integer, got {raw!r}") from exc
    if k < 0:
        raise ValueError("MODLYAP_THREADS must be >= 0")
    return k if k else (os.cpu_count() or 1)


def tilde_level_data(
    level: int, f: FourierSeries, order: int = DEFAULT_ORDER
) -> tuple[tuple[FareyFraction, float], ...]:
    """(fraction, tilde_lambda) for every node of the half-tree level.

    Evaluations are independent and run on a thread pool; the output
    order is the ascending node order regardless of worker count.
    """
    fracs = farey_level("half", level)

    def one(fr: FareyFraction) -> float:
        return _tilde_cached(fr.p, fr.q, f, order)

    workers = thread_count()
    if workers == 1:
        values = [one(fr) for fr in fracs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(one, fracs))
    return tuple(zip(fracs, values))


# -------------------------------------------------------------- attainer


@dataclass(frozen=True)
class AttainerResult:
    """Greedy alternation prefix whose ratio oscillates around target."""

    word: TVWord
    a: int
    target: float
    switch_indices: tuple[int, ...]
    trace: tuple[tuple[int, float], ...]
    estimate: LyapunovEstimate

    def turns(self) -> str:
        out = []
        for i, e in enumerate(self.word.exps):
            out.append(("T" if i % 2 == 0 else "V") * e)
        return "".join(out)


def construct_attainer(
    target: float,
    f: FourierSeries,
    steps: int = 10,
    order: int = DEFAULT_ORDER,
    a_max: int = DEFAULT_A_MAX,
) -> AttainerResult:
    """Build a turn sequence with exponent target by block alternation.

    Appends TV blocks until the running ratio exceeds target, then TV^a
    blocks until it drops below, for `steps` switches.  The block value
    Re I_f(TV^a)/(a+1) of the minimal usable a lies below target, the
    golden value above, so each search terminates and the oscillation
    dies off like 1/n.
    """
    if steps < 1 or steps > MAX_SWITCHES:
        raise ValueError(f"steps must be in 1..{MAX_SWITCHES}")
    lam_top = lambda_periodic(TVWord((1, 1)), f, order)
    if not (0.0 < target < lam_top):
        raise OutOfRange(f"target must lie strictly inside (0, {lam_top:.6g})")
    a = 0
    for cand in range(2, a_max + 1):
        if lambda_periodic(TVWord((1, cand)), f, order) < target:
            a = cand
            break
    if not a:
        raise NoSuchA(f"no block exponent a <= {a_max} pushes the ratio below target")

    exps: list[int] = []
    n = 0
    trace: list[tuple[int, float]] = []
    switches: list[int] = []
    going_up = True
    for _ in range(steps):
        while True:
            block = (1, 1) if going_up else (1, a)
            exps.extend(block)
            n += sum(block)
            ratio = cycle_integral_S(TVWord(tuple(exps)), f, order, check=False) / n
            trace.append((n, ratio))
            crossed = ratio > target if going_up else ratio < target
            if crossed:
                break
        switches.append(n)
        going_up = not going_up

    window = max(1, math.ceil(len(trace) / 4))
    estimate = LyapunovEstimate(
        tuple(trace), window, _window_max(trace, window), "Estimated"
    )
    return AttainerResult(
        TVWord(tuple(exps)), a, float(target), tuple(switches), tuple(trace), estimate
    )


# ----------------------------------------------------------- extension


def piecewise_extension(samples) -> Callable[[float], float]:
    """Piecewise-linear evaluator through (x, value) samples.

    Exact at the nodes; clamps to the end values outside the sampled
    hull.  Monotonicity and convexity of the data carry over to the
    interpolant on the hull.
    """
    pts: dict[float, float] = {}
    for x, y in samples:
        fx, fy = float(x), float(y)
        if fx in pts and pts[fx] != fy:
            raise ValueError(f"conflicting samples at x = {fx}")
        pts[fx] = fy
    if not pts:
        raise EmptyData("no samples")
    xs = sorted(pts)
    ys = [pts[x] for x in xs]

    def evaluate(t) -> float:
        ft = float(t)
        if ft <= xs[0]:
            return ys[0]
        if ft >= xs[-1]:
            return ys[-1]
        i = bisect_right(xs, ft)
        x0, x1 = xs[i - 1], xs[i]
        y0, y1 = ys[i - 1], ys[i]
        return y0 + (y1 - y0) * (ft - x0) / (x1 - x0)

    return evaluate
