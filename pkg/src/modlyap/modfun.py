"""Modular functions as truncated q-series, evaluated on the unit arc.

A function is stored as its Fourier expansion sum a_n q^n with a finite
principal part (lead = most negative exponent).  The only built-ins are
the constant 1 and the j-function, whose coefficients are computed by
exact integer series division j = E4^3 / Delta and rounded to binary64
once at the end.  Evaluation happens on the arc tau = e^{it} with
t in [pi/3, 2pi/3], where |q| = e^{-2 pi sin t} <= e^{-pi sqrt(3)}.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import OutOfRange

__all__ = [
    "FourierSeries",
    "ARC_LO",
    "ARC_HI",
    "Q_MAX_ARC",
    "j_coefficients_exact",
    "j_series",
    "const_series",
    "get_series",
    "eval_arc",
    "eval_arc_grid",
    "eval_tau",
    "check_admissible",
    "AdmissibilityReport",
    "sup_arc",
    "min_order_for_height",
    "read_series_file",
    "write_series_file",
]

ARC_LO = math.pi / 3
ARC_HI = 2 * math.pi / 3
# max |q| on the arc, attained at the endpoints: e^{-pi sqrt(3)}
Q_MAX_ARC = math.exp(-math.pi * math.sqrt(3.0))

_T_SLACK = 1e-9  # tolerance for float endpoints of the arc


@dataclass(frozen=True)
class FourierSeries:
    """Truncated expansion sum_{n=lead}^{N} coeffs[n-lead] * q^n."""

    lead: int
    coeffs: tuple[float, ...]
    tail_bound: float = 0.0
    name: str = "custom"

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise ValueError("series needs at least one coefficient")
        if any(isinstance(c, complex) for c in self.coeffs):
            raise ValueError("coefficients must be real")
        if any(not math.isfinite(c) for c in self.coeffs):
            raise ValueError("coefficients must be finite")
        if self.tail_bound < 0:
            raise ValueError("tail bound must be nonnegative")

    @property
    def order(self) -> int:
        """Truncation order N (largest retained exponent)."""
        return self.lead + len(self.coeffs) - 1


# ---------------------------------------------------------------- j series


def _poly_mul(a: list[int], b: list[int], n: int) -> list[int]:
    out = [0] * (n + 1)
    for i, ai in enumerate(a):
        if ai == 0 or i > n:
            continue
        top = min(len(b), n + 1 - i)
        for k in range(top):
            out[i + k] += ai * b[k]
    return out


def _eisenstein4(n: int) -> list[int]:
    # E4 = 1 + 240 sum sigma_3(m) q^m
    sigma3 = [0] * (n + 1)
    for d in range(1, n + 1):
        d3 = d * d * d
        for m in range(d, n + 1, d):
            sigma3[m] += d3
    return [1] + [240 * s for s in sigma3[1:]]


def _delta_over_q(n: int) -> list[int]:
    # Delta/q = prod (1-q^m)^24; Euler's pentagonal series, raised to 24
    # by squaring (24 = 2^3 * 3).
    euler = [0] * (n + 1)
    k = 0
    while True:
        for kk in (k, -k) if k else (0,):
            e = kk * (3 * kk - 1) // 2
            if e <= n:
                euler[e] += 1 if kk % 2 == 0 else -1
        if k * (3 * k - 1) // 2 > n and k * (3 * k + 1) // 2 > n:
            break
        k += 1
    p2 = _poly_mul(euler, euler, n)
    p4 = _poly_mul(p2, p2, n)
    p8 = _poly_mul(p4, p4, n)
    p24 = _poly_mul(_poly_mul(p8, p8, n), p8, n)
    return p24


@lru_cache(maxsize=16)
def j_coefficients_exact(n: int) -> tuple[int, ...]:
    """Exact integer coefficients a_{-1}..a_n of the j-function."""
    if n < 0:
        raise ValueError("order must be >= 0")
    e4 = _eisenstein4(n + 1)
    num = _poly_mul(_poly_mul(e4, e4, n + 1), e4, n + 1)
    den = _delta_over_q(n + 1)
    # Series division num/den; den[0] = 1 keeps everything in integers.
    quot = [0] * (n + 2)
    for m in range(n + 2):
        acc = num[m]
        for k in range(1, m + 1):
            acc -= den[k] * quot[m - k]
        quot[m] = acc
    return tuple(quot)  # quot[m] is the coefficient of q^{m-1} in j


def _j_tail_bound(n: int, q_abs: float) -> float:
    """Bound for sum_{m>n} |a_m| q_abs^m using a_m <= e^{4 pi sqrt(m)}."""
    m = n + 1
    first = math.exp(4 * math.pi * math.sqrt(m) + m * math.log(q_abs))
    ratio = math.exp(4 * math.pi / (2 * math.sqrt(m))) * q_abs
    if ratio >= 1.0:
        return math.inf
    return first / (1.0 - ratio)


@lru_cache(maxsize=16)
def j_series(n: int = 24) -> FourierSeries:
    """The j-function truncated at order n, with an arc tail bound."""
    coeffs = tuple(float(c) for c in j_coefficients_exact(n))
    return FourierSeries(-1, coeffs, _j_tail_bound(n, Q_MAX_ARC), name="j")


def const_series() -> FourierSeries:
    return FourierSeries(0, (1.0,), 0.0, name="one")


def get_series(name: str, n: int = 24) -> FourierSeries:
    if name == "j":
        return j_series(n)
    if name == "one":
        return const_series()
    raise ValueError(f"unknown series {name!r}")


def min_order_for_height(y: float, eps: float = 1e-15) -> int:
    """Smallest j truncation with tail below eps at Im tau = y > 0."""
    if y <= 0:
        raise OutOfRange("height must be positive")
    q_abs = math.exp(-2 * math.pi * y)
    n = 8
    while _j_tail_bound(n, q_abs) > eps and n < 1 << 16:
        n *= 2
    return n


# ---------------------------------------------------------------- evaluation


def _check_arc_t(t: float) -> None:
    if not (ARC_LO - _T_SLACK <= t <= ARC_HI + _T_SLACK):
        raise OutOfRange(f"t = {t} outside the arc [pi/3, 2pi/3]")


def eval_tau(f: FourierSeries, tau: complex) -> complex:
    """Value of the series at a point of the upper half-plane."""
    if tau.imag <= 0:
        raise OutOfRange("tau must lie in the upper half-plane")
    q = cmath.exp(2j * math.pi * tau)
    # Horner from the top coefficient down to q^lead.
    acc = 0j
    for c in reversed(f.coeffs):
        acc = acc * q + c
    return acc * q ** f.lead


def eval_arc(f: FourierSeries, t: float) -> complex:
    """Value f(e^{it}) on the arc."""
    _check_arc_t(t)
    return eval_tau(f, cmath.exp(1j * t))


def eval_arc_grid(f: FourierSeries, ts: np.ndarray) -> np.ndarray:
    """Vectorized arc evaluation; returns a complex array."""
    ts = np.asarray(ts, dtype=float)
    if ts.size and (ts.min() < ARC_LO - _T_SLACK or ts.max() > ARC_HI + _T_SLACK):
        raise OutOfRange("grid leaves the arc [pi/3, 2pi/3]")
    q = np.exp(2j * np.pi * np.exp(1j * ts))
    acc = np.zeros_like(q)
    for c in reversed(f.coeffs):
        acc = acc * q + c
    return acc * q ** f.lead


@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    min_real: float
    max_abs_imag: float
    weighted_integral: float  # integral of Re f(e^{it}) sin t dt over the arc

    def __bool__(self) -> bool:
        return self.admissible


def check_admissible(f: FourierSeries, grid_size: int = 256, tol: float = 1e-9) -> AdmissibilityReport:
    """Grid check that f is real and nonnegative on the arc.

    Also requires the sin-weighted arc integral to be positive, which is
    what downstream positivity statements actually consume.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    ts = np.linspace(ARC_LO, ARC_HI, grid_size)
    vals = eval_arc_grid(f, ts)
    min_real = float(vals.real.min())
    max_imag = float(np.abs(vals.imag).max())
    # trapezoid is plenty for a sign decision
    weighted = float(np.trapezoid(vals.real * np.sin(ts), ts))
    ok = min_real >= -tol and max_imag <= tol + f.tail_bound and weighted > 0
    return AdmissibilityReport(ok, min_real, max_imag, weighted)


def sup_arc(f: FourierSeries, grid_size: int = 256) -> float:
    """Grid estimate of sup |f| on the arc, with one 4x refinement."""
    ts = np.linspace(ARC_LO, ARC_HI, grid_size)
    coarse = float(np.abs(eval_arc_grid(f, ts)).max())
    ts4 = np.linspace(ARC_LO, ARC_HI, 4 * grid_size)
    return max(coarse, float(np.abs(eval_arc_grid(f, ts4)).max()))


# ---------------------------------------------------------------- files


def read_series_file(path: str) -> FourierSeries:
    """Text format: first line 'lead N', then one coefficient per line."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("series file must start with a 'lead N' line")
        lead, order = int(header[0]), int(header[1])
        coeffs = [float(line) for line in fh if line.strip()]
    expected = order - lead + 1
    if len(coeffs) != expected:
        raise ValueError(f"expected {expected} coefficients, found {len(coeffs)}")
    return FourierSeries(lead, tuple(coeffs), 0.0, name="custom")


def write_series_file(path: str, f: FourierSeries) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{f.lead} {f.order}\n")
        for c in f.coeffs:
            fh.write(f"{c!r}\n")
