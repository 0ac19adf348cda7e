"""Cycle integrals of modular functions over closed geodesics.

Three independent routes to I_f(A) are provided.  The S route integrates
f(e^{it}) sin t (S(w,t) + S(w_op,t)) over the arc, where S(w,t) sums the
kernel F(x,t) = x/(1+x^2-2x cos t) over the cycle of the word w.  The K
route integrates f(e^{it}) K_w(t) i e^{it} with the pole-pair kernel K.
The direct route integrates f(tau) sqrt(D)/Q(tau,1) from tau0 to A tau0,
leg by leg along a generator decomposition of A, transporting the fixed
points exactly between legs.

All quadrature is Gauss-Legendre with an order-doubling convergence
check.  Word cycles enter the S route through backward iteration of the
periodic tails (a contraction, so binary64-stable); the K route uses the
exact surd cycle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    BadRange,
    NotHyperbolic,
    PathTooLow,
    QuadratureNotConverged,
)
from .modfun import (
    ARC_HI,
    ARC_LO,
    FourierSeries,
    eval_arc_grid,
    eval_tau,
    j_series,
    min_order_for_height,
)
from .words import Mat2, TVWord, cycle_sequence, fixed_points

__all__ = [
    "QuadratureRule",
    "quad_rule",
    "F_kernel",
    "K_kernel",
    "cycle_tails",
    "s_values",
    "S_sum",
    "S_partial",
    "cycle_integral_S",
    "cycle_integral_K",
    "cycle_integral_direct",
    "IntegralResult",
    "cycle_integral",
    "sl2z_generators",
    "TRIVIAL_POLE_BOUND",
]

# |1/(e^{it} - x)| <= 2/sqrt(3) for real x and t in the arc
TRIVIAL_POLE_BOUND = 2.0 / math.sqrt(3.0)

DEFAULT_ORDER = 64
DEFAULT_RTOL = 1e-10
MIN_HEIGHT = 0.05


# ---------------------------------------------------------------- rules


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes/weights pulled back to [pi/3, 2pi/3]."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray


@lru_cache(maxsize=32)
def quad_rule(order: int) -> QuadratureRule:
    if order < 1:
        raise BadRange("quadrature order must be positive")
    x, w = np.polynomial.legendre.leggauss(order)
    half = (ARC_HI - ARC_LO) / 2.0
    mid = (ARC_HI + ARC_LO) / 2.0
    nodes = mid + half * x
    weights = half * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(order, nodes, weights)


@lru_cache(maxsize=64)
def _arc_values(f: FourierSeries, order: int) -> np.ndarray:
    """Complex f(e^{it}) at the rule nodes."""
    vals = eval_arc_grid(f, quad_rule(order).nodes)
    vals.setflags(write=False)
    return vals


@lru_cache(maxsize=64)
def _f_sin_weights(f: FourierSeries, order: int) -> np.ndarray:
    """weights * Re f(e^{it}) * sin t, the S-route arc measure."""
    rule = quad_rule(order)
    out = rule.weights * _arc_values(f, order).real * np.sin(rule.nodes)
    out.setflags(write=False)
    return out


# ---------------------------------------------------------------- kernels


def F_kernel(x, t):
    """F(x,t) = x / (1 + x^2 - 2 x cos t); accepts arrays in either slot."""
    x = np.asarray(x, dtype=float)
    c = np.cos(np.asarray(t, dtype=float))
    out = x / (1.0 + x * x - 2.0 * x * c)
    return out if out.ndim else float(out)


@lru_cache(maxsize=4096)
def _cycle_pairs(word: TVWord) -> tuple[np.ndarray, np.ndarray]:
    pairs = cycle_sequence(word)
    xs = np.array([p.value() for p, _ in pairs])
    cs = np.array([pc.value() for _, pc in pairs])
    xs.setflags(write=False)
    cs.setflags(write=False)
    return xs, cs


def K_kernel(word: TVWord, r: int, s: int, t):
    """Sum over cycle positions r..s of 1/(e^{it}-w^(k)) - 1/(e^{it}-w~^(k))."""
    word.require_strict()
    total = word.total
    if not (1 <= r <= s <= total):
        raise BadRange(f"need 1 <= r <= s <= {total}, got ({r}, {s})")
    xs, cs = _cycle_pairs(word)
    e = np.exp(1j * np.asarray(t, dtype=float))
    e = e[..., None] if e.ndim else e
    block_x = xs[r - 1 : s]
    block_c = cs[r - 1 : s]
    out = (1.0 / (e - block_x) - 1.0 / (e - block_c)).sum(axis=-1)
    return out if getattr(out, "ndim", 0) else complex(out)


# ---------------------------------------------------------------- cycles


def cycle_tails(word: TVWord) -> np.ndarray:
    """tails[i] = value of the shifted CF [a_i; a_{i+1}, ...], 0-based.

    Backward iteration x -> a + 1/x is a contraction toward the periodic
    point, so a float seed converges to machine precision well within the
    warmup; forward iteration would be unstable.
    """
    word.require_strict()
    exps = word.exps
    ell = len(exps)
    warm_steps = ell * (128 // ell + 2)
    x = 1.5
    tails = np.empty(ell)
    for idx in range(warm_steps + ell - 1, -1, -1):
        x = exps[idx % ell] + 1.0 / x
        if idx < ell:
            tails[idx] = x
    return tails


def s_values(word: TVWord) -> np.ndarray:
    """The s(w) arguments j + 1/tail fed to F, in cycle order.

    These are the cycle values with entries in (0,1) replaced by their
    reciprocals, which leaves F unchanged (F(1/x,t) = F(x,t)).
    """
    tails = cycle_tails(word)
    exps = word.exps
    ell = len(exps)
    vals = np.empty(word.total)
    pos = 0
    for i in range(ell):
        tail_inv = 1.0 / tails[(i + 1) % ell]
        for j in range(exps[i], 0, -1):
            vals[pos] = j + tail_inv
            pos += 1
    return vals


def _f_block_sum(xs: np.ndarray, cos_t: np.ndarray) -> np.ndarray:
    """Sum of F(x, t) over xs for each t, via one broadcast."""
    x = xs[:, None]
    return (x / (1.0 + x * x - 2.0 * x * cos_t[None, :])).sum(axis=0)


def S_sum(word: TVWord, t):
    """S(w,t), the full cycle F-sum; t scalar or array."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    out = _f_block_sum(s_values(word), np.cos(t_arr))
    return out if np.ndim(t) else float(out[0])


def S_partial(word: TVWord, i: int, t):
    """S_i(w,t): the F-sum of block i (1-based, reduced mod the length)."""
    word.require_strict()
    exps = word.exps
    ell = len(exps)
    bi = (i - 1) % ell
    tails = cycle_tails(word)
    xs = np.array([j + 1.0 / tails[(bi + 1) % ell] for j in range(1, exps[bi] + 1)])
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    out = _f_block_sum(xs, np.cos(t_arr))
    return out if np.ndim(t) else float(out[0])


# ---------------------------------------------------------------- S route


def _s_integral_at(word: TVWord, f: FourierSeries, order: int) -> float:
    rule = quad_rule(order)
    cos_t = np.cos(rule.nodes)
    kernel = _f_block_sum(s_values(word), cos_t)
    kernel = kernel + _f_block_sum(s_values(word.opposite()), cos_t)
    return float(_f_sin_weights(f, order) @ kernel)


def cycle_integral_S(
    word: TVWord,
    f: FourierSeries,
    order: int = DEFAULT_ORDER,
    rtol: float = DEFAULT_RTOL,
    check: bool = True,
) -> float:
    """Re I_f of the word's matrix via the arc formula with S-kernels."""
    word.require_strict()
    value = _s_integral_at(word, f, order)
    if check:
        refined = _s_integral_at(word, f, 2 * order)
        if abs(value - refined) > rtol * (1.0 + abs(refined)):
            raise QuadratureNotConverged(
                f"S-integral moved by {abs(value - refined):.3e} on doubling order {order}"
            )
    return value


# ---------------------------------------------------------------- K route


def _k_integral_at(word: TVWord, f: FourierSeries, order: int) -> complex:
    rule = quad_rule(order)
    e = np.exp(1j * rule.nodes)
    xs, cs = _cycle_pairs(word)
    kern = (1.0 / (e[None, :] - xs[:, None]) - 1.0 / (e[None, :] - cs[:, None])).sum(axis=0)
    integrand = _arc_values(f, order) * kern * 1j * e
    return complex(rule.weights @ integrand)


def cycle_integral_K(
    word: TVWord,
    f: FourierSeries,
    order: int = DEFAULT_ORDER,
    rtol: float = DEFAULT_RTOL,
    check: bool = True,
) -> complex:
    """I_f of the word's matrix via the pole-pair kernel (complex value)."""
    word.require_strict()
    value = _k_integral_at(word, f, order)
    if check:
        refined = _k_integral_at(word, f, 2 * order)
        if abs(value - refined) > rtol * (1.0 + abs(refined)):
            raise QuadratureNotConverged(
                f"K-integral moved by {abs(value - refined):.3e} on doubling order {order}"
            )
    return value


# ---------------------------------------------------------------- direct


_S_MAT = Mat2(0, -1, 1, 0)


def sl2z_generators(m: Mat2) -> list[Mat2]:
    """Factor m (det 1) as a product of T-powers and S, up to overall sign.

    The sign is irrelevant for Moebius action and hence for the integral.
    """
    if m.det() != 1:
        raise ValueError("generator decomposition requires determinant 1")
    a, b, c, d = m.entries()
    gens: list[Mat2] = []
    while c != 0:
        k = a // c
        if k != 0:
            gens.append(Mat2(1, k, 0, 1))
        a, b = a - k * c, b - k * d
        gens.append(_S_MAT)
        a, b, c, d = c, d, -a, -b
    if b != 0:
        gens.append(Mat2(1, b * d, 0, 1))
    prod = Mat2.identity()
    for g in gens:
        prod = prod @ g
    if prod.entries() != m.entries() and prod.entries() != (-m).entries():
        raise AssertionError("generator decomposition failed to reproduce the matrix")
    return gens


@lru_cache(maxsize=8)
def _gauss01(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1.0) / 2.0, w / 2.0


def _leg_series(f: FourierSeries, y_min: float) -> FourierSeries:
    # The j series can be re-truncated to whatever the leg height needs;
    # a user-supplied series is taken as given.
    if f.name == "j":
        need = min_order_for_height(y_min)
        if need > f.order:
            return j_series(need)
    return f


def _leg_integral_at(
    f: FourierSeries, z0: complex, z1: complex, x: float, xc: float, order: int, pieces: int
) -> complex:
    base, wts = _gauss01(order)
    total = 0j
    step = (z1 - z0) / pieces
    for p in range(pieces):
        a = z0 + p * step
        sigma = a + base * step
        q = np.exp(2j * np.pi * sigma)
        fv = np.zeros_like(q)
        for coef in reversed(f.coeffs):
            fv = fv * q + coef
        fv = fv * q ** f.lead
        kern = 1.0 / (sigma - x) - 1.0 / (sigma - xc)
        total += step * np.sum(wts * fv * kern)
    return complex(total)


def cycle_integral_direct(
    mat: Mat2,
    f: FourierSeries,
    tau0: complex = 1j,
    order: int = 48,
    rtol: float = 1e-9,
    min_height: float = MIN_HEIGHT,
) -> complex:
    """I_f(A) integrated from tau0 to A tau0 along generator legs.

    The path goes through the generator orbit of tau0; each leg is pulled
    back to a straight segment from tau0 with the pole pair transported
    by the exact surd action.  Path independence makes this equal to any
    other choice of path, in particular the straight segment.
    """
    if mat.det() != 1:
        raise ValueError("cycle integrals need determinant 1")
    if not mat.is_hyperbolic():
        raise NotHyperbolic(f"{mat} has trace {mat.trace()}")
    if tau0.imag <= 0:
        raise ValueError("tau0 must lie in the upper half-plane")
    surd, _ = fixed_points(mat)
    total = 0j
    scale = 0.0
    for gen in sl2z_generators(mat):
        z0, z1 = complex(tau0), gen.mobius(complex(tau0))
        if abs(z1 - z0) > 1e-14 * (1.0 + abs(z0)):
            y_min = min(z0.imag, z1.imag)
            if y_min < min_height:
                raise PathTooLow(
                    f"leg {z0:.4g} -> {z1:.4g} dips to Im = {y_min:.4g} < {min_height}"
                )
            leg_f = _leg_series(f, y_min)
            # Walking tau0 -> A tau0 flows toward the attracting fixed
            # point, so positivity of the period integral needs the pole
            # order (repelling, attracting) in the kernel.
            x, xc = surd.conjugate().value(), surd.value()
            pieces = max(1, math.ceil(abs(z1 - z0) / max(2.0 * y_min, 0.5)))
            val = _leg_integral_at(leg_f, z0, z1, x, xc, order, pieces)
            refined = _leg_integral_at(leg_f, z0, z1, x, xc, order, 2 * pieces)
            if abs(val - refined) > rtol * (1.0 + abs(refined)):
                raise QuadratureNotConverged(
                    f"direct leg moved by {abs(val - refined):.3e} on subdivision"
                )
            total += val
            scale += abs(val)
        surd = surd.apply(gen.inverse())
    return total


# ---------------------------------------------------------------- façade


@dataclass(frozen=True)
class IntegralResult:
    value: complex
    est_error: float
    order: int
    method: str


def cycle_integral(
    word: TVWord,
    f: FourierSeries,
    method: str = "s",
    order: int = DEFAULT_ORDER,
    tau0: complex = 1j,
) -> IntegralResult:
    """One-stop dispatcher used by the CLI; reports the doubling error."""
    word.require_strict()
    if method == "s":
        v1 = _s_integral_at(word, f, order)
        v2 = _s_integral_at(word, f, 2 * order)
        return IntegralResult(complex(v1), abs(v1 - v2), order, "s")
    if method == "k":
        k1 = _k_integral_at(word, f, order)
        k2 = _k_integral_at(word, f, 2 * order)
        return IntegralResult(k1, abs(k1 - k2), order, "k")
    if method == "direct":
        mat = word.matrix()
        d1 = cycle_integral_direct(mat, f, tau0=tau0, order=order)
        d2 = cycle_integral_direct(mat, f, tau0=tau0, order=order + 16)
        return IntegralResult(d1, abs(d1 - d2), order, "direct")
    raise ValueError(f"unknown method {method!r}")
