"""Exponent values, invariance, the half-tree function, val, and the attainer."""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_strict_word
from modlyap.cycint import F_kernel, cycle_integral_S, quad_rule
from modlyap.errors import EmptyData, InvalidCF, NoSuchA, OutOfRange
from modlyap.farey import FareyFraction, farey_level, markov_word, minimal_level, triple_structure
from modlyap.lyap import (
    construct_attainer,
    lambda_estimate,
    lambda_periodic,
    piecewise_extension,
    thread_count,
    tilde_lambda,
    tilde_level_data,
    tilde_val,
    val,
)
from modlyap.modfun import eval_arc_grid
from modlyap.words import TVWord

PHI = (1 + math.sqrt(5)) / 2
PSI = 1 + math.sqrt(2)

LAMBDA_J_GOLDEN = 679.7837052177172
LAMBDA_J_SILVER = 625.6808436697563
VAL_GOLDEN = 706.324813540803
VAL_SILVER = 709.8928909199101


def test_periodic_values(j24, one):
    assert lambda_periodic(TVWord((1, 1)), j24) == pytest.approx(LAMBDA_J_GOLDEN, abs=1e-5)
    assert lambda_periodic(TVWord((2, 2)), j24) == pytest.approx(LAMBDA_J_SILVER, abs=1e-5)
    assert lambda_periodic(TVWord((1, 1)), one) == pytest.approx(2 * math.log(PHI), abs=1e-12)
    assert lambda_periodic(TVWord((2, 2)), one) == pytest.approx(math.log(PSI), abs=1e-12)


def test_periodic_invariance(j24):
    rng = random.Random(19)
    for _ in range(15):
        w = random_strict_word(rng, 12)
        base = lambda_periodic(w, j24)
        for i in range(1, w.ell):
            assert lambda_periodic(w.shifted(i), j24) == pytest.approx(base, rel=1e-9)
        assert lambda_periodic(w.opposite(), j24) == pytest.approx(base, rel=1e-9)
        # repeating the period leaves the ratio unchanged
        assert lambda_periodic(w.repeat(3), j24) == pytest.approx(base, rel=1e-9)


def test_golden_is_strict_maximum(j24):
    rng = random.Random(23)
    seen = 0
    while seen < 200:
        w = random_strict_word(rng, 14)
        if w.minimal_even_period() == TVWord((1, 1)):
            continue
        assert lambda_periodic(w, j24) < LAMBDA_J_GOLDEN
        seen += 1


def test_markov_minimum_levels_8(j24):
    silver = tilde_lambda(FareyFraction(1, 2), j24)
    for frac in farey_level("half", 8):
        if frac == FareyFraction(1, 2):
            continue
        assert tilde_lambda(frac, j24) > silver


def test_tilde_endpoints_and_interior(j24):
    assert tilde_lambda(FareyFraction(0, 1), j24) == pytest.approx(LAMBDA_J_GOLDEN, abs=1e-5)
    assert tilde_lambda(FareyFraction(1, 2), j24) == pytest.approx(LAMBDA_J_SILVER, abs=1e-5)
    mid = tilde_lambda(FareyFraction(1, 3), j24)
    assert LAMBDA_J_SILVER < mid < LAMBDA_J_GOLDEN
    assert mid == pytest.approx(638.8639084214764, abs=1e-6)
    with pytest.raises(OutOfRange):
        tilde_lambda(FareyFraction(2, 3), j24)


def test_tilde_decreasing_and_convex_level_8(tilde8_j):
    values = [v for _, v in tilde8_j]
    fracs = [f for f, _ in tilde8_j]
    assert all(a < b for a, b in zip(fracs, fracs[1:]))
    for a, b in zip(values, values[1:]):
        assert a - b > 0
    # three-point inequality on every consecutive triple; margins can hit
    # float ties at depth, so allow noise-sized negatives only
    for i in range(1, len(fracs) - 1):
        t = triple_structure(fracs[i - 1], fracs[i], fracs[i + 1], 8)
        s1, s2, s3 = (2 * f.q for f in (fracs[i - 1], fracs[i], fracs[i + 1]))
        bound = (s1 * values[i - 1] + s3 * values[i + 1]) / ((2 * t.k + 1) * s2)
        assert values[i] <= bound + 1e-9


def test_estimate_periodic_dispatch(j24):
    est = lambda_estimate(((), (1, 2)), 100, j24)
    assert est.status == "Exact"
    assert est.estimate == pytest.approx(lambda_periodic(TVWord((1, 2)), j24), rel=0)
    # preperiod is stripped, and an odd period is doubled
    est2 = lambda_estimate(((5, 3), (1, 1)), 100, j24)
    assert est2.estimate == pytest.approx(LAMBDA_J_GOLDEN, abs=1e-5)
    est3 = lambda_estimate(((), (1,)), 100, j24)
    assert est3.estimate == pytest.approx(LAMBDA_J_GOLDEN, abs=1e-5)
    with pytest.raises(InvalidCF):
        lambda_estimate(((1, 0), (1, 1)), 100, j24)
    with pytest.raises(InvalidCF):
        lambda_estimate(((), ()), 100, j24)


def test_estimate_stream_converges(j24):
    est = lambda_estimate(iter([1, 2] * 200), 400, j24, sample_every=50)
    assert est.status == "Estimated"
    ns = [n for n, _ in est.samples]
    assert ns == sorted(ns)
    per = lambda_periodic(TVWord((1, 2)), j24)
    assert est.estimate == pytest.approx(per, rel=1e-2)


def test_estimate_rational_decays(one):
    est = lambda_estimate(Fraction(2, 3), 800, one, sample_every=100)
    ratios = [r for _, r in est.samples]
    assert ratios[-1] < 0.05
    assert ratios[-1] < ratios[0]


def test_badly_approximable_floor(j24):
    # quotients <= 2 keep every cycle argument in a compact window, so the
    # ratio stays above an explicit positive F-kernel integral
    rule = quad_rule(64)
    fv = eval_arc_grid(j24, rule.nodes).real
    floor = 2.0 * float(
        np.sum(rule.weights * fv * np.sin(rule.nodes) * F_kernel(3.0, rule.nodes))
    )
    assert floor > 400.0
    rng = random.Random(7)
    for _ in range(50):
        quots = [rng.randint(1, 2) for _ in range(400)]
        est = lambda_estimate(iter(quots), 500, j24, sample_every=100)
        assert min(r for _, r in est.samples) > floor


def test_block_limit(j24):
    # Re I(A B^m) / s -> Lambda(B) as the B-blocks dominate
    w = TVWord((2, 2)).conjoin(TVWord((1, 1)).repeat(64))
    ratio = cycle_integral_S(w, j24, check=False) / w.total
    assert ratio == pytest.approx(LAMBDA_J_GOLDEN, rel=2e-2)


# ------------------------------------------------------------------ val


def test_val_frozen(j24):
    assert val(TVWord((1, 1))) == pytest.approx(VAL_GOLDEN, abs=1e-3)
    assert val(TVWord((2, 2))) == pytest.approx(VAL_SILVER, abs=1e-3)
    assert tilde_val(FareyFraction(1, 3)) == pytest.approx(708.9099197207097, abs=1e-6)


def test_val_is_lambda_ratio(j24, one):
    rng = random.Random(31)
    for _ in range(10):
        w = random_strict_word(rng, 10)
        want = lambda_periodic(w, j24) / lambda_periodic(w, one)
        assert val(w) == pytest.approx(want, rel=1e-9)


def test_val_bounds_reproduce(j24, one):
    lo = lambda_periodic(TVWord((2, 2)), j24) / lambda_periodic(TVWord((1, 1)), one)
    hi = lambda_periodic(TVWord((1, 1)), j24) / lambda_periodic(TVWord((2, 2)), one)
    assert lo == pytest.approx(650.1095, abs=1e-3)
    assert hi == pytest.approx(771.2776, abs=1e-3)
    for n in range(5):
        for frac in farey_level("half", n):
            assert lo - 1e-9 <= tilde_val(frac) <= hi + 1e-9


# ------------------------------------------------------------- attainer


def test_attainer_alternates(j24):
    res = construct_attainer(300.0, j24, steps=6)
    assert res.a == 12
    trace = dict(res.trace)
    signs = [trace[n] - 300.0 for n in res.switch_indices]
    assert all(s > 0 for s in signs[::2])
    assert all(s < 0 for s in signs[1::2])
    assert res.word.total == res.switch_indices[-1]


def test_attainer_estimate_window(j24):
    res = construct_attainer(300.0, j24, steps=10)
    assert res.estimate.estimate == pytest.approx(300.0, rel=5e-2)


def test_attainer_guards(j24):
    with pytest.raises(OutOfRange):
        construct_attainer(LAMBDA_J_GOLDEN, j24)
    with pytest.raises(OutOfRange):
        construct_attainer(0.0, j24)
    with pytest.raises(NoSuchA):
        construct_attainer(300.0, j24, a_max=1)
    with pytest.raises(ValueError):
        construct_attainer(300.0, j24, steps=0)


def test_attainer_turns_roundtrip(j24):
    res = construct_attainer(500.0, j24, steps=3)
    s = res.turns()
    assert set(s) <= {"T", "V"}
    assert len(s) == res.word.total


# ------------------------------------------------------------ utilities


def test_thread_count(monkeypatch):
    monkeypatch.delenv("MODLYAP_THREADS", raising=False)
    assert thread_count() >= 1
    monkeypatch.setenv("MODLYAP_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("MODLYAP_THREADS", "0")
    assert thread_count() >= 1
    monkeypatch.setenv("MODLYAP_THREADS", "-2")
    with pytest.raises(ValueError):
        thread_count()
    monkeypatch.setenv("MODLYAP_THREADS", "many")
    with pytest.raises(ValueError):
        thread_count()


def test_level_data_deterministic(j24, monkeypatch):
    monkeypatch.setenv("MODLYAP_THREADS", "1")
    serial = tilde_level_data(3, j24)
    monkeypatch.setenv("MODLYAP_THREADS", "4")
    parallel = tilde_level_data(3, j24)
    assert serial == parallel
    assert len(serial) == 9


def test_piecewise_extension(j24):
    samples = [(0.0, 10.0), (0.25, 4.0), (0.5, 2.0)]
    ev = piecewise_extension(samples)
    assert ev(0.0) == 10.0 and ev(0.25) == 4.0 and ev(0.5) == 2.0
    assert ev(0.125) == pytest.approx(7.0)
    # clamped to hull values outside
    assert ev(-1.0) == 10.0 and ev(0.9) == 2.0
    with pytest.raises(EmptyData):
        piecewise_extension([])
    with pytest.raises(ValueError):
        piecewise_extension([(0.1, 1.0), (0.1, 2.0)])


def test_extension_refinement(tilde8_j, tilde10_j):
    ev8 = piecewise_extension([(f.value(), v) for f, v in tilde8_j])
    ev10 = piecewise_extension([(f.value(), v) for f, v in tilde10_j])
    xs8 = sorted(f.value() for f, _ in tilde8_j)
    mids = [(a + b) / 2 for a, b in zip(xs8, xs8[1:])]
    assert max(abs(ev8(x) - ev10(x)) for x in mids) < 0.5
    # node values agree exactly on the shared coarse nodes
    for f, v in tilde8_j:
        assert ev10(f.value()) == pytest.approx(v, rel=1e-12)
