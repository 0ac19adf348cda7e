import itertools
import random

import pytest

from modlyap.modfun import const_series, j_series
from modlyap.words import TVWord


@pytest.fixture(scope="session")
def j24():
    return j_series(24)


@pytest.fixture(scope="session")
def one():
    return const_series()


@pytest.fixture(scope="session")
def tilde8_j(j24):
    from modlyap.lyap import tilde_level_data

    return tilde_level_data(8, j24)


@pytest.fixture(scope="session")
def tilde10_j(j24):
    from modlyap.lyap import tilde_level_data

    return tilde_level_data(10, j24)


def strict_words_up_to(s_max):
    """Every strict word with s(w) <= s_max (compositions, even length)."""
    for s in range(2, s_max + 1):
        for ell in range(2, s + 1, 2):
            for cuts in itertools.combinations(range(1, s), ell - 1):
                parts = [b - a for a, b in zip((0,) + cuts, cuts + (s,))]
                yield TVWord(tuple(parts))


def random_strict_word(rng: random.Random, s_max: int) -> TVWord:
    s = rng.randint(2, s_max)
    ell = 2 * rng.randint(1, s // 2)
    cuts = sorted(rng.sample(range(1, s), ell - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [s])]
    return TVWord(tuple(parts))
