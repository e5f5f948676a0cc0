"""Seeded random element generators shared by the property suite and tests.

All randomness flows from explicit ``random.Random`` instances so that
every counterexample is reproducible from a single seed.
"""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache

from .apt import APTElement, APTKey
from .aromas import MA_UNIT, MultiAroma, SAElement, enumerate_aromas
from .freelie import LieElement, enumerate_lyndon_words
from .linear import LinComb
from .trees import PlanarTree, enumerate_trees


@lru_cache(maxsize=None)
def tree_pool(max_degree: int) -> tuple[PlanarTree, ...]:
    return tuple(t for d in range(1, max_degree + 1) for t in enumerate_trees(d))


@lru_cache(maxsize=None)
def lyndon_pool(max_degree: int):
    return tuple(
        k for d in range(1, max_degree + 1) for k in enumerate_lyndon_words(d)
    )


@lru_cache(maxsize=None)
def multiaroma_pool(max_degree: int) -> tuple[MultiAroma, ...]:
    """Multi-aroma monomials of total size <= max_degree (including the unit)."""
    out = [MA_UNIT]

    def extend(prefix, remaining):
        for size in range(1, remaining + 1):
            for a in enumerate_aromas(size):
                cur = prefix + (a,)
                out.append(MultiAroma(cur))
                extend(cur, remaining - size)

    extend((), max_degree)
    return tuple(dict.fromkeys(out))


@lru_cache(maxsize=None)
def apt_key_pool(max_degree: int) -> tuple[APTKey, ...]:
    out = []
    for m in multiaroma_pool(max_degree - 1):
        for k in lyndon_pool(max_degree - m.size):
            out.append(APTKey(m, k))
    return tuple(out)


def random_coeff(rng: random.Random) -> Fraction:
    return Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 1, 2]))


def random_tree(rng: random.Random, max_degree: int = 4) -> PlanarTree:
    return rng.choice(tree_pool(max_degree))


def random_lie(rng: random.Random, max_degree: int = 4, terms: int = 2) -> LieElement:
    pool = lyndon_pool(max_degree)
    out: LieElement = LinComb.zero()
    for _ in range(terms):
        out = out + LinComb.single(rng.choice(pool), random_coeff(rng))
    return out


def random_sa(rng: random.Random, max_degree: int = 4, terms: int = 2) -> SAElement:
    pool = multiaroma_pool(max_degree)
    out: SAElement = LinComb.zero()
    for _ in range(terms):
        out = out + LinComb.single(rng.choice(pool), random_coeff(rng))
    return out


def random_apt(rng: random.Random, max_degree: int = 4, terms: int = 2) -> APTElement:
    pool = apt_key_pool(max_degree)
    out: APTElement = LinComb.zero()
    for _ in range(terms):
        out = out + LinComb.single(rng.choice(pool), random_coeff(rng))
    return out


def random_apt_tree_part(
    rng: random.Random, max_degree: int = 4, terms: int = 2
) -> APTElement:
    """Random element whose Lie parts are single trees (needed by delta)."""
    pool = [k for k in apt_key_pool(max_degree) if len(k.lie) == 1]
    out: APTElement = LinComb.zero()
    for _ in range(terms):
        out = out + LinComb.single(rng.choice(pool), random_coeff(rng))
    return out
