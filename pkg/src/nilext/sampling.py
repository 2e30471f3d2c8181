"""Seeded random instances for tests and experiments (``random.Random`` driven)."""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .abgroup import FinAbGroup, SubgroupEmbedding, subgroup_from_generators
from .liftext import HPoint
from .polymap import PolyMap, Target, multi_indices


def random_group(rng: random.Random, max_rank: int, max_order: int, max_modulus: int | None = None) -> FinAbGroup:
    cap = max_modulus or max_order
    while True:
        rank = rng.randint(1, max_rank)
        factors = tuple(rng.randint(1, cap) for _ in range(rank))
        if math.prod(factors) <= max_order:
            return FinAbGroup(factors)


def random_embedding(rng: random.Random, amb: FinAbGroup, max_gens: int | None = None) -> SubgroupEmbedding:
    ngens = rng.randint(0, max_gens if max_gens is not None else amb.rank + 1)
    gens = [amb.element([rng.randrange(n) for n in amb.factors]) for _ in range(ngens)]
    return subgroup_from_generators(amb, gens)


def random_rational(rng: random.Random, max_den: int) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randrange(-2 * den, 2 * den + 1), den)


def random_hpoint(rng: random.Random, r: int, k: int, d: int = 1, level: int = 1, max_den: int = 12) -> HPoint:
    """Random element of the ``level``-th filtration subgroup of ``H'``."""
    top = k if level <= 1 else k - level + 1
    coeffs = []
    for w in multi_indices(r, k):
        if sum(w) <= top:
            coeffs.append((w, tuple(random_rational(rng, max_den) for _ in range(d))))
    poly = PolyMap(r, k, Target("Q", d), coeffs) if top >= 0 else PolyMap.zero(r, k, Target("Q", d))
    shift = tuple(random_rational(rng, max_den) for _ in range(r)) if level <= 1 else (Fraction(0),) * r
    return HPoint(poly, shift)
