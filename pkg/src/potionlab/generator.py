"""Seeded random recipe generation from the fragment pool.

Each recipe draws an ingredient count uniformly in
[min_ingredients, max_ingredients] and a mixing count in
[min_mixings, max_mixings], samples that many distinct fragments of each
kind without replacement, shuffles the combined sequence uniformly and joins
the fragment texts with single spaces.

Recipe index i uses its own splitmix64 substream seeded with seed + i, so
the output for a given index does not depend on the total count and recipes
could be produced in parallel by index; the returned list is always ordered
by index. A recipe whose normalized text collides with a training recipe is
resampled from the same substream, up to a fixed retry bound.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .corpus import Dataset, FragmentPool, Recipe, normalize_text
from .errors import ExhaustedRetries, PoolTooSmall
from .rng import SplitMix64

RETRY_LIMIT = 100

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    count: int = 10_000
    min_ingredients: int = 3
    max_ingredients: int = 8
    min_mixings: int = 1
    max_mixings: int = 3

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if not 1 <= self.min_ingredients <= self.max_ingredients:
            raise ValueError("need 1 <= min_ingredients <= max_ingredients")
        if not 0 <= self.min_mixings <= self.max_mixings:
            raise ValueError("need 0 <= min_mixings <= max_mixings")


def generate(pool: FragmentPool, training: Dataset, cfg: GeneratorConfig) -> list[Recipe]:
    """Exactly cfg.count novel recipes, a pure function of (pool, training, cfg)."""
    if cfg.max_ingredients > len(pool.ingredients):
        raise PoolTooSmall(
            f"need {cfg.max_ingredients} distinct ingredient fragments, "
            f"pool has {len(pool.ingredients)}")
    if cfg.max_mixings > len(pool.mixings):
        raise PoolTooSmall(
            f"need {cfg.max_mixings} distinct mixing fragments, "
            f"pool has {len(pool.mixings)}")

    known = {normalize_text(r.raw_text) for r in training.recipes}
    recipes: list[Recipe] = []
    for index in range(cfg.count):
        rng = SplitMix64((cfg.seed + index) & _MASK64)
        for _ in range(RETRY_LIMIT):
            k = rng.randint(cfg.min_ingredients, cfg.max_ingredients)
            m = rng.randint(cfg.min_mixings, cfg.max_mixings)
            fragments = rng.sample(pool.ingredients, k) + rng.sample(pool.mixings, m)
            rng.shuffle(fragments)
            raw_text = " ".join(f.text for f in fragments)
            if normalize_text(raw_text) not in known:
                break
        else:
            raise ExhaustedRetries(RETRY_LIMIT, index)
        recipes.append(Recipe(id=f"gen-{index}", raw_text=raw_text,
                              fragments=tuple(fragments), label=None))
    return recipes


def fragment_count_histogram(recipes: list[Recipe]) -> dict[int, int]:
    """Map from total fragment count to the number of recipes with it."""
    return dict(sorted(Counter(len(r.fragments) for r in recipes).items()))
