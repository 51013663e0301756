"""The fixed 11-way ATC-derived category taxonomy.

Categories are first/second-level ATC pharmacological groups plus a Poison
class, which carries no ATC code. The list is fixed: ids are the contiguous
range 0..10 in the order below and the name/id mapping is bijective.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Category:
    id: int
    name: str
    atc_code: str | None


CATEGORIES: tuple[Category, ...] = (
    Category(0, "Anesthetics", "N01"),
    Category(1, "Antiinfectives for systemic use", "J"),
    Category(2, "Antiparasitic products, insecticides and repellants", "P"),
    Category(3, "Dermatologicals", "D"),
    Category(4, "Musculo-skeletal system", "M"),
    Category(5, "Poison", None),
    Category(6, "Psychoanaleptics", "N06"),
    Category(7, "Psycholeptics", "N05"),
    Category(8, "Respiratory system", "R"),
    Category(9, "Sensory organs", "S"),
    Category(10, "Various", "V"),
)

NUM_CATEGORIES = len(CATEGORIES)

CATEGORY_NAMES: tuple[str, ...] = tuple(c.name for c in CATEGORIES)


def _lookup_key(name: str) -> str:
    # case-insensitive, whitespace runs collapsed
    return " ".join(name.split()).lower()


_BY_NAME = {_lookup_key(c.name): c for c in CATEGORIES}


def category_by_name(name: str) -> Category | None:
    """Resolve a category by name, tolerant of case and extra whitespace."""
    return _BY_NAME.get(_lookup_key(name))


def short_label(category: Category) -> str:
    """Compact axis label: the ATC code, or the name when there is none."""
    return category.atc_code if category.atc_code is not None else category.name
