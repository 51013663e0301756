"""Recipe corpus parsing, text normalization and fragment segmentation.

Corpus file format: UTF-8 JSON Lines, one object per line with string fields
``id``, ``category`` and ``text``. ``category`` must be one of the 11 fixed
category names (case-insensitive, whitespace collapsed). Generated recipe
files use the same format with ``category`` omitted.

A recipe's text is segmented into sentence fragments. Each fragment is typed
by its leading verb against a versioned lexicon file that lists ingredient
verbs and mixing verbs, one word per line under ``[ingredient]`` and
``[mixing]`` section headers.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

from .categories import NUM_CATEGORIES, category_by_name
from .errors import (
    DuplicateId,
    EmptyCorpus,
    EmptyPool,
    MalformedRecord,
    NoFragments,
    UnknownCategory,
)

DEFAULT_LEXICON_RESOURCE = "lexicon_v1.txt"

_WS_RE = re.compile(r"\s+")
# run of sentence-end punctuation, glued to the preceding word
_SENT_END_RE = re.compile(r"\s*[.!;]+(?=\s|$)")
# boundary: sentence punctuation, whitespace, then an uppercase letter
_SPLIT_RE = re.compile(r"(?<=[.!;])\s+(?=[A-Z])")
_WORD_RE = re.compile(r"[^\W\d_]+", re.UNICODE)


class FragmentKind(Enum):
    INGREDIENT_ADDITION = "ingredient_addition"
    MIXING_INSTRUCTION = "mixing_instruction"
    OTHER = "other"


@dataclass(frozen=True)
class Fragment:
    """One instruction sentence, trimmed, with its lexicon-assigned kind."""

    text: str
    kind: FragmentKind


@dataclass(frozen=True)
class Recipe:
    id: str
    raw_text: str
    fragments: tuple[Fragment, ...]
    label: int | None = None


@dataclass(frozen=True)
class Dataset:
    recipes: tuple[Recipe, ...]
    counts_per_category: tuple[int, ...]

    @classmethod
    def from_recipes(cls, recipes: tuple[Recipe, ...] | list[Recipe]) -> "Dataset":
        counts = [0] * NUM_CATEGORIES
        for r in recipes:
            if r.label is not None:
                counts[r.label] += 1
        return cls(recipes=tuple(recipes), counts_per_category=tuple(counts))


@dataclass(frozen=True)
class FragmentPool:
    """Deduplicated, sorted fragment lists the generator samples from."""

    ingredients: tuple[Fragment, ...]
    mixings: tuple[Fragment, ...]


@dataclass(frozen=True)
class VerbLexicon:
    version: str
    ingredient_verbs: frozenset[str]
    mixing_verbs: frozenset[str]


def normalize_text(s: str) -> str:
    """Canonical form used for novelty and dedup comparisons.

    Lowercases, collapses whitespace runs to single spaces, strips the ends,
    rewrites internal sentence-end punctuation runs (``.``, ``!``, ``;``) to a
    single period and drops the trailing one.
    """
    s = _WS_RE.sub(" ", s.lower()).strip()
    s = _SENT_END_RE.sub(".", s)
    if s.endswith("."):
        s = s[:-1]
    return s


def load_lexicon(path: str | Path) -> VerbLexicon:
    """Read a ``[ingredient]`` / ``[mixing]`` verb lexicon file."""
    text = Path(path).read_text(encoding="utf-8")
    version = Path(path).stem
    return _parse_lexicon(text, version)


def default_lexicon() -> VerbLexicon:
    """The lexicon shipped with the package."""
    text = (resources.files("potionlab") / "data" / DEFAULT_LEXICON_RESOURCE).read_text(
        encoding="utf-8")
    return _parse_lexicon(text, Path(DEFAULT_LEXICON_RESOURCE).stem)


def _parse_lexicon(text: str, version: str) -> VerbLexicon:
    sections: dict[str, set[str]] = {"ingredient": set(), "mixing": set()}
    current: set[str] | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip().lower()
            if name not in sections:
                raise ValueError(f"unknown lexicon section {name!r}")
            current = sections[name]
            continue
        if current is None:
            raise ValueError(f"lexicon entry {line!r} outside any section")
        current.add(line.lower())
    return VerbLexicon(
        version=version,
        ingredient_verbs=frozenset(sections["ingredient"]),
        mixing_verbs=frozenset(sections["mixing"]),
    )


def segment_recipe(raw_text: str, lexicon: VerbLexicon | None = None) -> tuple[Fragment, ...]:
    """Split recipe text into typed sentence fragments, order preserved.

    Sentences end at ``.``, ``!`` or ``;`` followed by whitespace and an
    uppercase letter, or at end of text. The kind comes from the sentence's
    leading verb: ingredient verbs (add, pour, ...) mark an ingredient
    addition, mixing verbs (stir, heat, ...) a mixing instruction, anything
    else is Other. Raises NoFragments when no sentence has word content.
    """
    if lexicon is None:
        lexicon = default_lexicon()
    fragments = []
    for piece in _SPLIT_RE.split(raw_text.strip()):
        text = _WS_RE.sub(" ", piece).strip()
        if not text or not _WORD_RE.search(text):
            continue
        first_word = _WORD_RE.search(text).group(0).lower()
        if first_word in lexicon.ingredient_verbs:
            kind = FragmentKind.INGREDIENT_ADDITION
        elif first_word in lexicon.mixing_verbs:
            kind = FragmentKind.MIXING_INSTRUCTION
        else:
            kind = FragmentKind.OTHER
        fragments.append(Fragment(text=text, kind=kind))
    if not fragments:
        raise NoFragments(f"no sentence content in {raw_text!r}")
    return tuple(fragments)


def parse_corpus(path: str | Path, lexicon: VerbLexicon | None = None) -> Dataset:
    """Parse and validate a labeled corpus file into a Dataset.

    Record order is preserved. Rejects malformed lines, unknown categories
    and duplicate ids with errors naming the offending line.
    """
    if lexicon is None:
        lexicon = default_lexicon()
    path = Path(path)
    recipes: list[Recipe] = []
    seen_ids: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            recipes.append(_parse_record(line, line_no, seen_ids, lexicon))
    if not recipes:
        raise EmptyCorpus(str(path))
    return Dataset.from_recipes(recipes)


def _parse_record(line: str, line_no: int, seen_ids: set[str],
                  lexicon: VerbLexicon) -> Recipe:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(line_no, f"invalid JSON ({exc.msg})") from exc
    if not isinstance(obj, dict):
        raise MalformedRecord(line_no, "record is not an object")
    for field in ("id", "category", "text"):
        if field not in obj:
            raise MalformedRecord(line_no, f"missing field {field!r}")
        if not isinstance(obj[field], str) or not obj[field].strip():
            raise MalformedRecord(line_no, f"field {field!r} must be a non-empty string")

    recipe_id = obj["id"]
    if recipe_id in seen_ids:
        raise DuplicateId(recipe_id, line_no)
    seen_ids.add(recipe_id)

    category = category_by_name(obj["category"])
    if category is None:
        raise UnknownCategory(obj["category"], line_no)

    try:
        fragments = segment_recipe(obj["text"], lexicon)
    except NoFragments as exc:
        raise MalformedRecord(line_no, "text has no sentence content") from exc
    return Recipe(id=recipe_id, raw_text=obj["text"], fragments=fragments,
                  label=category.id)


def build_pool(dataset: Dataset) -> FragmentPool:
    """Union of ingredient and mixing fragments across all recipes.

    Deduplicated by normalized text (first occurrence wins) and sorted
    lexicographically by normalized text, so the pool is identical for any
    permutation of the input recipes.
    """
    buckets: dict[FragmentKind, dict[str, Fragment]] = {
        FragmentKind.INGREDIENT_ADDITION: {},
        FragmentKind.MIXING_INSTRUCTION: {},
    }
    for recipe in dataset.recipes:
        for fragment in recipe.fragments:
            bucket = buckets.get(fragment.kind)
            if bucket is None:
                continue
            bucket.setdefault(normalize_text(fragment.text), fragment)

    ingredients = buckets[FragmentKind.INGREDIENT_ADDITION]
    mixings = buckets[FragmentKind.MIXING_INSTRUCTION]
    if not ingredients:
        raise EmptyPool("ingredient")
    if not mixings:
        raise EmptyPool("mixing")
    return FragmentPool(
        ingredients=tuple(ingredients[k] for k in sorted(ingredients)),
        mixings=tuple(mixings[k] for k in sorted(mixings)),
    )


def write_records(recipes: list[Recipe] | tuple[Recipe, ...], path: str | Path) -> None:
    """Write recipes in the corpus record format (category omitted if unlabeled)."""
    from .categories import CATEGORIES

    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for r in recipes:
            obj: dict[str, str] = {"id": r.id}
            if r.label is not None:
                obj["category"] = CATEGORIES[r.label].name
            obj["text"] = r.raw_text
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def read_unlabeled_records(path: str | Path,
                           lexicon: VerbLexicon | None = None) -> list[Recipe]:
    """Read a generated-recipe file (records without a category field)."""
    if lexicon is None:
        lexicon = default_lexicon()
    path = Path(path)
    recipes: list[Recipe] = []
    seen_ids: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(line_no, f"invalid JSON ({exc.msg})") from exc
            if (not isinstance(obj, dict)
                    or not isinstance(obj.get("id"), str) or not obj["id"].strip()
                    or not isinstance(obj.get("text"), str) or not obj["text"].strip()):
                raise MalformedRecord(line_no, "record needs string fields 'id' and 'text'")
            if obj["id"] in seen_ids:
                raise DuplicateId(obj["id"], line_no)
            seen_ids.add(obj["id"])
            fragments = segment_recipe(obj["text"], lexicon)
            recipes.append(Recipe(id=obj["id"], raw_text=obj["text"],
                                  fragments=fragments, label=None))
    return recipes
