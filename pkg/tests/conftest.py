"""Shared fixtures: the packaged canonical corpus and toy-corpus builders."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import pytest

from potionlab.corpus import Dataset, Fragment, FragmentKind, Recipe, build_pool, parse_corpus

GOLDEN_DIR = Path(__file__).parent / "golden"
DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def corpus_path() -> Path:
    return Path(str(resources.files("potionlab") / "data" / "corpus.jsonl"))


@pytest.fixture(scope="session")
def canonical_dataset(corpus_path):
    return parse_corpus(corpus_path)


@pytest.fixture(scope="session")
def canonical_pool(canonical_dataset):
    return build_pool(canonical_dataset)


def write_corpus(path: Path, records: list[dict]) -> Path:
    path.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records),
                    encoding="utf-8")
    return path


def plain_recipe(recipe_id: str, text: str, label: int | None = None) -> Recipe:
    """Recipe with a single Other fragment; enough for generator/model tests."""
    return Recipe(id=recipe_id, raw_text=text,
                  fragments=(Fragment(text=text, kind=FragmentKind.OTHER),),
                  label=label)


def dataset_of(texts_and_labels: list[tuple[str, int]]) -> Dataset:
    recipes = [plain_recipe(f"r{i}", text, label)
               for i, (text, label) in enumerate(texts_and_labels)]
    return Dataset.from_recipes(recipes)
