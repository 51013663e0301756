"""Exception types raised across the pipeline.

Every domain error derives from PotionLabError so callers (notably the CLI)
can map failures onto the stable exit-code contract: 2 for input/validation
problems, 3 for domain degeneracy, 4 for anything unexpected.
"""

from __future__ import annotations


class PotionLabError(Exception):
    """Base class for all potionlab domain errors."""


# --- corpus parsing and segmentation ---------------------------------------

class CorpusError(PotionLabError):
    """Invalid corpus input (file contents, records, labels)."""


class MalformedRecord(CorpusError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class UnknownCategory(CorpusError):
    def __init__(self, name: str, line_no: int | None = None):
        where = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{where}unknown category {name!r}")
        self.name = name
        self.line_no = line_no


class DuplicateId(CorpusError):
    def __init__(self, recipe_id: str, line_no: int | None = None):
        where = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{where}duplicate recipe id {recipe_id!r}")
        self.recipe_id = recipe_id
        self.line_no = line_no


class EmptyCorpus(CorpusError):
    def __init__(self, path: str = ""):
        super().__init__(f"corpus contains no records: {path}" if path else
                         "corpus contains no records")


class NoFragments(CorpusError):
    """Recipe text contained no sentence content to segment."""


class EmptyPool(PotionLabError):
    """A fragment pool side (ingredients or mixings) came out empty."""

    def __init__(self, kind: str):
        super().__init__(f"fragment pool has no {kind} fragments")
        self.kind = kind


# --- generation -------------------------------------------------------------

class GeneratorError(PotionLabError):
    """Recipe generation cannot proceed."""


class PoolTooSmall(GeneratorError):
    """Pool cannot supply the configured number of distinct fragments."""


class ExhaustedRetries(GeneratorError):
    def __init__(self, limit: int, index: int):
        super().__init__(
            f"no novel recipe found for index {index} within {limit} retries "
            "(degenerate pool)")
        self.limit = limit
        self.index = index


# --- classifier -------------------------------------------------------------

class ModelError(PotionLabError):
    """Invalid model state or model file."""


class ShapeMismatch(ModelError):
    """Parameter or feature shapes are inconsistent."""


class DegenerateDataset(ModelError):
    """Training dataset has no usable recipes."""


class VersionMismatch(ModelError):
    def __init__(self, found: object, expected: object):
        super().__init__(f"model format version {found!r}, expected {expected!r}")
        self.found = found
        self.expected = expected


class CorruptModel(ModelError):
    def __init__(self, reason: str):
        super().__init__(f"corrupt model file: {reason}")
        self.reason = reason
