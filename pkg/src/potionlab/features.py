"""Tokenization and the frozen feature stage of the classifier.

Two featurizer modes share one contract (a fixed-width float vector per
token list):

* ``hashed_ngrams``: vocabulary-free signed feature hashing. Each token is
  hashed with FNV-1a 64 into one of ``dim`` buckets, the hash's top bit
  picks the sign, and the vector is L2-normalized when nonzero. Keeps model
  files self-contained.
* ``embedding_table``: a fixed, non-trainable vector table loaded from file;
  features are the mean of in-vocabulary token vectors (zero vector when no
  token is known). The table stays frozen during training, so only the
  classification head learns.

Embedding table file format: a header line ``<vocab_size> <dim>`` followed
by one line per token: the token, then ``dim`` numbers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import CorruptModel

HASH_NAME = "fnv1a64"

HASHED_NGRAMS = "hashed_ngrams"
EMBEDDING_TABLE = "embedding_table"

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    ngram_orders: tuple[int, ...] = (1, 2)

    def __post_init__(self):
        if not self.ngram_orders or any(n < 1 for n in self.ngram_orders):
            raise ValueError(f"ngram_orders must be non-empty, all >= 1: "
                             f"{self.ngram_orders}")
        object.__setattr__(self, "ngram_orders", tuple(sorted(set(self.ngram_orders))))


def tokenize(text: str, cfg: TokenizerConfig) -> list[str]:
    """Maximal letter/digit runs, plus n-grams joined with underscores."""
    if cfg.lowercase:
        text = text.lower()
    base = _TOKEN_RE.findall(text)
    tokens: list[str] = []
    for order in cfg.ngram_orders:
        if order == 1:
            tokens.extend(base)
        else:
            tokens.extend("_".join(base[i:i + order])
                          for i in range(len(base) - order + 1))
    return tokens


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash of a byte string."""
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return h


@lru_cache(maxsize=1 << 16)
def _token_hash(token: str) -> int:
    # tokens repeat heavily across recipes; cache the hot path
    return fnv1a64(token.encode("utf-8"))


@dataclass(frozen=True)
class Featurizer:
    """Frozen feature stage: mode, width, and (for embeddings) the table."""

    mode: str = HASHED_NGRAMS
    dim: int = 1024
    vocab: tuple[str, ...] = ()
    table: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.mode not in (HASHED_NGRAMS, EMBEDDING_TABLE):
            raise ValueError(f"unknown featurizer mode {self.mode!r}")
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if self.mode == EMBEDDING_TABLE:
            if self.table is None or len(self.vocab) != self.table.shape[0]:
                raise ValueError("embedding_table mode needs a vocab-aligned table")
            if self.table.shape[1] != self.dim:
                raise ValueError(f"table width {self.table.shape[1]} != dim {self.dim}")
        object.__setattr__(self, "_index",
                           {t: i for i, t in enumerate(self.vocab)})


def featurize(tokens: list[str], f: Featurizer) -> np.ndarray:
    """Fixed-width float64 feature vector for a token list."""
    x = np.zeros(f.dim, dtype=np.float64)
    if f.mode == HASHED_NGRAMS:
        for token in tokens:
            h = _token_hash(token)
            sign = -1.0 if (h >> 63) & 1 else 1.0
            x[h % f.dim] += sign
        norm = np.linalg.norm(x)
        if norm > 0.0:
            x /= norm
        return x
    index = f._index  # type: ignore[attr-defined]
    rows = [index[t] for t in tokens if t in index]
    if rows:
        x = f.table[rows].mean(axis=0)
    return x


def load_embedding_table(path: str | Path) -> Featurizer:
    """Read an embedding table file into an embedding_table featurizer."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise CorruptModel("empty embedding table file")
    header = lines[0].split()
    if len(header) != 2:
        raise CorruptModel("embedding table header must be '<vocab_size> <dim>'")
    try:
        vocab_size, dim = int(header[0]), int(header[1])
    except ValueError as exc:
        raise CorruptModel("non-integer embedding table header") from exc
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != vocab_size:
        raise CorruptModel(f"expected {vocab_size} vocabulary rows, found {len(body)}")
    vocab: list[str] = []
    table = np.zeros((vocab_size, dim), dtype=np.float64)
    for row, line in enumerate(body):
        parts = line.split()
        if len(parts) != dim + 1:
            raise CorruptModel(f"row {row + 2}: expected token + {dim} numbers")
        vocab.append(parts[0])
        try:
            table[row] = [float(p) for p in parts[1:]]
        except ValueError as exc:
            raise CorruptModel(f"row {row + 2}: non-numeric vector entry") from exc
    return Featurizer(mode=EMBEDDING_TABLE, dim=dim, vocab=tuple(vocab), table=table)


def write_embedding_table(f: Featurizer, path: str | Path) -> None:
    """Write an embedding_table featurizer back to the file format."""
    if f.mode != EMBEDDING_TABLE:
        raise ValueError("only embedding_table featurizers have a table file form")
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(f.vocab)} {f.dim}\n")
        for token, row in zip(f.vocab, f.table):
            fh.write(token + " " + " ".join(repr(float(v)) for v in row) + "\n")
