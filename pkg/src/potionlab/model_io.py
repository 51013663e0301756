"""Versioned binary model container.

Layout (all integers little-endian):

    8 bytes   magic b"POTIONML"
    u16       container format version (currently 1)
    u32       metadata length, then that many bytes of UTF-8 JSON
    u32       tensor count, then per tensor:
                  u16 name length + name bytes
                  u8 ndim, ndim * u64 shape
                  row-major float64 data

Parameters round-trip bit-identically; metadata floats survive via JSON's
shortest-round-trip float formatting. An embedding-table featurizer rides
along as an extra tensor so a saved model stays self-contained.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import CorruptModel, VersionMismatch
from .features import EMBEDDING_TABLE, Featurizer, TokenizerConfig
from .model import ModelParams

MAGIC = b"POTIONML"
FORMAT_VERSION = 1


def save_model(model: ModelParams, path: str | Path) -> None:
    meta = {
        "tokenizer": {
            "lowercase": model.tokenizer.lowercase,
            "ngram_orders": list(model.tokenizer.ngram_orders),
        },
        "featurizer": {
            "mode": model.featurizer.mode,
            "dim": model.featurizer.dim,
            "vocab": list(model.featurizer.vocab),
        },
        "categories": list(model.categories),
        "extra": model.meta,
    }
    tensors = [("W1", model.W1), ("b1", model.b1),
               ("W2", model.W2), ("b2", model.b2)]
    if model.featurizer.mode == EMBEDDING_TABLE:
        tensors.append(("embedding", model.featurizer.table))
    for name, tensor in tensors:
        if not np.isfinite(tensor).all():
            raise ValueError(f"refusing to save non-finite tensor {name!r}")

    blob = bytearray()
    blob += MAGIC
    blob += struct.pack("<H", FORMAT_VERSION)
    meta_bytes = json.dumps(meta, sort_keys=True, separators=(",", ":")).encode("utf-8")
    blob += struct.pack("<I", len(meta_bytes))
    blob += meta_bytes
    blob += struct.pack("<I", len(tensors))
    for name, tensor in tensors:
        arr = np.ascontiguousarray(tensor, dtype=np.float64)
        name_bytes = name.encode("utf-8")
        blob += struct.pack("<H", len(name_bytes))
        blob += name_bytes
        blob += struct.pack("<B", arr.ndim)
        blob += struct.pack(f"<{arr.ndim}Q", *arr.shape)
        blob += arr.astype("<f8").tobytes()
    Path(path).write_bytes(bytes(blob))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise CorruptModel("truncated file")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def load_model(path: str | Path) -> ModelParams:
    r = _Reader(Path(path).read_bytes())
    if r.take(len(MAGIC)) != MAGIC:
        raise CorruptModel("bad magic bytes")
    (version,) = r.unpack("<H")
    if version != FORMAT_VERSION:
        raise VersionMismatch(version, FORMAT_VERSION)
    (meta_len,) = r.unpack("<I")
    try:
        meta = json.loads(r.take(meta_len).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptModel(f"unreadable metadata ({exc})") from exc

    (count,) = r.unpack("<I")
    tensors: dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = r.unpack("<H")
        name = r.take(name_len).decode("utf-8")
        (ndim,) = r.unpack("<B")
        shape = r.unpack(f"<{ndim}Q")
        size = int(np.prod(shape, dtype=np.int64)) if ndim else 1
        data = np.frombuffer(r.take(size * 8), dtype="<f8")
        tensor = data.reshape(shape).astype(np.float64)
        if not np.isfinite(tensor).all():
            raise CorruptModel(f"non-finite values in tensor {name!r}")
        tensors[name] = tensor
    if r.pos != len(r.data):
        raise CorruptModel("trailing data after tensors")

    try:
        tok = meta["tokenizer"]
        feat = meta["featurizer"]
        tokenizer = TokenizerConfig(lowercase=bool(tok["lowercase"]),
                                    ngram_orders=tuple(tok["ngram_orders"]))
        if feat["mode"] == EMBEDDING_TABLE:
            featurizer = Featurizer(mode=feat["mode"], dim=int(feat["dim"]),
                                    vocab=tuple(feat["vocab"]),
                                    table=tensors.pop("embedding"))
        else:
            featurizer = Featurizer(mode=feat["mode"], dim=int(feat["dim"]))
        model = ModelParams(W1=tensors["W1"], b1=tensors["b1"],
                            W2=tensors["W2"], b2=tensors["b2"],
                            tokenizer=tokenizer, featurizer=featurizer,
                            categories=tuple(meta["categories"]),
                            meta=meta.get("extra", {}))
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"inconsistent metadata ({exc})") from exc
    return model
