"""Model file container: round-trips and corruption handling."""

from __future__ import annotations

import numpy as np
import pytest

from potionlab.errors import CorruptModel, VersionMismatch
from potionlab.features import EMBEDDING_TABLE, Featurizer, TokenizerConfig
from potionlab.model import ModelParams, TrainConfig, train
from potionlab.model_io import MAGIC, load_model, save_model

from .conftest import dataset_of

TOY = dataset_of([("alpha", 3), ("beta", 3), ("gamma", 7), ("delta", 7)])


@pytest.fixture()
def trained_model():
    return train(TOY, Featurizer(dim=32), TrainConfig(seed=5, epochs=10))


def assert_models_equal(a: ModelParams, b: ModelParams):
    for name in ("W1", "b1", "W2", "b2"):
        np.testing.assert_array_equal(getattr(a, name), getattr(b, name))
        assert getattr(a, name).tobytes() == getattr(b, name).tobytes()
    assert a.tokenizer == b.tokenizer
    assert a.featurizer.mode == b.featurizer.mode
    assert a.featurizer.dim == b.featurizer.dim
    assert a.featurizer.vocab == b.featurizer.vocab
    assert a.categories == b.categories
    assert a.meta == b.meta


class TestRoundTrip:
    def test_trained_model(self, trained_model, tmp_path):
        path = tmp_path / "m.potion"
        save_model(trained_model, path)
        assert_models_equal(load_model(path), trained_model)

    def test_saving_twice_is_byte_identical(self, trained_model, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        save_model(trained_model, a)
        save_model(trained_model, b)
        assert a.read_bytes() == b.read_bytes()

    def test_random_model_exact_floats(self, tmp_path):
        rng = np.random.default_rng(3)
        model = ModelParams(W1=rng.standard_normal((4, 16)),
                            b1=rng.standard_normal(4),
                            W2=rng.standard_normal((11, 4)),
                            b2=rng.standard_normal(11),
                            tokenizer=TokenizerConfig(ngram_orders=(1,)),
                            featurizer=Featurizer(dim=16),
                            meta={"final_loss": 0.1234567890123456789})
        path = tmp_path / "m.potion"
        save_model(model, path)
        assert_models_equal(load_model(path), model)

    def test_embedding_model_round_trip(self, tmp_path):
        featurizer = Featurizer(mode=EMBEDDING_TABLE, dim=3,
                                vocab=("alpha", "beta"),
                                table=np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]))
        model = train(TOY, featurizer, TrainConfig(seed=1, epochs=3, hidden_size=0))
        path = tmp_path / "m.potion"
        save_model(model, path)
        loaded = load_model(path)
        assert_models_equal(loaded, model)
        np.testing.assert_array_equal(loaded.featurizer.table, featurizer.table)


class TestCorruption:
    def test_truncated_file(self, trained_model, tmp_path):
        path = tmp_path / "m.potion"
        save_model(trained_model, path)
        blob = path.read_bytes()
        for cut in (4, len(blob) // 2, len(blob) - 3):
            path.write_bytes(blob[:cut])
            with pytest.raises(CorruptModel):
                load_model(path)

    def test_bad_magic(self, trained_model, tmp_path):
        path = tmp_path / "m.potion"
        save_model(trained_model, path)
        blob = bytearray(path.read_bytes())
        blob[0] ^= 0xFF
        path.write_bytes(bytes(blob))
        with pytest.raises(CorruptModel):
            load_model(path)

    def test_version_tag_altered(self, trained_model, tmp_path):
        path = tmp_path / "m.potion"
        save_model(trained_model, path)
        blob = bytearray(path.read_bytes())
        blob[len(MAGIC)] += 1  # low byte of the little-endian version tag
        path.write_bytes(bytes(blob))
        with pytest.raises(VersionMismatch):
            load_model(path)

    def test_trailing_garbage(self, trained_model, tmp_path):
        path = tmp_path / "m.potion"
        save_model(trained_model, path)
        path.write_bytes(path.read_bytes() + b"extra")
        with pytest.raises(CorruptModel):
            load_model(path)

    def test_metadata_garbled(self, trained_model, tmp_path):
        path = tmp_path / "m.potion"
        save_model(trained_model, path)
        blob = bytearray(path.read_bytes())
        meta_off = len(MAGIC) + 2 + 4
        blob[meta_off] = 0xFF  # JSON no longer parses
        path.write_bytes(bytes(blob))
        with pytest.raises(CorruptModel):
            load_model(path)

    def test_non_finite_parameters_rejected(self, trained_model, tmp_path):
        import struct

        trained_model.b2[3] = np.nan
        with pytest.raises(ValueError):
            save_model(trained_model, tmp_path / "bad.potion")

        trained_model.b2[3] = 0.0
        path = tmp_path / "m.potion"
        save_model(trained_model, path)
        blob = bytearray(path.read_bytes())
        blob[-8:] = struct.pack("<d", float("nan"))  # b2 is the last tensor
        path.write_bytes(bytes(blob))
        with pytest.raises(CorruptModel):
            load_model(path)
