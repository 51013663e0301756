"""Multi-class probabilistic classifier trained from scratch by gradient descent.

Architecture: a frozen feature stage (see features.py) feeding a trainable
head. With hidden_size H > 0 the head is a one-hidden-layer ReLU network,
with H = 0 it is plain softmax regression. Training is mini-batch SGD on
mean cross-entropy with L2 weight decay on the weight matrices (biases are
not regularized, so an uninformative-feature model can recover the exact
empirical class prior).

Numerical conventions, fixed for reproducibility:

* softmax uses max-subtraction and a 1e-15 probability floor with
  renormalization, so every class probability is strictly inside (0, 1)
  even when exponentials underflow;
* cross-entropy clamps the log argument at 1e-300;
* all randomness (init, epoch shuffling) comes from the named splitmix64
  generator seeded by TrainConfig.seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .categories import CATEGORY_NAMES, NUM_CATEGORIES
from .corpus import Dataset, Recipe
from .errors import DegenerateDataset, ShapeMismatch
from .features import Featurizer, TokenizerConfig, featurize, tokenize
from .rng import RNG_NAME, SplitMix64

MODEL_VERSION = "potionlab-model-v1"

_PROB_FLOOR = 1e-15
_LOG_CLAMP = 1e-300


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.05
    epochs: int = 200
    batch_size: int = 8
    l2: float = 1e-4
    seed: int = 0
    hidden_size: int = 32

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.l2 < 0:
            raise ValueError("l2 must be non-negative")
        if self.hidden_size < 0:
            raise ValueError("hidden_size must be >= 0")


@dataclass(frozen=True)
class Prediction:
    probs: np.ndarray
    top_index: int
    top_prob: float


@dataclass
class ModelParams:
    """Trainable tensors plus everything needed to reproduce predictions."""

    W1: np.ndarray  # (H, F); H may be 0
    b1: np.ndarray  # (H,)
    W2: np.ndarray  # (11, H) or (11, F) when H == 0
    b2: np.ndarray  # (11,)
    tokenizer: TokenizerConfig
    featurizer: Featurizer
    categories: tuple[str, ...] = CATEGORY_NAMES
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def hidden_size(self) -> int:
        return self.W1.shape[0]


def _check_shapes(p: ModelParams) -> None:
    h = p.W1.shape[0]
    f = p.featurizer.dim
    if p.W1.shape != (h, f) or p.b1.shape != (h,):
        raise ShapeMismatch(f"hidden layer shapes {p.W1.shape}/{p.b1.shape} "
                            f"inconsistent with F={f}")
    expected_in = h if h > 0 else f
    if p.W2.shape != (NUM_CATEGORIES, expected_in) or p.b2.shape != (NUM_CATEGORIES,):
        raise ShapeMismatch(f"output layer shapes {p.W2.shape}/{p.b2.shape} "
                            f"inconsistent with input width {expected_in}")


def softmax(logits: np.ndarray) -> np.ndarray:
    """Stable softmax with a floor keeping every entry strictly in (0, 1)."""
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    p = e / e.sum(axis=-1, keepdims=True)
    p = np.maximum(p, _PROB_FLOOR)
    return p / p.sum(axis=-1, keepdims=True)


def forward(x: np.ndarray, p: ModelParams) -> Prediction:
    """Class probabilities for one feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (p.featurizer.dim,):
        raise ShapeMismatch(f"feature vector shape {x.shape}, expected "
                            f"({p.featurizer.dim},)")
    _check_shapes(p)
    h = np.maximum(p.W1 @ x + p.b1, 0.0) if p.hidden_size > 0 else x
    probs = softmax(p.W2 @ h + p.b2)
    top = int(np.argmax(probs))  # argmax ties break toward the lowest id
    return Prediction(probs=probs, top_index=top, top_prob=float(probs[top]))


def loss_and_grad(batch: list[tuple[np.ndarray, int]], p: ModelParams,
                  l2: float) -> tuple[float, dict[str, np.ndarray]]:
    """Mean cross-entropy + (l2/2)*||W||^2 and its exact analytic gradients.

    Gradients cover W1, b1, W2, b2; the feature stage is frozen. Biases are
    excluded from the L2 term.
    """
    if not batch:
        raise ValueError("batch must be non-empty")
    _check_shapes(p)
    n = len(batch)
    X = np.stack([np.asarray(x, dtype=np.float64) for x, _ in batch])
    y = np.array([label for _, label in batch], dtype=np.intp)
    if y.min() < 0 or y.max() >= NUM_CATEGORIES:
        raise ValueError("labels must lie in 0..10")

    if p.hidden_size > 0:
        pre = X @ p.W1.T + p.b1
        hidden = np.maximum(pre, 0.0)
    else:
        pre = None
        hidden = X
    probs = softmax(hidden @ p.W2.T + p.b2)

    data_loss = float(-np.mean(np.log(np.maximum(probs[np.arange(n), y], _LOG_CLAMP))))
    reg_loss = 0.5 * l2 * (float(np.sum(p.W1 ** 2)) + float(np.sum(p.W2 ** 2)))

    dlogits = probs.copy()
    dlogits[np.arange(n), y] -= 1.0
    dlogits /= n
    grads = {
        "W2": dlogits.T @ hidden + l2 * p.W2,
        "b2": dlogits.sum(axis=0),
    }
    if p.hidden_size > 0:
        dhidden = dlogits @ p.W2
        dpre = dhidden * (pre > 0.0)
        grads["W1"] = dpre.T @ X + l2 * p.W1
        grads["b1"] = dpre.sum(axis=0)
    else:
        grads["W1"] = np.zeros_like(p.W1)
        grads["b1"] = np.zeros_like(p.b1)
    return data_loss + reg_loss, grads


def _init_params(f: Featurizer, cfg: TrainConfig, rng: SplitMix64) -> ModelParams:
    # uniform +-1/sqrt(fan_in) weights, zero biases; draw order: W1 then W2
    def uniform_matrix(rows: int, cols: int, fan_in: int) -> np.ndarray:
        scale = 1.0 / np.sqrt(fan_in) if fan_in > 0 else 0.0
        return np.array([[(2.0 * rng.uniform() - 1.0) * scale for _ in range(cols)]
                         for _ in range(rows)], dtype=np.float64).reshape(rows, cols)

    h, fdim = cfg.hidden_size, f.dim
    W1 = uniform_matrix(h, fdim, fdim)
    b1 = np.zeros(h, dtype=np.float64)
    W2 = uniform_matrix(NUM_CATEGORIES, h if h > 0 else fdim, h if h > 0 else fdim)
    b2 = np.zeros(NUM_CATEGORIES, dtype=np.float64)
    return ModelParams(W1=W1, b1=b1, W2=W2, b2=b2,
                       tokenizer=TokenizerConfig(), featurizer=f)


def train(dataset: Dataset, f: Featurizer, cfg: TrainConfig,
          tokenizer: TokenizerConfig | None = None) -> ModelParams:
    """Mini-batch SGD over the featurized dataset; deterministic per seed."""
    labeled = [r for r in dataset.recipes if r.label is not None]
    if not labeled:
        raise DegenerateDataset("no labeled recipes to train on")
    tokenizer = tokenizer or TokenizerConfig()

    X = np.stack([featurize(tokenize(r.raw_text, tokenizer), f) for r in labeled])
    y = [r.label for r in labeled]

    rng = SplitMix64(cfg.seed)
    params = _init_params(f, cfg, rng)
    params.tokenizer = tokenizer

    n = len(labeled)
    order = list(range(n))
    for _ in range(cfg.epochs):
        rng.shuffle(order)
        for start in range(0, n, cfg.batch_size):
            batch = [(X[i], y[i]) for i in order[start:start + cfg.batch_size]]
            _, grads = loss_and_grad(batch, params, cfg.l2)
            params.W1 -= cfg.learning_rate * grads["W1"]
            params.b1 -= cfg.learning_rate * grads["b1"]
            params.W2 -= cfg.learning_rate * grads["W2"]
            params.b2 -= cfg.learning_rate * grads["b2"]

    final_loss, _ = loss_and_grad([(X[i], y[i]) for i in range(n)], params, cfg.l2)
    params.meta = {
        "version": MODEL_VERSION,
        "rng": RNG_NAME,
        "train_config": {
            "learning_rate": cfg.learning_rate,
            "epochs": cfg.epochs,
            "batch_size": cfg.batch_size,
            "l2": cfg.l2,
            "seed": cfg.seed,
            "hidden_size": cfg.hidden_size,
        },
        "final_loss": final_loss,
        "num_training_recipes": n,
    }
    return params


def predict(model: ModelParams, recipe: Recipe) -> Prediction:
    """Tokenize, featurize and run the head using the model's stored configs."""
    tokens = tokenize(recipe.raw_text, model.tokenizer)
    return forward(featurize(tokens, model.featurizer), model)


def evaluate_holdout(model: ModelParams, held: Dataset) -> float:
    """Fraction of held-out recipes whose top prediction equals their label."""
    labeled = [r for r in held.recipes if r.label is not None]
    if not labeled:
        raise ValueError("held-out dataset must be non-empty")
    hits = sum(1 for r in labeled if predict(model, r).top_index == r.label)
    return hits / len(labeled)
