"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest -s tests/test_acceptance.py`` to see them).

The scale criteria run the real thing: a default-configuration training run
on the canonical 72-recipe corpus, 10,000 generated recipes, and two full
CLI pipeline executions compared byte for byte.
"""

from __future__ import annotations

import time

import numpy as np
import pytest
from click.testing import CliRunner

from potionlab.categories import CATEGORIES
from potionlab.cli import main as cli_main
from potionlab.corpus import FragmentKind, build_pool, normalize_text, parse_corpus
from potionlab.features import EMBEDDING_TABLE, Featurizer
from potionlab.generator import GeneratorConfig, generate
from potionlab.model import TrainConfig, evaluate_holdout, predict, train
from potionlab.report import classify_batch, histogram, tally

from .conftest import dataset_of, plain_recipe
from .test_model import make_params, max_rel_err, numeric_grads

TABLE_COUNTS = [2, 4, 2, 8, 12, 11, 21, 2, 1, 1, 8]


def check(name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {status}: {name}{suffix}")
    assert ok, f"{name}{suffix}"


@pytest.fixture(scope="module")
def products(corpus_path):
    """Default-configuration run shared by the scale criteria."""
    dataset = parse_corpus(corpus_path)
    pool = build_pool(dataset)
    model = train(dataset, Featurizer(), TrainConfig())

    t0 = time.perf_counter()
    recipes = generate(pool, dataset, GeneratorConfig(seed=0, count=10_000))
    generate_seconds = time.perf_counter() - t0

    predictions = classify_batch(model, recipes)
    return {
        "dataset": dataset,
        "model": model,
        "recipes": recipes,
        "predictions": predictions,
        "generate_seconds": generate_seconds,
    }


@pytest.fixture(scope="module")
def pipeline_runs(corpus_path, tmp_path_factory):
    """Two identically-seeded CLI pipeline runs, first one timed."""
    runner = CliRunner()
    dirs = [tmp_path_factory.mktemp(f"pipeline_{tag}") / "run" for tag in "ab"]
    elapsed = []
    for out in dirs:
        args = ["pipeline", str(corpus_path), "-o", str(out),
                "--train-seed", "0", "--gen-seed", "0"]
        t0 = time.perf_counter()
        result = runner.invoke(cli_main, args,
                               env={"SOURCE_DATE_EPOCH": "1700000000"})
        elapsed.append(time.perf_counter() - t0)
        assert result.exit_code == 0, result.output
    return dirs[0], dirs[1], elapsed[0]


def test_corpus_fidelity(corpus_path):
    """Canonical corpus parses to the exact per-category counts, total 72."""
    dataset = parse_corpus(corpus_path)
    ok = (list(dataset.counts_per_category) == TABLE_COUNTS
          and len(dataset.recipes) == 72)
    check("corpus fidelity", ok, f"counts={list(dataset.counts_per_category)}")


def test_generation_scale_and_novelty(products):
    """10,000 recipes in under 10 s, none matching a training recipe."""
    recipes = products["recipes"]
    known = {normalize_text(r.raw_text) for r in products["dataset"].recipes}
    collisions = sum(1 for r in recipes if normalize_text(r.raw_text) in known)
    seconds = products["generate_seconds"]
    ok = len(recipes) == 10_000 and collisions == 0 and seconds < 10.0
    check("generation scale and novelty", ok,
          f"{len(recipes)} recipes, {collisions} collisions, {seconds:.2f}s")


def test_fragment_bound(products):
    """Every generated recipe holds 3 to 8 ingredient fragments."""
    bad = 0
    for r in products["recipes"]:
        n_ing = sum(f.kind == FragmentKind.INGREDIENT_ADDITION for f in r.fragments)
        if not 3 <= n_ing <= 8:
            bad += 1
    check("fragment bound", bad == 0, f"{bad} out-of-range recipes")


def test_gradient_oracle():
    """Analytic gradients vs central differences (1e-5): rel err < 1e-4
    over 100 random tiny-model points, in under 5 s."""
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    for point in range(100):
        params = make_params(f_dim=7, hidden=3 if point % 2 == 0 else 0, rng=rng)
        batch = [(rng.uniform(-1, 1, 7), int(rng.integers(11))) for _ in range(4)]
        l2 = 0.0 if point % 3 == 0 else 1e-3
        from potionlab.model import loss_and_grad

        _, analytic = loss_and_grad(batch, params, l2)
        worst = max(worst, max_rel_err(analytic, numeric_grads(batch, params, l2)))
    seconds = time.perf_counter() - t0
    ok = worst < 1e-4 and seconds < 5.0
    check("gradient oracle", ok, f"max rel err {worst:.2e}, {seconds:.2f}s")


def test_probability_laws(products):
    """All 10,000 probability vectors sum to 1 within 1e-9 and sit strictly
    inside (0, 1); histogram and tally totals both equal 10,000."""
    predictions = products["predictions"]
    sums_ok = all(abs(p.probs.sum() - 1.0) < 1e-9 for p in predictions)
    open_ok = all(p.probs.min() > 0.0 and p.probs.max() < 1.0 for p in predictions)
    counts = tally(predictions)
    hist = histogram(predictions)
    totals_ok = counts.total == sum(hist.bin_counts) == 10_000
    check("probability laws", sums_ok and open_ok and totals_ok,
          f"sums_ok={sums_ok} open_ok={open_ok} totals={counts.total}")


def test_prior_recovery(corpus_path):
    """With uninformative (all-zero) features and no hidden layer, default
    training recovers the empirical label prior within 0.01 per class."""
    dataset = parse_corpus(corpus_path)
    ablation = Featurizer(mode=EMBEDDING_TABLE, dim=4, vocab=(),
                          table=np.zeros((0, 4)))
    model = train(dataset, ablation, TrainConfig(hidden_size=0))
    probs = predict(model, plain_recipe("probe", "any text")).probs
    priors = np.array(dataset.counts_per_category) / len(dataset.recipes)
    worst = float(np.abs(probs - priors).max())
    check("prior recovery", worst < 0.01, f"max deviation {worst:.4f}")


def test_modal_class_matches_training(products):
    """The most-predicted category over 10,000 generated recipes equals the
    most-frequent training category (Psychoanaleptics)."""
    counts = tally(products["predictions"])
    modal_predicted = max(range(11), key=lambda c: counts.counts[c])
    modal_training = max(range(11),
                         key=lambda c: products["dataset"].counts_per_category[c])
    ok = modal_predicted == modal_training == 6
    check("modal class", ok,
          f"predicted={CATEGORIES[modal_predicted].name} "
          f"n={counts.counts[modal_predicted]}")


def test_separable_toy_convergence():
    """100% training accuracy on a linearly separable 2-class corpus within
    the default epoch budget, in under 5 s."""
    toy = dataset_of(
        [("alpha", 3), ("alpha beta", 3), ("beta", 3), ("beta alpha", 3),
         ("gamma", 7), ("gamma delta", 7), ("delta", 7), ("delta gamma", 7)])
    t0 = time.perf_counter()
    model = train(toy, Featurizer(dim=64), TrainConfig(seed=1))
    accuracy = evaluate_holdout(model, toy)
    seconds = time.perf_counter() - t0
    ok = accuracy == 1.0 and seconds < 5.0
    check("separable-toy convergence", ok,
          f"accuracy {accuracy:.3f}, {seconds:.2f}s")


def test_pipeline_determinism(pipeline_runs):
    """Two identically-seeded pipeline runs write byte-identical artifact
    directories (model, recipes, CSV/SVG/PNG reports, manifest)."""
    dir_a, dir_b, _ = pipeline_runs
    names_a = sorted(p.name for p in dir_a.iterdir())
    names_b = sorted(p.name for p in dir_b.iterdir())
    same_names = names_a == names_b
    differing = [n for n in names_a
                 if (dir_a / n).read_bytes() != (dir_b / n).read_bytes()]
    check("pipeline determinism", same_names and not differing,
          f"{len(names_a)} files, differing={differing}")


def test_end_to_end_runtime(pipeline_runs):
    """A full single-threaded pipeline run finishes in under 60 s."""
    _, _, seconds = pipeline_runs
    check("end-to-end runtime", seconds < 60.0, f"{seconds:.1f}s")
