"""Command-line pipeline: ingest, train, generate, classify, pipeline.

Exit codes are a stable scripting contract: 0 success, 2 input/validation
error, 3 domain degeneracy (empty pools, exhausted novelty retries,
degenerate training data), 4 internal error.

Options may also come from a JSON config file (--config); precedence is
flags > config file > built-in defaults. All randomness flows from the two
seeds --train-seed and --gen-seed. POTIONLAB_OUT_DIR sets the default
output directory. Timestamps in the pipeline manifest honor
SOURCE_DATE_EPOCH for byte-reproducible runs.
"""

from __future__ import annotations

import datetime as _dt
import functools
import hashlib
import json
import os
import sys
from pathlib import Path

import click

from ._version import __version__
from .categories import CATEGORIES
from .corpus import (
    Dataset,
    build_pool,
    default_lexicon,
    load_lexicon,
    parse_corpus,
    read_unlabeled_records,
    write_records,
)
from .errors import (
    CorpusError,
    CorruptModel,
    DegenerateDataset,
    EmptyPool,
    ExhaustedRetries,
    PoolTooSmall,
    VersionMismatch,
)
from .features import (
    HASHED_NGRAMS,
    Featurizer,
    TokenizerConfig,
    load_embedding_table,
)
from .generator import GeneratorConfig, generate
from .model import TrainConfig, train
from .model_io import load_model, save_model
from .report import (
    ambiguity_report,
    classify_batch,
    emit_reports,
    histogram,
    tally,
)

EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_INTERNAL = 4

_INPUT_ERRORS = (CorpusError, CorruptModel, VersionMismatch, FileNotFoundError,
                 IsADirectoryError, PermissionError, ValueError)
_DEGENERATE_ERRORS = (EmptyPool, PoolTooSmall, ExhaustedRetries, DegenerateDataset)


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _DEGENERATE_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_DEGENERATE)
        except _INPUT_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)
        except click.exceptions.Exit:
            raise
        except Exception as exc:  # noqa: BLE001 - map anything else to exit 4
            click.echo(f"internal error: {exc!r}", err=True)
            sys.exit(EXIT_INTERNAL)

    return wrapper


def _load_config(path: Path | None) -> dict:
    if path is None:
        return {}
    try:
        cfg = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"config file {path}: invalid JSON ({exc.msg})") from exc
    if not isinstance(cfg, dict):
        raise ValueError(f"config file {path}: top level must be an object")
    return cfg


def _merge_config(ctx: click.Context, config: dict, values: dict) -> dict:
    """flags > config file > defaults (env counts as explicitly set)."""
    merged = dict(values)
    for key, value in merged.items():
        source = ctx.get_parameter_source(key)
        if source == click.core.ParameterSource.DEFAULT and key in config:
            merged[key] = config[key]
    return merged


def _sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = (_dt.datetime.fromtimestamp(int(epoch), tz=_dt.timezone.utc)
            if epoch else _dt.datetime.now(tz=_dt.timezone.utc))
    return when.replace(microsecond=0).isoformat()


def _build_featurizer(mode: str, dim: int, embedding_file: Path | None) -> Featurizer:
    if mode == "embedding":
        if embedding_file is None:
            raise ValueError("--featurizer embedding requires --embedding-file")
        return load_embedding_table(embedding_file)
    return Featurizer(mode=HASHED_NGRAMS, dim=dim)


def _lexicon(path: Path | None):
    return load_lexicon(path) if path else default_lexicon()


_train_options = [
    click.option("--train-seed", type=int, default=0, show_default=True,
                 help="Seed for weight init and epoch shuffling."),
    click.option("--epochs", type=int, default=200, show_default=True),
    click.option("--learning-rate", type=float, default=0.05, show_default=True),
    click.option("--batch-size", type=int, default=8, show_default=True),
    click.option("--l2", type=float, default=1e-4, show_default=True,
                 help="L2 penalty on weight matrices."),
    click.option("--hidden", type=int, default=32, show_default=True,
                 help="Hidden layer width; 0 trains plain softmax regression."),
    click.option("--featurizer", "featurizer_mode",
                 type=click.Choice(["hashed", "embedding"]), default="hashed",
                 show_default=True),
    click.option("--dim", type=int, default=1024, show_default=True,
                 help="Hash bucket count (hashed featurizer only)."),
    click.option("--embedding-file", type=click.Path(exists=True, path_type=Path),
                 default=None, help="Embedding table file for --featurizer embedding."),
]

_generate_options = [
    click.option("--count", type=int, default=10_000, show_default=True),
    click.option("--gen-seed", type=int, default=0, show_default=True),
    click.option("--min-ingredients", type=int, default=3, show_default=True),
    click.option("--max-ingredients", type=int, default=8, show_default=True),
    click.option("--min-mixings", type=int, default=1, show_default=True),
    click.option("--max-mixings", type=int, default=3, show_default=True),
]

_classify_options = [
    click.option("--top-k", type=int, default=3, show_default=True,
                 help="Categories listed per recipe in the ambiguity report."),
    click.option("--threshold", type=float, default=0.10, show_default=True,
                 help="Second-probability level that flags a recipe ambiguous."),
    click.option("--bins", type=int, default=20, show_default=True,
                 help="Number of probability histogram bins."),
    click.option("--threads", type=int, default=1, show_default=True,
                 help="Classification threads (1 keeps runs bit-stable everywhere)."),
]

_common_options = [
    click.option("--config", type=click.Path(exists=True, path_type=Path),
                 default=None, help="JSON config file; flags take precedence."),
    click.option("--lexicon", "lexicon_path",
                 type=click.Path(exists=True, path_type=Path), default=None,
                 help="Verb lexicon file (defaults to the packaged one)."),
]


def _add_options(options):
    def wrap(fn):
        for option in reversed(options):
            fn = option(fn)
        return fn

    return wrap


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(version=__version__, prog_name="potionlab")
def main():
    """Potion-recipe generation and category-classification pipeline."""


@main.command()
@click.argument("corpus_path", type=click.Path(exists=True, path_type=Path))
@click.option("--lexicon", "lexicon_path",
              type=click.Path(exists=True, path_type=Path), default=None,
              help="Verb lexicon file (defaults to the packaged one).")
@_handle_errors
def ingest(corpus_path: Path, lexicon_path: Path | None):
    """Parse and validate a corpus; print category counts and pool sizes."""
    dataset = parse_corpus(corpus_path, _lexicon(lexicon_path))
    click.echo(f"total recipes: {len(dataset.recipes)}")
    for cat, n in zip(CATEGORIES, dataset.counts_per_category):
        code = f" ({cat.atc_code})" if cat.atc_code else ""
        click.echo(f"  {cat.name}{code}: {n}")
    pool = build_pool(dataset)
    click.echo(f"pool: {len(pool.ingredients)} ingredient fragments, "
               f"{len(pool.mixings)} mixing fragments")


@main.command("train")
@click.argument("corpus_path", type=click.Path(exists=True, path_type=Path))
@click.option("--model-out", "-o", type=click.Path(path_type=Path),
              default=Path("model.potion"), show_default=True)
@_add_options(_train_options)
@_add_options(_common_options)
@click.pass_context
@_handle_errors
def train_cmd(ctx, corpus_path: Path, model_out: Path, config: Path | None,
              lexicon_path: Path | None, **opts):
    """Train a classifier on a labeled corpus and save the model file."""
    opts = _merge_config(ctx, _load_config(config), opts)
    dataset = parse_corpus(corpus_path, _lexicon(lexicon_path))
    model = _train_model(dataset, opts)
    model.meta["corpus_sha256"] = _sha256(corpus_path)
    save_model(model, model_out)
    click.echo(f"trained on {len(dataset.recipes)} recipes; "
               f"final training loss: {model.meta['final_loss']:.6f}")
    click.echo(f"model written to {model_out}")


def _train_model(dataset: Dataset, opts: dict):
    featurizer = _build_featurizer(opts["featurizer_mode"], opts["dim"],
                                   opts["embedding_file"])
    cfg = TrainConfig(learning_rate=opts["learning_rate"], epochs=opts["epochs"],
                      batch_size=opts["batch_size"], l2=opts["l2"],
                      seed=opts["train_seed"], hidden_size=opts["hidden"])
    return train(dataset, featurizer, cfg, TokenizerConfig())


@main.command("generate")
@click.argument("corpus_path", type=click.Path(exists=True, path_type=Path))
@click.option("--out", "-o", "out_path", type=click.Path(path_type=Path),
              default=Path("generated.jsonl"), show_default=True)
@_add_options(_generate_options)
@_add_options(_common_options)
@click.pass_context
@_handle_errors
def generate_cmd(ctx, corpus_path: Path, out_path: Path, config: Path | None,
                 lexicon_path: Path | None, **opts):
    """Generate novel recipes from the corpus fragment pool."""
    opts = _merge_config(ctx, _load_config(config), opts)
    dataset = parse_corpus(corpus_path, _lexicon(lexicon_path))
    pool = build_pool(dataset)
    cfg = _generator_config(opts)
    recipes = generate(pool, dataset, cfg)
    write_records(recipes, out_path)
    click.echo(f"generated {len(recipes)} recipes; all differ from the "
               f"{len(dataset.recipes)} training recipes")
    click.echo(f"recipes written to {out_path}")


def _generator_config(opts: dict) -> GeneratorConfig:
    return GeneratorConfig(seed=opts["gen_seed"], count=opts["count"],
                           min_ingredients=opts["min_ingredients"],
                           max_ingredients=opts["max_ingredients"],
                           min_mixings=opts["min_mixings"],
                           max_mixings=opts["max_mixings"])


@main.command("classify")
@click.argument("model_path", type=click.Path(exists=True, path_type=Path))
@click.argument("recipes_path", type=click.Path(exists=True, path_type=Path))
@click.option("--out-dir", "-o", type=click.Path(path_type=Path),
              envvar="POTIONLAB_OUT_DIR", default=Path("reports"), show_default=True)
@_add_options(_classify_options)
@_add_options(_common_options)
@click.pass_context
@_handle_errors
def classify_cmd(ctx, model_path: Path, recipes_path: Path, out_dir: Path,
                 config: Path | None, lexicon_path: Path | None, **opts):
    """Classify a recipe file and write all report artifacts."""
    opts = _merge_config(ctx, _load_config(config), opts)
    model = load_model(model_path)
    recipes = read_unlabeled_records(recipes_path, _lexicon(lexicon_path))
    if not recipes:
        click.echo("error: recipe file contains no records", err=True)
        sys.exit(EXIT_DEGENERATE)

    predictions = classify_batch(model, recipes, threads=opts["threads"])
    counts = tally(predictions)
    hist = histogram(predictions, bins=opts["bins"])
    ambiguity = ambiguity_report(predictions, recipes,
                                 k=opts["top_k"], threshold=opts["threshold"])
    run_info = {
        "model_file": model_path.name,
        "model_sha256": _sha256(model_path),
        "recipes_file": recipes_path.name,
        "recipes_sha256": _sha256(recipes_path),
        "model_meta": model.meta,
        "classify_config": {k: opts[k] for k in
                            ("top_k", "threshold", "bins", "threads")},
    }
    emit_reports(counts, hist, ambiguity, out_dir, run_info=run_info)

    modal = max(range(len(counts.counts)), key=lambda c: counts.counts[c])
    above = sum(1 for p in predictions if p.top_prob > 0.9)
    click.echo(f"modal category: {CATEGORIES[modal].name} "
               f"({counts.counts[modal]} of {counts.total})")
    click.echo(f"fraction of top probabilities above 0.9: "
               f"{above / counts.total:.4f}")
    click.echo(f"reports written to {out_dir}")


@main.command("pipeline")
@click.argument("corpus_path", type=click.Path(exists=True, path_type=Path))
@click.option("--out-dir", "-o", type=click.Path(path_type=Path),
              envvar="POTIONLAB_OUT_DIR", default=Path("run"), show_default=True)
@_add_options(_train_options)
@_add_options(_generate_options)
@_add_options(_classify_options)
@_add_options(_common_options)
@click.pass_context
@_handle_errors
def pipeline_cmd(ctx, corpus_path: Path, out_dir: Path, config: Path | None,
                 lexicon_path: Path | None, **opts):
    """Run ingest, train, generate and classify in one reproducible pass."""
    opts = _merge_config(ctx, _load_config(config), opts)
    lexicon = _lexicon(lexicon_path)
    out_dir.mkdir(parents=True, exist_ok=True)

    dataset = parse_corpus(corpus_path, lexicon)
    corpus_digest = _sha256(corpus_path)
    click.echo(f"ingested {len(dataset.recipes)} recipes from {corpus_path}")

    model = _train_model(dataset, opts)
    model.meta["corpus_sha256"] = corpus_digest
    model_path = out_dir / "model.potion"
    save_model(model, model_path)
    click.echo(f"final training loss: {model.meta['final_loss']:.6f}")

    pool = build_pool(dataset)
    gen_cfg = _generator_config(opts)
    recipes = generate(pool, dataset, gen_cfg)
    recipes_path = out_dir / "generated.jsonl"
    write_records(recipes, recipes_path)
    click.echo(f"generated {len(recipes)} novel recipes")

    predictions = classify_batch(model, recipes, threads=opts["threads"])
    counts = tally(predictions)
    hist = histogram(predictions, bins=opts["bins"])
    ambiguity = ambiguity_report(predictions, recipes,
                                 k=opts["top_k"], threshold=opts["threshold"])
    run_info = {
        "corpus_sha256": corpus_digest,
        "seeds": {"train_seed": opts["train_seed"], "gen_seed": opts["gen_seed"]},
        "generator_config": {k: opts[k] for k in
                             ("count", "min_ingredients", "max_ingredients",
                              "min_mixings", "max_mixings")},
        "model_meta": model.meta,
        "classify_config": {k: opts[k] for k in
                            ("top_k", "threshold", "bins", "threads")},
    }
    emit_reports(counts, hist, ambiguity, out_dir, run_info=run_info)

    manifest = {
        "tool": "potionlab",
        "tool_version": __version__,
        "created_utc": _timestamp(),
        "corpus_file": corpus_path.name,
        "corpus_sha256": corpus_digest,
        "lexicon_version": lexicon.version,
        "artifacts": {
            "model": model_path.name,
            "recipes": recipes_path.name,
            "reports": ["counts.csv", "histogram.csv", "ambiguity.csv",
                        "report.svg", "counts.png", "histogram.png", "run_meta"],
        },
        **{k: run_info[k] for k in ("seeds", "generator_config",
                                    "model_meta", "classify_config")},
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n",
        encoding="utf-8", newline="\n")

    modal = max(range(len(counts.counts)), key=lambda c: counts.counts[c])
    above = sum(1 for p in predictions if p.top_prob > 0.9)
    click.echo(f"modal category: {CATEGORIES[modal].name} "
               f"({counts.counts[modal]} of {counts.total})")
    click.echo(f"fraction of top probabilities above 0.9: "
               f"{above / counts.total:.4f}")
    click.echo(f"artifacts written to {out_dir}")


if __name__ == "__main__":
    main()
