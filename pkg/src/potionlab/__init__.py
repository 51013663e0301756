"""potionlab: seeded potion-recipe generation and ATC-category classification.

The pipeline ingests a labeled recipe corpus, generates novel recipes by
seeded random combination of recipe fragments, trains a from-scratch
multi-class classifier over the 11 fixed categories and emits category,
probability-histogram and ambiguity reports.
"""

from ._version import __version__
from .categories import CATEGORIES, CATEGORY_NAMES, NUM_CATEGORIES, Category
from .corpus import (
    Dataset,
    Fragment,
    FragmentKind,
    FragmentPool,
    Recipe,
    VerbLexicon,
    build_pool,
    default_lexicon,
    load_lexicon,
    normalize_text,
    parse_corpus,
    read_unlabeled_records,
    segment_recipe,
    write_records,
)
from .features import (
    EMBEDDING_TABLE,
    HASHED_NGRAMS,
    Featurizer,
    TokenizerConfig,
    featurize,
    load_embedding_table,
    tokenize,
)
from .generator import GeneratorConfig, fragment_count_histogram, generate
from .model import (
    ModelParams,
    Prediction,
    TrainConfig,
    evaluate_holdout,
    forward,
    loss_and_grad,
    predict,
    softmax,
    train,
)
from .model_io import load_model, save_model
from .report import (
    AmbiguityEntry,
    CategoryCounts,
    ProbHistogram,
    ambiguity_report,
    classify_batch,
    emit_reports,
    histogram,
    tally,
)

__all__ = [
    "__version__",
    "CATEGORIES",
    "CATEGORY_NAMES",
    "NUM_CATEGORIES",
    "Category",
    "Dataset",
    "Fragment",
    "FragmentKind",
    "FragmentPool",
    "Recipe",
    "VerbLexicon",
    "build_pool",
    "default_lexicon",
    "load_lexicon",
    "normalize_text",
    "parse_corpus",
    "read_unlabeled_records",
    "segment_recipe",
    "write_records",
    "EMBEDDING_TABLE",
    "HASHED_NGRAMS",
    "Featurizer",
    "TokenizerConfig",
    "featurize",
    "load_embedding_table",
    "tokenize",
    "GeneratorConfig",
    "fragment_count_histogram",
    "generate",
    "ModelParams",
    "Prediction",
    "TrainConfig",
    "evaluate_holdout",
    "forward",
    "loss_and_grad",
    "predict",
    "softmax",
    "train",
    "load_model",
    "save_model",
    "AmbiguityEntry",
    "CategoryCounts",
    "ProbHistogram",
    "ambiguity_report",
    "classify_batch",
    "emit_reports",
    "histogram",
    "tally",
]
