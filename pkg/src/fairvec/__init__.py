"""Measure and remove multiclass social bias in word embeddings.

The library is organized around an immutable :class:`EmbeddingStore`, a
:class:`BiasLexicon` naming identity subclasses and attribute sets, and
three families of tools: association metrics (WEAT, MAC, analogy
scoring), a classifier-based sentiment divergence (RNSB), and debiasing
transforms (hard projection, soft translation, conceptor negation).
"""
from __future__ import annotations

__version__ = "0.1.0"

from .debias import (
    DEFAULT_ALPHA,
    DEFAULT_LAMBDA,
    DEFAULT_NEIGHBORS,
    DEFAULT_THRESHOLD,
    BiasSubspace,
    apply_displacement,
    apply_negated,
    compute_conceptor,
    conceptor_debias,
    correlation_matrix,
    equalize,
    hard_debias,
    hard_debias_details,
    identify_bias_subspace,
    load_conceptor,
    neutralize,
    save_conceptor,
    softweat_debias,
    softweat_plans,
)
from .errors import (
    ComputationError,
    DegenerateInputError,
    EmptyNullSpaceError,
    FairvecError,
    FormatError,
    InputError,
    ResolutionError,
)
from .lexicon import (
    AttributeSet,
    BiasLexicon,
    DropReport,
    EqualitySet,
    ResolvedEqualitySet,
    ResolvedLexicon,
    ResolvedSet,
    Subclass,
    bundled_lexicon_path,
    lexicon_from_dict,
    load_lexicon,
    resolve,
)
from .metrics import (
    AnalogyScore,
    MacResult,
    PairwiseWeat,
    WeatResult,
    WeatSummary,
    cosine,
    enumerate_analogies,
    mac,
    nearest_neighbors,
    score_analogy,
    weat,
    weat_all_pairs,
    word_set,
)
from .report import (
    AuditReport,
    DebiasReport,
    SweepResult,
    analogies_csv,
    audit_csv,
    build_audit,
    sweep_csv,
    write_json,
)
from .rnsb import (
    LogisticModel,
    RnsbResult,
    SentimentLexicon,
    TrainConfig,
    TTestResult,
    bundled_sentiment_paths,
    kl_from_uniform,
    load_sentiment_lexicon,
    negative_probability,
    one_tailed_t_test,
    rnsb,
    subclass_distribution,
    term_distribution,
    train_sentiment_classifier,
)
from .store import (
    GLOVE_TEXT,
    WORD2VEC_BINARY,
    EmbeddingStore,
    WordVector,
    load_embeddings,
    load_glove_text,
    load_word2vec_binary,
    normalize_all,
    save_embeddings,
    store_from_pairs,
)
from .synthetic import PlantedBias, planted_bias_store, random_store

__all__ = [
    "AnalogyScore",
    "AttributeSet",
    "AuditReport",
    "BiasLexicon",
    "BiasSubspace",
    "ComputationError",
    "DEFAULT_ALPHA",
    "DEFAULT_LAMBDA",
    "DEFAULT_NEIGHBORS",
    "DEFAULT_THRESHOLD",
    "DebiasReport",
    "DegenerateInputError",
    "DropReport",
    "EmbeddingStore",
    "EmptyNullSpaceError",
    "EqualitySet",
    "FairvecError",
    "FormatError",
    "GLOVE_TEXT",
    "InputError",
    "LogisticModel",
    "MacResult",
    "PairwiseWeat",
    "PlantedBias",
    "ResolutionError",
    "ResolvedEqualitySet",
    "ResolvedLexicon",
    "ResolvedSet",
    "RnsbResult",
    "SentimentLexicon",
    "Subclass",
    "SweepResult",
    "TTestResult",
    "TrainConfig",
    "WORD2VEC_BINARY",
    "WeatResult",
    "WeatSummary",
    "WordVector",
    "analogies_csv",
    "apply_displacement",
    "apply_negated",
    "audit_csv",
    "build_audit",
    "bundled_lexicon_path",
    "bundled_sentiment_paths",
    "compute_conceptor",
    "conceptor_debias",
    "correlation_matrix",
    "cosine",
    "enumerate_analogies",
    "equalize",
    "hard_debias",
    "hard_debias_details",
    "identify_bias_subspace",
    "kl_from_uniform",
    "lexicon_from_dict",
    "load_conceptor",
    "load_embeddings",
    "load_glove_text",
    "load_lexicon",
    "load_sentiment_lexicon",
    "load_word2vec_binary",
    "mac",
    "nearest_neighbors",
    "negative_probability",
    "neutralize",
    "normalize_all",
    "one_tailed_t_test",
    "planted_bias_store",
    "random_store",
    "resolve",
    "rnsb",
    "save_conceptor",
    "save_embeddings",
    "score_analogy",
    "softweat_debias",
    "softweat_plans",
    "store_from_pairs",
    "subclass_distribution",
    "sweep_csv",
    "term_distribution",
    "train_sentiment_classifier",
    "weat",
    "weat_all_pairs",
    "word_set",
    "write_json",
]
