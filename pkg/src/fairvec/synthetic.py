"""Synthetic embedding stores with controllable planted bias.

Every generator is deterministic in its seed. The planted construction
places each subclass on its own orthonormal identity axis and leans the
first few subclasses toward distinct attribute clusters, so association
effect sizes are large by design and debiasing transforms have something
measurable to remove.
"""
from __future__ import annotations

import math
import string
from dataclasses import dataclass

import numpy as np

from .lexicon import BiasLexicon, lexicon_from_dict
from .rnsb import SentimentLexicon
from .store import EmbeddingStore, store_from_pairs

__all__ = [
    "PlantedBias",
    "planted_bias_store",
    "random_store",
]


def random_store(n_words: int, dim: int, seed: int = 0,
                 scale: float = 1.0, prefix: str = "w") -> EmbeddingStore:
    """Independent gaussian rows scaled to roughly unit norm."""
    if n_words < 1 or dim < 1:
        raise ValueError("n_words and dim must be positive")
    rng = np.random.default_rng(seed)
    width = len(str(n_words - 1))
    matrix = rng.normal(size=(n_words, dim)) * (scale / math.sqrt(dim))
    return store_from_pairs(
        [(f"{prefix}{i:0{width}d}", matrix[i]) for i in range(n_words)])


@dataclass(frozen=True)
class PlantedBias:
    """A generated store plus the lexicons describing its construction.

    ``directions`` stacks the orthonormal axes used: one identity axis per
    subclass, one axis per attribute cluster, then the sentiment axis.
    """

    store: EmbeddingStore
    lexicon: BiasLexicon
    sentiment: SentimentLexicon | None
    directions: np.ndarray


def planted_bias_store(dim: int = 50, seed: int = 0, n_subclasses: int = 3,
                       targets_per_subclass: int = 4,
                       n_attribute_sets: int = 2,
                       words_per_attribute: int = 8,
                       satellites_per_subclass: int = 10, n_fillers: int = 40,
                       noise: float = 0.25, bias_strength: float = 0.6,
                       sentiment_words: int = 0,
                       sentiment_shift: float = 0.0) -> PlantedBias:
    """A store whose subclasses provably lean toward attribute clusters.

    Subclass ``i`` leans toward attribute set ``i`` while ``i`` is below
    the number of attribute sets; later subclasses stay neutral. Every
    target belongs to exactly one full-arity equality set, so an
    equalizing debias transform covers the whole target vocabulary.
    Satellites are off-lexicon words sharing a subclass's position and
    lean; they keep nearest-neighbor expansions inside the topical
    cluster the way real vocabularies do. ``sentiment_shift`` drags the
    first subclass's targets toward the negative sentiment pole (with
    ``sentiment_words`` per polarity placed at the two poles).
    """
    if n_subclasses < 2:
        raise ValueError("need at least 2 subclasses")
    if n_attribute_sets < 2:
        raise ValueError("need at least 2 attribute sets")
    if n_attribute_sets > len(string.ascii_lowercase):
        raise ValueError("too many attribute sets to name")
    n_directions = n_subclasses + n_attribute_sets + 1
    if dim < n_directions:
        raise ValueError(
            f"dim {dim} cannot hold {n_directions} orthonormal directions")
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(dim, n_directions)))
    directions = q.T.copy()
    identity = directions[:n_subclasses]
    attribute = directions[n_subclasses:n_subclasses + n_attribute_sets]
    sentiment_axis = directions[-1]

    def wobble() -> np.ndarray:
        return noise * rng.normal(size=dim) / math.sqrt(dim)

    pairs: list[tuple[str, np.ndarray]] = []
    for i in range(n_subclasses):
        lean = attribute[i] if i < n_attribute_sets else 0.0
        shift = -sentiment_shift * sentiment_axis if i == 0 else 0.0
        for j in range(targets_per_subclass):
            pairs.append((f"g{i}t{j}",
                          identity[i] + bias_strength * lean + shift
                          + wobble()))
        for m in range(satellites_per_subclass):
            pairs.append((f"g{i}s{m}",
                          identity[i] + bias_strength * lean + wobble()))
    for k in range(n_attribute_sets):
        for m in range(words_per_attribute):
            pairs.append((f"a{k}w{m}", attribute[k] + wobble()))
    for m in range(sentiment_words):
        pairs.append((f"pos{m}", sentiment_axis + wobble()))
        pairs.append((f"neg{m}", -sentiment_axis + wobble()))
    for m in range(n_fillers):
        pairs.append((f"fill{m}",
                      rng.normal(size=dim) / math.sqrt(dim)))

    doc = {
        "class": "planted",
        "subclasses": [
            {"name": f"group{i}",
             "targets": [f"g{i}t{j}" for j in range(targets_per_subclass)]}
            for i in range(n_subclasses)
        ],
        "equality_sets": [
            [f"g{i}t{j}" for i in range(n_subclasses)]
            for j in range(targets_per_subclass)
        ],
        "attribute_sets": [
            {"name": f"attr{string.ascii_lowercase[k]}",
             "words": [f"a{k}w{m}" for m in range(words_per_attribute)]}
            for k in range(n_attribute_sets)
        ],
    }
    sentiment = None
    if sentiment_words:
        sentiment = SentimentLexicon(
            positive=tuple(f"pos{m}" for m in range(sentiment_words)),
            negative=tuple(f"neg{m}" for m in range(sentiment_words)),
        )
    return PlantedBias(
        store=store_from_pairs(pairs),
        lexicon=lexicon_from_dict(doc),
        sentiment=sentiment,
        directions=directions,
    )
