"""Cosine-geometry bias measures.

The association test compares how strongly two target word sets lean
toward one of two attribute sets; its effect size is the headline number.
The attribute-cosine average instead measures raw distance from targets
to attribute words. Analogy scoring and nearest-neighbor queries support
the qualitative probes and the neighborhood-based debiaser.

Where a mean of several values feeds a sign-symmetry guarantee (swapping
target or attribute sets must negate results exactly, not just
approximately), sums go through math.fsum, whose correctly-rounded result
is independent of summation order.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DegenerateInputError, ResolutionError
from .lexicon import ResolvedLexicon, ResolvedSet
from .store import EmbeddingStore

logger = logging.getLogger(__name__)

DEFAULT_DELTA = 1.0
DEFAULT_MIN_SCORE = 0.15


@dataclass(frozen=True)
class WeatResult:
    """Association-test outcome for one (T1, T2, A1, A2) quadruple.

    ``statistic`` is the summed association difference, ``effect_size``
    the standardized version of it, ``per_word_assoc`` the per-target
    association values the statistic is built from.
    """

    statistic: float
    effect_size: float
    per_word_assoc: dict[str, float]
    degenerate_count: int = 0


@dataclass(frozen=True)
class MacResult:
    """Mean attribute-cosine distance over every (target word, attribute set)
    pair, plus per-(target set, attribute set) breakdowns."""

    mac: float
    per_pair: dict[tuple[str, str], float]
    degenerate_count: int = 0


@dataclass(frozen=True)
class AnalogyScore:
    a: str
    b: str
    x: str
    y: str
    score: float


@dataclass(frozen=True)
class PairwiseWeat:
    subclass_pair: tuple[str, str]
    attribute_pair: tuple[str, str]
    result: WeatResult


@dataclass(frozen=True)
class WeatSummary:
    """All unordered subclass-pair x attribute-pair association tests.

    ``aggregate`` is the mean of |effect_size| over the combinations; it is
    the one-number score reported for a whole lexicon.
    """

    pairs: tuple[PairwiseWeat, ...]
    aggregate: float
    degenerate_count: int = 0


def word_set(name: str, words: list[str], vectors) -> ResolvedSet:
    """A standalone word set for metric calls not tied to a loaded store."""
    matrix = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    if matrix.shape[0] != len(words):
        raise ValueError("one vector per word required")
    return ResolvedSet(
        name=name,
        words=tuple(words),
        keys=tuple(words),
        indices=np.arange(len(words), dtype=np.intp),
        matrix=matrix,
    )


# -- cosine building blocks ----------------------------------------------


def cosine(u, v) -> float:
    """Cosine similarity; 0 when either vector has zero norm."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = math.sqrt(float(np.dot(u, u)))
    nv = math.sqrt(float(np.dot(v, v)))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


class _DegenerateCounter:
    __slots__ = ("count",)

    def __init__(self) -> None:
        self.count = 0


def _cosines_to_set(w: np.ndarray, attr: ResolvedSet,
                    counter: _DegenerateCounter | None) -> np.ndarray:
    """Cosine of ``w`` against every row of an attribute set.

    Zero-norm pairs contribute cosine 0 and bump the degeneracy counter.
    """
    norms = np.linalg.norm(attr.matrix, axis=1)
    wn = math.sqrt(float(np.dot(w, w)))
    dots = attr.matrix @ w
    denom = norms * wn
    bad = denom == 0.0
    if counter is not None and bad.any():
        counter.count += int(bad.sum())
    return np.where(bad, 0.0, dots / np.where(bad, 1.0, denom))


def _mean(values) -> float:
    vals = list(values)
    return math.fsum(vals) / len(vals)


def assoc_s(w, A1: ResolvedSet, A2: ResolvedSet,
            _counter: _DegenerateCounter | None = None) -> float:
    """Association of one word vector: mean cosine to A1 minus mean to A2."""
    if len(A1) == 0 or len(A2) == 0:
        raise DegenerateInputError("attribute sets must be non-empty")
    w = np.asarray(w, dtype=np.float64)
    m1 = _mean(_cosines_to_set(w, A1, _counter))
    m2 = _mean(_cosines_to_set(w, A2, _counter))
    return m1 - m2


# -- the association test ------------------------------------------------


def weat(T1: ResolvedSet, T2: ResolvedSet,
         A1: ResolvedSet, A2: ResolvedSet) -> WeatResult:
    """Differential association of two target sets with two attribute sets.

    The effect size standardizes the mean association gap by the population
    standard deviation (divide by N) of associations over the union of both
    target sets. A zero spread leaves the effect size undefined and raises
    DegenerateInputError.
    """
    for s in (T1, T2, A1, A2):
        if len(s) == 0:
            raise DegenerateInputError(f"word set {s.name!r} is empty")
    if len(T1) + len(T2) < 2:
        raise DegenerateInputError("need at least 2 target words in total")
    counter = _DegenerateCounter()
    s1 = [assoc_s(T1.matrix[i], A1, A2, counter) for i in range(len(T1))]
    s2 = [assoc_s(T2.matrix[i], A1, A2, counter) for i in range(len(T2))]

    statistic = math.fsum(s1) - math.fsum(s2)
    mean1 = math.fsum(s1) / len(s1)
    mean2 = math.fsum(s2) / len(s2)
    union = s1 + s2
    mean_u = math.fsum(union) / len(union)
    var_u = math.fsum((v - mean_u) ** 2 for v in union) / len(union)
    std_u = math.sqrt(var_u)
    if std_u == 0.0:
        raise DegenerateInputError(
            "all target words have identical associations; effect size undefined"
        )
    per_word = {w: v for w, v in zip(T1.words + T2.words, union)}
    return WeatResult(
        statistic=statistic,
        effect_size=(mean1 - mean2) / std_u,
        per_word_assoc=per_word,
        degenerate_count=counter.count,
    )


def weat_all_pairs(resolved: ResolvedLexicon) -> WeatSummary:
    """The association test for every unordered subclass pair crossed with
    every unordered attribute-set pair, plus the mean-|effect| aggregate."""
    if len(resolved.subclasses) < 2:
        raise DegenerateInputError("need at least 2 subclasses")
    if len(resolved.attribute_sets) < 2:
        raise DegenerateInputError("need at least 2 attribute sets")
    pairs = []
    for T1, T2 in combinations(resolved.subclasses, 2):
        for A1, A2 in combinations(resolved.attribute_sets, 2):
            result = weat(T1, T2, A1, A2)
            pairs.append(PairwiseWeat(
                subclass_pair=(T1.name, T2.name),
                attribute_pair=(A1.name, A2.name),
                result=result,
            ))
    aggregate = _mean(abs(p.result.effect_size) for p in pairs)
    return WeatSummary(
        pairs=tuple(pairs),
        aggregate=aggregate,
        degenerate_count=sum(p.result.degenerate_count for p in pairs),
    )


# -- mean attribute-cosine distance --------------------------------------


def mac(targets: list[ResolvedSet] | tuple[ResolvedSet, ...],
        attributes: list[ResolvedSet] | tuple[ResolvedSet, ...]) -> MacResult:
    """Mean of (1 - cosine) between each target word and each attribute set.

    Every (target word, attribute set) pair weighs equally in the overall
    mean regardless of how big its target set is; per_pair holds the
    per-(target set, attribute set) means for reporting.
    """
    if not targets or not attributes:
        raise DegenerateInputError("need at least one target and attribute set")
    for s in list(targets) + list(attributes):
        if len(s) == 0:
            raise DegenerateInputError(f"word set {s.name!r} is empty")
    counter = _DegenerateCounter()
    all_values: list[float] = []
    per_pair: dict[tuple[str, str], float] = {}
    for T in targets:
        for A in attributes:
            set_values = []
            for i in range(len(T)):
                sims = _cosines_to_set(T.matrix[i], A, counter)
                set_values.append(_mean(1.0 - sims))
            per_pair[(T.name, A.name)] = _mean(set_values)
            all_values.extend(set_values)
    return MacResult(
        mac=_mean(all_values),
        per_pair=per_pair,
        degenerate_count=counter.count,
    )


# -- analogy scoring -----------------------------------------------------


def score_analogy(store: EmbeddingStore, a: str, b: str, x: str, y: str,
                  delta: float = DEFAULT_DELTA) -> AnalogyScore:
    """Score a : b :: x : y as cos(a-b, x-y), gated by the offset threshold.

    The score is 0 when ``x`` and ``y`` are farther apart than ``delta``
    or coincide exactly (their difference carries no direction).
    """
    rows = {}
    for word in (a, b, x, y):
        row = store.get(word)
        if row is None:
            raise ResolutionError(f"word {word!r} not in vocabulary")
        rows[word] = np.asarray(row, dtype=np.float64)
    diff_xy = rows[x] - rows[y]
    dist = math.sqrt(float(np.dot(diff_xy, diff_xy)))
    if dist == 0.0 or dist > delta:
        return AnalogyScore(a=a, b=b, x=x, y=y, score=0.0)
    score = cosine(rows[a] - rows[b], diff_xy)
    return AnalogyScore(a=a, b=b, x=x, y=y, score=score)


def enumerate_analogies(store: EmbeddingStore,
                        left_terms: list[str], right_terms: list[str],
                        attribute_vocab: list[str],
                        delta: float = DEFAULT_DELTA,
                        min_score: float = DEFAULT_MIN_SCORE) -> list[AnalogyScore]:
    """Every scored analogy (a, b, x, y) with a from left_terms, x from
    right_terms, and b, y from attribute_vocab.

    Out-of-vocabulary inputs are dropped with a warning. Results keep
    |score| >= min_score, sorted by score descending; equal scores order
    by the (a, b, x, y) quadruple.
    """
    def present(words: list[str], label: str) -> list[str]:
        kept, missing = [], []
        for w in words:
            (kept if w in store else missing).append(w)
        if missing:
            logger.warning("%s: dropped %d out-of-vocabulary words: %s",
                           label, len(missing), ", ".join(missing))
        return kept

    lefts = present(left_terms, "left terms")
    rights = present(right_terms, "right terms")
    attrs = present(attribute_vocab, "attribute vocabulary")
    results = []
    for a in lefts:
        for b in attrs:
            for x in rights:
                if x == a:
                    continue
                for y in attrs:
                    if y == b:
                        continue
                    scored = score_analogy(store, a, b, x, y, delta=delta)
                    if abs(scored.score) >= min_score:
                        results.append(scored)
    results.sort(key=lambda s: (-s.score, (s.a, s.b, s.x, s.y)))
    return results


# -- neighborhood queries ------------------------------------------------


def nearest_neighbors(store: EmbeddingStore, word: str, n: int,
                      exclude: set[str] | frozenset[str] = frozenset()
                      ) -> list[tuple[str, float]]:
    """Top-n vocabulary words by cosine similarity to ``word``.

    The query word and anything in ``exclude`` never appear; ties are
    broken by vocabulary index order.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    qi = store.index(word)
    if qi is None:
        raise ResolutionError(f"word {word!r} not in vocabulary")
    matrix = store.matrix64()
    norms = store.row_norms()
    q = matrix[qi]
    qn = norms[qi]
    denom = norms * qn
    bad = denom == 0.0
    sims = np.where(bad, 0.0, (matrix @ q) / np.where(bad, 1.0, denom))

    banned = {qi}
    for w in exclude:
        i = store.index(w)
        if i is not None:
            banned.add(i)
    keep = np.array([i for i in range(len(store)) if i not in banned],
                    dtype=np.intp)
    if len(keep) == 0:
        return []
    order = np.lexsort((keep, -sims[keep]))
    top = keep[order[:n]]
    vocab_list = store.words()
    return [(vocab_list[i], float(sims[i])) for i in top]
