"""Neighborhood-translation debiasing.

Each subclass is handled in turn: its identity terms are expanded with
their nearest neighbors, the attribute sets it leans toward are found by
effect-size screening, and the whole expanded neighborhood is translated
so its centroid lands on a vector orthogonal to every selected attribute
word (a null-space direction of the stacked attribute matrix). Among the
candidate directions, the one whose translation leaves the smallest
aggregate effect size wins. The strength parameter lam in [0, 1]
interpolates between leaving the store alone and the full translation.

Plans are computed at full strength on a working copy, and lam scales
only the final committed displacement. That keeps the whole transform
affine in lam: x(lam) = x + lam * (x(1) - x), with lam = 0 the exact
identity.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ..errors import EmptyNullSpaceError
from ..lexicon import BiasLexicon, ResolvedLexicon, ResolvedSet
from ..metrics import nearest_neighbors, weat, word_set
from ..store import EmbeddingStore
from ..rnsb import _ensure_resolved

logger = logging.getLogger(__name__)

DEFAULT_LAMBDA = 0.5
DEFAULT_THRESHOLD = 0.5
DEFAULT_NEIGHBORS = 10
SINGULAR_TOL = 1e-10
MAX_BASIS_CANDIDATES = 10


@dataclass(frozen=True)
class SoftWeatPlan:
    """Everything decided for one subclass, at full translation strength.

    ``selected_pairs`` are the (other subclass, leaned-toward attribute,
    contrast attribute) triples that exceeded the screening threshold;
    ``candidate_scores`` maps candidate ids (signed basis indices like
    '+0', '-3') to the aggregate |effect size| after applying that
    candidate's translation. ``translation`` is the full-strength
    displacement added to every expanded-set row; None when skipped.
    """

    subclass: str
    expanded: tuple[str, ...]
    selected_attributes: tuple[str, ...]
    selected_pairs: tuple[tuple[str, str, str], ...]
    candidate_scores: dict[str, float]
    chosen: str | None
    translation: np.ndarray | None
    skipped: bool

    def as_dict(self) -> dict:
        return {
            "subclass": self.subclass,
            "expanded_size": len(self.expanded),
            "selected_attributes": list(self.selected_attributes),
            "selected_pairs": [list(p) for p in self.selected_pairs],
            "candidate_scores": dict(self.candidate_scores),
            "chosen": self.chosen,
            "skipped": self.skipped,
        }


def expand_targets(store: EmbeddingStore, subclass: ResolvedSet, n: int,
                   exclude: set[str] | frozenset[str] = frozenset()
                   ) -> list[str]:
    """The subclass's target keys plus each target's n nearest neighbors.

    ``exclude`` (other subclasses' terms) never enters the expansion.
    Order is deterministic: targets first, then neighbors by discovery.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    expanded = list(subclass.keys)
    seen = set(expanded)
    if n == 0:
        return expanded
    for key in subclass.keys:
        for neighbor, _ in nearest_neighbors(store, key, n, exclude=exclude):
            if neighbor not in seen:
                seen.add(neighbor)
                expanded.append(neighbor)
    return expanded


def _current_set(name: str, keys: tuple[str, ...] | list[str],
                 store: EmbeddingStore, matrix: np.ndarray) -> ResolvedSet:
    """A word set whose vectors come from the working matrix, not from
    resolution time."""
    indices = np.array([store.vocab[k] for k in keys], dtype=np.intp)
    return ResolvedSet(name=name, words=tuple(keys), keys=tuple(keys),
                       indices=indices, matrix=matrix[indices])


def select_biased_attributes(resolved: ResolvedLexicon, subclass_name: str,
                             threshold: float,
                             store: EmbeddingStore | None = None,
                             matrix: np.ndarray | None = None
                             ) -> tuple[list[ResolvedSet],
                                        list[tuple[str, str, str]]]:
    """Attribute sets the subclass leans toward, by effect-size screening.

    For every other subclass and every ordered attribute pair (A1, A2),
    A1 is selected when the effect size of (T_sub, T_other, A1, A2)
    exceeds the threshold. Returns the deduplicated attribute sets in
    lexicon order plus the exceeding triples.
    """
    if len(resolved.attribute_sets) < 2:
        return [], []
    sub = resolved.subclass(subclass_name)
    others = [s for s in resolved.subclasses if s.name != subclass_name]

    def current(s: ResolvedSet) -> ResolvedSet:
        if store is None or matrix is None:
            return s
        return _current_set(s.name, s.keys, store, matrix)

    sub_cur = current(sub)
    selected_names: list[str] = []
    triples: list[tuple[str, str, str]] = []
    for other in others:
        other_cur = current(other)
        for A1, A2 in combinations(resolved.attribute_sets, 2):
            a1_cur, a2_cur = current(A1), current(A2)
            d = weat(sub_cur, other_cur, a1_cur, a2_cur).effect_size
            if d > threshold:
                triples.append((other.name, A1.name, A2.name))
                if A1.name not in selected_names:
                    selected_names.append(A1.name)
            if -d > threshold:
                # leaning toward A2 instead
                triples.append((other.name, A2.name, A1.name))
                if A2.name not in selected_names:
                    selected_names.append(A2.name)
    ordered = [a for a in resolved.attribute_sets if a.name in selected_names]
    return [current(a) for a in ordered], triples


def null_space_basis(attribute_matrix) -> list[np.ndarray]:
    """Orthonormal basis of vectors orthogonal to every matrix row.

    Singular values below 1e-10 count as zero. An empty null space is an
    error: fewer or smaller attribute sets (or lower-dimensional vectors)
    are needed.
    """
    M = np.atleast_2d(np.asarray(attribute_matrix, dtype=np.float64))
    if M.shape[0] < 1:
        raise ValueError("attribute matrix must have at least one row")
    _, singular, vh = np.linalg.svd(M, full_matrices=True)
    rank = int(np.sum(singular >= SINGULAR_TOL))
    basis = [vh[i] for i in range(rank, M.shape[1])]
    if not basis:
        raise EmptyNullSpaceError(
            "stacked attribute matrix spans the full space; reduce the "
            "number of selected attribute words or the embedding dimension"
        )
    return basis


def _aggregate_effect(sub_matrix: np.ndarray, sub_keys, resolved, triples,
                      store, matrix) -> float:
    """Mean |effect size| over the selected triples with the subclass's
    target vectors replaced by ``sub_matrix``."""
    t_sub = word_set("sub", list(sub_keys), sub_matrix)
    values = []
    for other_name, a1_name, a2_name in triples:
        other = resolved.subclass(other_name)
        A1 = resolved.attribute_set(a1_name)
        A2 = resolved.attribute_set(a2_name)
        d = weat(
            t_sub,
            _current_set(other.name, other.keys, store, matrix),
            _current_set(A1.name, A1.keys, store, matrix),
            _current_set(A2.name, A2.keys, store, matrix),
        ).effect_size
        values.append(abs(d))
    return math.fsum(values) / len(values)


def choose_translation(store: EmbeddingStore, resolved: ResolvedLexicon,
                       subclass_name: str, expanded: list[str],
                       triples: list[tuple[str, str, str]],
                       basis: list[np.ndarray],
                       matrix: np.ndarray) -> SoftWeatPlan:
    """Pick the signed null-space direction whose full-strength translation
    minimizes the remaining aggregate effect size.

    Candidates are +/- each of the first 10 basis vectors. The expanded
    set's centroid t_bar moves onto c*v where c = ||t_bar||, so every
    expanded row gains the displacement c*v - t_bar.
    """
    sub = resolved.subclass(subclass_name)
    selected_attr_names = []
    for _, a1, _ in triples:
        if a1 not in selected_attr_names:
            selected_attr_names.append(a1)
    expanded_idx = np.array([store.vocab[k] for k in expanded], dtype=np.intp)
    centroid = matrix[expanded_idx].mean(axis=0)
    c = float(np.linalg.norm(centroid))
    target_rows = np.array([store.vocab[k] for k in sub.keys], dtype=np.intp)

    scores: dict[str, float] = {}
    best_id: str | None = None
    best_delta: np.ndarray | None = None
    for i, v in enumerate(basis[:MAX_BASIS_CANDIDATES]):
        for sign, tag in ((1.0, f"+{i}"), (-1.0, f"-{i}")):
            delta = c * sign * v - centroid
            moved = matrix[target_rows] + delta
            score = _aggregate_effect(moved, sub.keys, resolved, triples,
                                      store, matrix)
            scores[tag] = score
            if best_id is None or score < scores[best_id]:
                best_id = tag
                best_delta = delta
    return SoftWeatPlan(
        subclass=subclass_name,
        expanded=tuple(expanded),
        selected_attributes=tuple(selected_attr_names),
        selected_pairs=tuple(triples),
        candidate_scores=scores,
        chosen=best_id,
        translation=best_delta,
        skipped=False,
    )


def softweat_plans(store: EmbeddingStore,
                   lexicon: BiasLexicon | ResolvedLexicon,
                   threshold: float = DEFAULT_THRESHOLD,
                   n: int = DEFAULT_NEIGHBORS
                   ) -> tuple[list[SoftWeatPlan], np.ndarray]:
    """Plan every subclass's translation sequentially at full strength.

    Returns the plans plus the accumulated per-row displacement matrix
    (original + displacement = the strength-1 result). Later subclasses
    are planned against earlier subclasses' full-strength translations.
    """
    resolved = _ensure_resolved(store, lexicon)
    work = store.matrix64().copy()
    displacement = np.zeros_like(work)
    plans: list[SoftWeatPlan] = []
    all_terms = {k for s in resolved.subclasses for k in s.keys}
    for sub in resolved.subclasses:
        exclude = all_terms - set(sub.keys)
        expanded = expand_targets(store, sub, n, exclude=exclude)
        attrs, triples = select_biased_attributes(
            resolved, sub.name, threshold, store=store, matrix=work)
        if not triples:
            logger.info("softweat: subclass %r shows no bias above "
                        "threshold %.3g; skipped", sub.name, threshold)
            plans.append(SoftWeatPlan(
                subclass=sub.name, expanded=tuple(expanded),
                selected_attributes=(), selected_pairs=(),
                candidate_scores={}, chosen=None, translation=None,
                skipped=True,
            ))
            continue
        stacked = np.vstack([a.matrix for a in attrs])
        basis = null_space_basis(stacked)
        plan = choose_translation(store, resolved, sub.name, expanded,
                                  triples, basis, work)
        plans.append(plan)
        rows = np.array([store.vocab[k] for k in plan.expanded],
                        dtype=np.intp)
        work[rows] += plan.translation
        displacement[rows] += plan.translation
        logger.info(
            "softweat: subclass %r moved %d words along candidate %s "
            "(score %.4f)", sub.name, len(rows), plan.chosen,
            plan.candidate_scores[plan.chosen],
        )
    return plans, displacement


def apply_displacement(store: EmbeddingStore, displacement: np.ndarray,
                       lam: float) -> EmbeddingStore:
    """Commit a planned displacement matrix at strength ``lam``.

    lam = 0 returns the input store itself; rows with a zero displacement
    keep their exact bit patterns at any lam.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lam must be in [0, 1]")
    if displacement.shape != store.matrix.shape:
        raise ValueError("displacement shape does not match the store")
    if lam == 0.0:
        return store
    out = store.matrix.copy()
    touched = np.flatnonzero(np.any(displacement != 0.0, axis=1))
    if len(touched):
        moved = store.matrix64()[touched] + lam * displacement[touched]
        out[touched] = moved.astype(out.dtype)
    return store.with_matrix(out, normalized=False)


def softweat_debias(store: EmbeddingStore,
                    lexicon: BiasLexicon | ResolvedLexicon,
                    lam: float = DEFAULT_LAMBDA,
                    threshold: float = DEFAULT_THRESHOLD,
                    n: int = DEFAULT_NEIGHBORS) -> EmbeddingStore:
    """Apply the planned translations scaled by ``lam``.

    lam = 0 returns the input store itself; rows outside every expanded
    set keep their exact bit patterns at any lam.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lam must be in [0, 1]")
    if lam == 0.0:
        return store
    _, displacement = softweat_plans(store, lexicon,
                                     threshold=threshold, n=n)
    return apply_displacement(store, displacement, lam)
