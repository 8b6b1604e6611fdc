"""Hard debiasing: neutralize and equalize.

The bias subspace is estimated from equality sets: each set is centered,
the deviations of its members from the center are stacked, and the top
principal components of that stack form the subspace. Every word outside
the identity lists then has its subspace component removed outright
(neutralize); the members of each equality set are rewritten so they
share one out-of-subspace component and differ only inside the subspace,
at equal magnitude (equalize). Afterward a neutral word is exactly as
close to one subclass's term as to another's.

All operations assume unit-norm vectors; the pipeline entry point
normalizes first.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateInputError
from ..lexicon import BiasLexicon, ResolvedLexicon
from ..store import EmbeddingStore, normalize_all
from ..rnsb import _ensure_resolved

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class BiasSubspace:
    """Orthonormal basis (rows) of the estimated bias directions."""

    basis: np.ndarray
    explained_variance: np.ndarray

    @property
    def k(self) -> int:
        return int(self.basis.shape[0])

    def project(self, rows: np.ndarray) -> np.ndarray:
        """Component of each row inside the subspace."""
        return (rows @ self.basis.T) @ self.basis


@dataclass(frozen=True)
class HardDebiasDetails:
    subspace: BiasSubspace
    k_requested: int
    preserve_count: int
    neutralized_count: int
    neutralize_degenerates: tuple[str, ...]
    equalize_degenerates: tuple[str, ...]


def _set_matrices(equality_sets) -> list[np.ndarray]:
    return [np.asarray(getattr(es, "matrix", es), dtype=np.float64)
            for es in equality_sets]


def identify_bias_subspace(equality_sets, k: int) -> BiasSubspace:
    """Top-k principal directions of within-equality-set deviations.

    Accepts resolved equality sets or raw per-set matrices. ``k`` is
    clamped (with a warning) when it exceeds the rank of the deviation
    stack; a stack with no spread at all is degenerate.
    """
    matrices = _set_matrices(equality_sets)
    if not matrices:
        raise DegenerateInputError("need at least one equality set")
    diffs = []
    for m in matrices:
        center = m.mean(axis=0)
        diffs.append(m - center)
    stacked = np.vstack(diffs)
    d = stacked.shape[1]
    if k < 1 or k > d:
        raise ValueError(f"k must be in [1, {d}], got {k}")
    if not np.any(stacked):
        raise DegenerateInputError(
            "every equality set has identical members; no bias direction "
            "to estimate"
        )
    centered = stacked - stacked.mean(axis=0)
    cov = centered.T @ centered / len(centered)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]
    rank = int(np.sum(eigvals > max(eigvals[0], 0.0) * 1e-12))
    if rank == 0:
        raise DegenerateInputError("deviation stack has zero variance")
    if k > rank:
        logger.warning(
            "bias subspace: k=%d exceeds deviation rank %d; clamping", k, rank)
        k = rank
    basis = eigvecs[:, :k].T.copy()
    basis.setflags(write=False)
    variance = eigvals[:k].copy()
    variance.setflags(write=False)
    return BiasSubspace(basis=basis, explained_variance=variance)


def _neutralize_matrix(matrix: np.ndarray, subspace: BiasSubspace,
                       preserve_idx: np.ndarray
                       ) -> tuple[np.ndarray, np.ndarray]:
    """Remove the subspace component from every non-preserved row.

    Returns the new matrix and the indices of rows whose residual was too
    small to renormalize (left unchanged).
    """
    out = matrix.astype(np.float64)
    neutral = np.ones(len(out), dtype=bool)
    neutral[preserve_idx] = False
    resid = out[neutral] - subspace.project(out[neutral])
    norms = np.linalg.norm(resid, axis=1)
    ok = norms >= RESIDUAL_TOL
    neutral_idx = np.flatnonzero(neutral)
    rows_ok = neutral_idx[ok]
    out[rows_ok] = resid[ok] / norms[ok, None]
    degenerate = neutral_idx[~ok]
    return out, degenerate


def neutralize(store: EmbeddingStore, subspace: BiasSubspace,
               preserve: set[str] | frozenset[str]) -> EmbeddingStore:
    """Project the subspace component out of every word not in ``preserve``
    and renormalize.

    Words lying (almost) entirely inside the subspace cannot be
    renormalized; they are left unchanged and logged.
    """
    if not store.normalized:
        raise ValueError("neutralize expects a normalized store")
    preserve_idx = np.array(
        sorted(store.vocab[w] for w in preserve if w in store.vocab),
        dtype=np.intp)
    out, degenerate = _neutralize_matrix(store.matrix64(), subspace,
                                         preserve_idx)
    if len(degenerate):
        words = store.words()
        logger.warning(
            "neutralize: %d words lie inside the bias subspace and were "
            "left unchanged: %s",
            len(degenerate),
            ", ".join(words[i] for i in degenerate[:10]),
        )
    return store.with_matrix(out, normalized=True)


def _equalize_matrix(matrix: np.ndarray, subspace: BiasSubspace,
                     index_sets: list[np.ndarray]
                     ) -> tuple[np.ndarray, list[int]]:
    out = matrix.astype(np.float64)
    degenerate: list[int] = []
    for indices in index_sets:
        rows = out[indices]
        mu = rows.mean(axis=0)
        mu_proj = subspace.project(mu[None, :])[0]
        nu = mu - mu_proj
        nu_norm_sq = float(np.dot(nu, nu))
        if nu_norm_sq > 1.0:
            logger.warning(
                "equalize: off-subspace center norm %.6f exceeds 1; "
                "in-subspace component collapsed to zero", nu_norm_sq ** 0.5)
            factor = 0.0
        else:
            factor = float(np.sqrt(1.0 - nu_norm_sq))
        proj = subspace.project(rows)
        dev = proj - mu_proj
        dev_norms = np.linalg.norm(dev, axis=1)
        for j, idx in enumerate(indices):
            if dev_norms[j] < RESIDUAL_TOL:
                degenerate.append(int(idx))
                nu_norm = float(np.sqrt(nu_norm_sq))
                if nu_norm > 0:
                    out[idx] = nu / nu_norm
                continue
            out[idx] = nu + factor * dev[j] / dev_norms[j]
    return out, degenerate


def equalize(store: EmbeddingStore, subspace: BiasSubspace,
             equality_sets) -> EmbeddingStore:
    """Rewrite each equality set so members share their out-of-subspace
    part and keep equal-magnitude in-subspace deviations.

    ``equality_sets`` supplies row indices (resolved sets); the vectors
    are taken from the store being transformed, not from resolution time.
    """
    if not store.normalized:
        raise ValueError("equalize expects a normalized store")
    index_sets = [np.asarray(es.indices, dtype=np.intp) for es in equality_sets]
    out, degenerate = _equalize_matrix(store.matrix64(), subspace, index_sets)
    if degenerate:
        words = store.words()
        logger.warning(
            "equalize: %d terms had no in-subspace deviation: %s",
            len(degenerate), ", ".join(words[i] for i in degenerate[:10]))
    return store.with_matrix(out, normalized=True)


def _preserve_keys(resolved: ResolvedLexicon) -> set[str]:
    keys: set[str] = set()
    for sub in resolved.subclasses:
        keys.update(sub.keys)
    for es in resolved.equality_sets:
        keys.update(es.keys)
    return keys


def hard_debias_details(store: EmbeddingStore,
                        lexicon: BiasLexicon | ResolvedLexicon,
                        k: int | None = None
                        ) -> tuple[EmbeddingStore, HardDebiasDetails]:
    """Full pipeline returning the transformed store plus diagnostics."""
    normalized = normalize_all(store)
    resolved = _ensure_resolved(normalized, lexicon)
    if k is None:
        k = max(1, len(resolved.subclasses) - 1)
    matrix = normalized.matrix64()
    set_matrices = [matrix[es.indices] for es in resolved.equality_sets]
    subspace = identify_bias_subspace(set_matrices, k)

    preserve = _preserve_keys(resolved)
    preserve_idx = np.array(
        sorted(normalized.vocab[w] for w in preserve if w in normalized.vocab),
        dtype=np.intp)
    out, neut_degenerate = _neutralize_matrix(matrix, subspace, preserve_idx)
    index_sets = [np.asarray(es.indices, dtype=np.intp)
                  for es in resolved.equality_sets]
    out, eq_degenerate = _equalize_matrix(out, subspace, index_sets)

    words = normalized.words()
    details = HardDebiasDetails(
        subspace=subspace,
        k_requested=k,
        preserve_count=len(preserve_idx),
        neutralized_count=len(normalized) - len(preserve_idx)
        - len(neut_degenerate),
        neutralize_degenerates=tuple(words[i] for i in neut_degenerate),
        equalize_degenerates=tuple(words[i] for i in eq_degenerate),
    )
    if details.neutralize_degenerates:
        logger.warning("hard debias: %d words could not be neutralized",
                       len(details.neutralize_degenerates))
    result = normalized.with_matrix(out, normalized=True)
    return result, details


def hard_debias(store: EmbeddingStore,
                lexicon: BiasLexicon | ResolvedLexicon,
                k: int | None = None) -> EmbeddingStore:
    """Normalize, estimate the bias subspace, neutralize, equalize."""
    result, _ = hard_debias_details(store, lexicon, k)
    return result
