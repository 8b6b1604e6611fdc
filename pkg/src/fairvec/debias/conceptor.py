"""Conceptor debiasing: a soft projection learned from bias-word vectors.

The conceptor C of a word-vector collection is a shrunk identity map
whose eigenvalues lie in [0, 1): directions with lots of energy in the
collection get values near 1, unused directions near 0. Applying the
negated map (I - C) to the whole vocabulary dampens exactly the
high-energy bias directions while leaving orthogonal structure intact.
The aperture parameter alpha controls how aggressively energy saturates
toward 1.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DegenerateInputError, FormatError
from ..lexicon import BiasLexicon, ResolvedLexicon
from ..store import EmbeddingStore
from ..rnsb import _ensure_resolved

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = 10.0


@dataclass(frozen=True)
class Conceptor:
    """Symmetric d x d soft-projection matrix with eigenvalues in [0, 1)."""

    matrix: np.ndarray
    alpha: float
    source_word_count: int

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])


def correlation_matrix(vectors, centered: bool = False) -> np.ndarray:
    """Uncentered second-moment matrix X^T X / n of the row vectors.

    ``centered`` subtracts the column means first, turning this into a
    covariance matrix; the default matches the conceptor convention.
    """
    X = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    if len(X) < 1:
        raise DegenerateInputError("need at least one vector")
    if centered:
        X = X - X.mean(axis=0)
    R = X.T @ X / len(X)
    # exact symmetry regardless of BLAS rounding
    return (R + R.T) / 2.0


def compute_conceptor(R, alpha: float = DEFAULT_ALPHA,
                      source_word_count: int = 0) -> Conceptor:
    """C = R (R + alpha^-2 I)^-1 via eigendecomposition.

    Each eigenvalue sigma of R maps to sigma / (sigma + alpha^-2), keeping
    eigenvectors; tiny negative sigmas from rounding are clamped to 0.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    R = np.asarray(R, dtype=np.float64)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ValueError(f"R must be square, got shape {R.shape}")
    if not np.all(np.isfinite(R)):
        raise ValueError("R contains non-finite entries")
    eigvals, eigvecs = np.linalg.eigh((R + R.T) / 2.0)
    sigma = np.maximum(eigvals, 0.0)
    mapped = sigma / (sigma + alpha ** -2)
    C = (eigvecs * mapped) @ eigvecs.T
    C = (C + C.T) / 2.0
    C.setflags(write=False)
    return Conceptor(matrix=C, alpha=float(alpha),
                     source_word_count=source_word_count)


def apply_negated(store: EmbeddingStore, conceptor: Conceptor
                  ) -> EmbeddingStore:
    """Replace every row x by (I - C) x. No renormalization afterwards:
    the point is to shrink the captured directions."""
    if conceptor.dim != store.dim:
        raise ValueError(
            f"conceptor dimension {conceptor.dim} does not match store "
            f"dimension {store.dim}"
        )
    matrix = store.matrix64()
    out = matrix - matrix @ conceptor.matrix.T
    return store.with_matrix(out, normalized=False)


def conceptor_debias(store: EmbeddingStore,
                     lexicon: BiasLexicon | ResolvedLexicon,
                     alpha: float = DEFAULT_ALPHA,
                     centered: bool = False) -> EmbeddingStore:
    """Debias the whole vocabulary using the lexicon's identity terms.

    The conceptor is computed from the union of all subclass target terms
    and equality-set terms, then applied negated to every row.
    """
    resolved = _ensure_resolved(store, lexicon)
    indices: set[int] = set()
    for sub in resolved.subclasses:
        indices.update(int(i) for i in sub.indices)
    for es in resolved.equality_sets:
        indices.update(int(i) for i in es.indices)
    if not indices:
        raise DegenerateInputError("no bias words to build a conceptor from")
    rows = store.matrix64()[sorted(indices)]
    R = correlation_matrix(rows, centered=centered)
    conceptor = compute_conceptor(R, alpha=alpha,
                                  source_word_count=len(indices))
    logger.info(
        "conceptor debias: %d bias words, alpha=%g, dim=%d",
        len(indices), alpha, store.dim,
    )
    return apply_negated(store, conceptor)


# -- persistence ---------------------------------------------------------


def save_conceptor(conceptor: Conceptor, path: str | Path) -> None:
    """Write ``<dim> <alpha>\\n`` followed by the matrix as row-major
    little-endian float64. The source word count is not persisted."""
    path = Path(path)
    try:
        with open(path, "wb") as fh:
            fh.write(f"{conceptor.dim} {conceptor.alpha!r}\n".encode("ascii"))
            fh.write(np.ascontiguousarray(
                conceptor.matrix, dtype="<f8").tobytes())
    except OSError as exc:
        raise FormatError(f"cannot write conceptor file {path}: {exc}") from exc


def load_conceptor(path: str | Path) -> Conceptor:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot open conceptor file {path}: {exc}") from exc
    nl = data.find(b"\n")
    if nl < 0:
        raise FormatError(f"{path}: missing header line")
    header = data[:nl].split()
    if len(header) != 2:
        raise FormatError(f"{path}: header must be '<dim> <alpha>'")
    try:
        dim = int(header[0])
        alpha = float(header[1])
    except ValueError as exc:
        raise FormatError(f"{path}: unparseable header {header!r}") from exc
    expected = dim * dim * 8
    body = data[nl + 1:]
    if len(body) != expected:
        raise FormatError(
            f"{path}: expected {expected} matrix bytes, found {len(body)}"
        )
    matrix = np.frombuffer(body, dtype="<f8").reshape(dim, dim).copy()
    matrix.setflags(write=False)
    return Conceptor(matrix=matrix, alpha=alpha, source_word_count=0)
