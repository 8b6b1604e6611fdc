"""Dense word-embedding storage and file I/O.

Two on-disk formats are supported:

* text: one word per line, ``<token> <f1> ... <fd>``, single-space separated
  (the de-facto GloVe layout);
* binary: an ASCII header ``<vocab_size> <dim>\\n`` followed by entries of
  token bytes, a single space, and ``dim`` little-endian float32 values,
  each optionally followed by a newline (the classic word2vec layout).

A loaded store is immutable (its matrix is marked read-only); every
transform in this package returns a new store.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError

logger = logging.getLogger(__name__)

GLOVE_TEXT = "glove-text"
WORD2VEC_BINARY = "word2vec-binary"
FORMATS = (GLOVE_TEXT, WORD2VEC_BINARY)

# Norm tolerance for rows of a store that claims to be normalized.
UNIT_NORM_TOL = 1e-6


@dataclass(frozen=True)
class WordVector:
    """A single token and its embedding row."""

    word: str
    values: np.ndarray


@dataclass
class EmbeddingStore:
    """Vocabulary plus an n x d matrix of embedding rows.

    ``vocab`` maps each token to its row index; indices are dense and follow
    insertion order. ``zero_rows`` flags rows that are exactly zero and were
    therefore left untouched by normalization.
    """

    vocab: dict[str, int]
    matrix: np.ndarray
    normalized: bool = False
    zero_rows: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        self.matrix = np.atleast_2d(np.asarray(self.matrix))
        if self.matrix.shape[0] != len(self.vocab):
            raise ValueError(
                f"vocab has {len(self.vocab)} entries but matrix has "
                f"{self.matrix.shape[0]} rows"
            )
        if self.matrix.shape[1] < 1:
            raise ValueError("embedding dimension must be >= 1")
        indices = sorted(self.vocab.values())
        if indices != list(range(len(self.vocab))):
            raise ValueError("vocab indices must be unique and dense from 0")
        self.matrix.setflags(write=False)

    # -- basic queries ---------------------------------------------------

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])

    def __len__(self) -> int:
        return len(self.vocab)

    def __contains__(self, word: str) -> bool:
        return word in self.vocab

    def words(self) -> list[str]:
        """Tokens in row order."""
        return list(self.vocab)

    def index(self, word: str) -> int | None:
        return self.vocab.get(word)

    def get(self, word: str) -> np.ndarray | None:
        """The stored row for ``word`` (a read-only view), or None.

        Lookup is case-sensitive; callers that want the
        lowercase-then-original fallback should go through lexicon
        resolution.
        """
        i = self.vocab.get(word)
        if i is None:
            return None
        return self.matrix[i]

    def word_vector(self, word: str) -> WordVector | None:
        row = self.get(word)
        if row is None:
            return None
        return WordVector(word, row)

    def matrix64(self) -> np.ndarray:
        """The matrix as float64 (cached; the same array when already float64)."""
        cached = getattr(self, "_matrix64", None)
        if cached is None:
            cached = np.asarray(self.matrix, dtype=np.float64)
            cached.setflags(write=False)
            object.__setattr__(self, "_matrix64", cached)
        return cached

    def row_norms(self) -> np.ndarray:
        """Euclidean norm of every row (cached; safe because rows are frozen)."""
        norms = getattr(self, "_row_norms", None)
        if norms is None:
            norms = np.linalg.norm(self.matrix64(), axis=1)
            object.__setattr__(self, "_row_norms", norms)
        return norms

    def validate(self) -> None:
        """Check the declared invariants; raises ValueError on violation."""
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("matrix contains non-finite entries")
        if self.normalized:
            norms = self.row_norms()
            keep = np.ones(len(norms), dtype=bool)
            for i in self.zero_rows:
                keep[i] = False
            if len(norms) and not np.all(np.abs(norms[keep] - 1.0) < UNIT_NORM_TOL):
                raise ValueError("normalized store has rows far from unit norm")

    def with_matrix(self, matrix: np.ndarray, *, normalized: bool = False,
                    zero_rows: frozenset[int] | None = None) -> "EmbeddingStore":
        """A new store sharing this vocabulary with a replacement matrix."""
        return EmbeddingStore(
            vocab=dict(self.vocab),
            matrix=matrix,
            normalized=normalized,
            zero_rows=self.zero_rows if zero_rows is None else zero_rows,
        )


def store_from_pairs(pairs: list[tuple[str, np.ndarray]], *,
                     normalized: bool = False) -> EmbeddingStore:
    """Build a store from (word, vector) pairs, mostly for tests and demos."""
    vocab = {w: i for i, (w, _) in enumerate(pairs)}
    if len(vocab) != len(pairs):
        raise ValueError("duplicate words in pairs")
    matrix = np.vstack([np.asarray(v, dtype=np.float64) for _, v in pairs])
    return EmbeddingStore(vocab=vocab, matrix=matrix, normalized=normalized)


# -- loading -------------------------------------------------------------


def load_glove_text(path: str | Path, limit: int | None = None) -> EmbeddingStore:
    """Load a text-format embedding file.

    The first data line fixes the dimension; later lines of a different
    dimension raise a FormatError naming the offending line. Duplicate
    tokens keep their first occurrence. ``limit`` stops after that many
    distinct words.
    """
    path = Path(path)
    vocab: dict[str, int] = {}
    rows: list[np.ndarray] = []
    dim: int | None = None
    duplicates = 0
    try:
        fh = open(path, "r", encoding="utf-8", errors="replace", newline=None)
    except OSError as exc:
        raise FormatError(f"cannot open embedding file {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            token, _, rest = line.partition(" ")
            if not token:
                raise FormatError(f"{path}:{lineno}: empty token")
            fields = rest.split()
            if not fields:
                raise FormatError(f"{path}:{lineno}: no vector values")
            try:
                values = np.array(fields, dtype=np.float64)
            except ValueError as exc:
                raise FormatError(
                    f"{path}:{lineno}: unparseable value ({exc})"
                ) from exc
            if dim is None:
                dim = int(values.size)
            elif values.size != dim:
                raise FormatError(
                    f"{path}:{lineno}: expected {dim} values, got {values.size}"
                )
            if not np.all(np.isfinite(values)):
                raise FormatError(f"{path}:{lineno}: non-finite value")
            if token in vocab:
                duplicates += 1
                continue
            vocab[token] = len(rows)
            rows.append(values)
            if limit is not None and len(rows) >= limit:
                break
    if not rows:
        raise FormatError(f"{path}: no embedding rows found")
    store = EmbeddingStore(vocab=vocab, matrix=np.vstack(rows))
    logger.info(
        "loaded embeddings path=%s format=%s words=%d dim=%d dropped_duplicates=%d",
        path, GLOVE_TEXT, len(store), store.dim, duplicates,
    )
    return store


def load_word2vec_binary(path: str | Path, limit: int | None = None) -> EmbeddingStore:
    """Load a binary-format embedding file.

    Keeps float32 storage so that later lookups and binary saves are
    byte-identical to the file contents. Truncated files raise a
    FormatError carrying the byte offset where data ran out.
    """
    path = Path(path)
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot open embedding file {path}: {exc}") from exc

    nl = data.find(b"\n")
    if nl < 0:
        raise FormatError(f"{path}: missing header line")
    header = data[:nl].split()
    if len(header) != 2:
        raise FormatError(f"{path}: header must be '<vocab_size> <dim>'")
    try:
        vocab_size, dim = int(header[0]), int(header[1])
    except ValueError as exc:
        raise FormatError(f"{path}: unparseable header {header!r}") from exc
    if vocab_size < 1 or dim < 1:
        raise FormatError(f"{path}: header values must be positive")

    target = vocab_size if limit is None else min(vocab_size, limit)
    vocab: dict[str, int] = {}
    rows: list[np.ndarray] = []
    duplicates = 0
    entries_read = 0
    offset = nl + 1
    vec_bytes = 4 * dim
    while entries_read < target:
        while offset < len(data) and data[offset] in (0x0A, 0x0D):
            offset += 1
        sp = data.find(b" ", offset)
        if sp < 0 or sp + vec_bytes > len(data):
            raise FormatError(
                f"{path}: truncated at byte {offset}: "
                f"{entries_read} of {target} entries read"
            )
        token = data[offset:sp].decode("utf-8", errors="replace")
        values = np.frombuffer(data, dtype="<f4", count=dim, offset=sp + 1)
        if not np.all(np.isfinite(values)):
            raise FormatError(f"{path}: non-finite value in entry at byte {offset}")
        offset = sp + 1 + vec_bytes
        entries_read += 1
        if token in vocab:
            duplicates += 1
            continue
        vocab[token] = len(rows)
        rows.append(values)
    store = EmbeddingStore(vocab=vocab, matrix=np.vstack(rows))
    logger.info(
        "loaded embeddings path=%s format=%s words=%d dim=%d dropped_duplicates=%d",
        path, WORD2VEC_BINARY, len(store), store.dim, duplicates,
    )
    return store


def load_embeddings(path: str | Path, fmt: str,
                    limit: int | None = None) -> EmbeddingStore:
    if fmt == GLOVE_TEXT:
        return load_glove_text(path, limit=limit)
    if fmt == WORD2VEC_BINARY:
        return load_word2vec_binary(path, limit=limit)
    raise FormatError(f"unknown embedding format {fmt!r}")


# -- saving --------------------------------------------------------------


def save_embeddings(store: EmbeddingStore, path: str | Path, fmt: str) -> None:
    """Write a store in the requested format.

    Binary writes round-trip bit-exactly at float32 precision; text writes
    carry 8 significant digits.
    """
    path = Path(path)
    try:
        if fmt == GLOVE_TEXT:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                for word, i in store.vocab.items():
                    row = " ".join(f"{v:.8g}" for v in store.matrix[i])
                    fh.write(f"{word} {row}\n")
        elif fmt == WORD2VEC_BINARY:
            with open(path, "wb") as fh:
                fh.write(f"{len(store)} {store.dim}\n".encode("utf-8"))
                mat32 = store.matrix.astype("<f4")
                for word, i in store.vocab.items():
                    fh.write(word.encode("utf-8") + b" ")
                    fh.write(mat32[i].tobytes())
                    fh.write(b"\n")
        else:
            raise FormatError(f"unknown embedding format {fmt!r}")
    except OSError as exc:
        raise FormatError(f"cannot write embedding file {path}: {exc}") from exc


# -- normalization -------------------------------------------------------


def normalize_all(store: EmbeddingStore) -> EmbeddingStore:
    """Scale every nonzero row to unit Euclidean norm.

    Zero rows are left as-is and flagged in ``zero_rows``. Already-normalized
    stores are returned unchanged, which makes the operation idempotent.
    """
    if store.normalized:
        return store
    matrix = store.matrix.astype(np.float64)
    norms = np.linalg.norm(matrix, axis=1)
    zero = norms == 0.0
    safe = np.where(zero, 1.0, norms)
    matrix = matrix / safe[:, None]
    zero_rows = frozenset(int(i) for i in np.flatnonzero(zero))
    if zero_rows:
        logger.warning("normalize_all: %d zero rows left unscaled", len(zero_rows))
    return store.with_matrix(matrix, normalized=True, zero_rows=zero_rows)


def resolve_token(store: EmbeddingStore, lowercased: str,
                  original: str | None = None) -> np.ndarray | None:
    """Token-matching policy: exact lowercase lookup, then one fallback
    with the original casing."""
    row = store.get(lowercased)
    if row is None and original is not None and original != lowercased:
        row = store.get(original)
    return row
