"""Bias lexicon: a protected class, its subclasses, and the word sets used
to probe them.

A lexicon file names one class (say, religion) and lists

* subclasses, each with a target set of identity terms;
* equality sets, tuples with exactly one term per subclass that ought to
  be interchangeable (church / mosque / synagogue);
* attribute sets, named word lists the targets are measured against.

All lexicon strings are lowercased on load; the original spelling is kept
so vocabulary lookup can fall back to it once.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import LexiconError, ResolutionError
from .store import EmbeddingStore

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Subclass:
    """One protected group: a name plus its identity terms."""

    name: str
    targets: tuple[str, ...]


@dataclass(frozen=True)
class EqualitySet:
    """One term per subclass, in subclass order."""

    terms: tuple[str, ...]


@dataclass(frozen=True)
class AttributeSet:
    name: str
    words: tuple[str, ...]


@dataclass(frozen=True)
class BiasLexicon:
    class_name: str
    subclasses: tuple[Subclass, ...]
    equality_sets: tuple[EqualitySet, ...]
    attribute_sets: tuple[AttributeSet, ...]
    # lowercased form -> spelling as written in the file, only where they differ
    source_forms: dict[str, str] = field(default_factory=dict, compare=False)

    def subclass_names(self) -> list[str]:
        return [s.name for s in self.subclasses]


# -- loading and validation ----------------------------------------------


def _require(cond: bool, where: str, message: str) -> None:
    if not cond:
        raise LexiconError(f"{where}: {message}")


def _clean_word(raw: object, where: str, source_forms: dict[str, str]) -> str:
    _require(isinstance(raw, str), where, f"expected string, got {type(raw).__name__}")
    word = raw.strip()
    _require(bool(word), where, "empty word")
    _require(not any(c.isspace() for c in word), where,
             f"embedded whitespace in {word!r}")
    lowered = word.lower()
    if lowered != word:
        source_forms.setdefault(lowered, word)
    return lowered


def lexicon_from_dict(doc: dict, origin: str = "<dict>") -> BiasLexicon:
    """Validate a parsed lexicon document; errors name the offending field."""
    _require(isinstance(doc, dict), origin, "top level must be an object")
    for key in ("class", "subclasses", "equality_sets", "attribute_sets"):
        _require(key in doc, origin, f"missing field {key!r}")
    source_forms: dict[str, str] = {}

    _require(isinstance(doc["class"], str) and doc["class"].strip() != "",
             f"{origin}:class", "must be a non-empty string")
    class_name = doc["class"].strip().lower()

    raw_subs = doc["subclasses"]
    _require(isinstance(raw_subs, list) and len(raw_subs) >= 2,
             f"{origin}:subclasses", "need a list of at least 2 subclasses")
    subclasses = []
    for i, entry in enumerate(raw_subs):
        where = f"{origin}:subclasses[{i}]"
        _require(isinstance(entry, dict), where, "must be an object")
        _require("name" in entry and "targets" in entry, where,
                 "needs 'name' and 'targets'")
        name = _clean_word(entry["name"], f"{where}.name", source_forms)
        raw_targets = entry["targets"]
        _require(isinstance(raw_targets, list) and raw_targets,
                 f"{where}.targets", "must be a non-empty list")
        targets = tuple(
            _clean_word(w, f"{where}.targets[{j}]", source_forms)
            for j, w in enumerate(raw_targets)
        )
        _require(len(set(targets)) == len(targets), f"{where}.targets",
                 "duplicate terms")
        subclasses.append(Subclass(name=name, targets=targets))
    names = [s.name for s in subclasses]
    _require(len(set(names)) == len(names), f"{origin}:subclasses",
             "subclass names must be unique")

    raw_eq = doc["equality_sets"]
    _require(isinstance(raw_eq, list), f"{origin}:equality_sets", "must be a list")
    equality_sets = []
    for i, entry in enumerate(raw_eq):
        where = f"{origin}:equality_sets[{i}]"
        _require(isinstance(entry, list), where, "must be a list of terms")
        _require(
            len(entry) == len(subclasses), where,
            f"has {len(entry)} terms but there are {len(subclasses)} subclasses",
        )
        terms = tuple(
            _clean_word(w, f"{where}[{j}]", source_forms)
            for j, w in enumerate(entry)
        )
        equality_sets.append(EqualitySet(terms=terms))

    raw_attr = doc["attribute_sets"]
    _require(isinstance(raw_attr, list) and raw_attr,
             f"{origin}:attribute_sets", "need a non-empty list")
    attribute_sets = []
    for i, entry in enumerate(raw_attr):
        where = f"{origin}:attribute_sets[{i}]"
        _require(isinstance(entry, dict), where, "must be an object")
        _require("name" in entry and "words" in entry, where,
                 "needs 'name' and 'words'")
        name = _clean_word(entry["name"], f"{where}.name", source_forms)
        raw_words = entry["words"]
        _require(isinstance(raw_words, list) and raw_words,
                 f"{where}.words", "must be a non-empty list")
        words = tuple(
            _clean_word(w, f"{where}.words[{j}]", source_forms)
            for j, w in enumerate(raw_words)
        )
        attribute_sets.append(AttributeSet(name=name, words=words))
    attr_names = [a.name for a in attribute_sets]
    _require(len(set(attr_names)) == len(attr_names), f"{origin}:attribute_sets",
             "attribute set names must be unique")

    return BiasLexicon(
        class_name=class_name,
        subclasses=tuple(subclasses),
        equality_sets=tuple(equality_sets),
        attribute_sets=tuple(attribute_sets),
        source_forms=source_forms,
    )


def load_lexicon(path: str | Path) -> BiasLexicon:
    """Load and validate a JSON lexicon file."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise LexiconError(f"cannot open lexicon {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise LexiconError(f"{path}: invalid JSON: {exc}") from exc
    return lexicon_from_dict(doc, origin=str(path))


def bundled_lexicon_path() -> Path:
    """The religion lexicon shipped with the package."""
    return Path(str(resources.files("fairvec") / "data" / "religion.json"))


# -- resolution against a store ------------------------------------------


@dataclass(frozen=True)
class ResolvedSet:
    """A word set with every surviving word tied to its embedding row.

    ``words`` are the lexicon forms, ``keys`` the store tokens they matched
    (these differ only when the original-casing fallback fired), ``indices``
    the matrix rows, and ``matrix`` float64 copies of the vectors.
    """

    name: str
    words: tuple[str, ...]
    keys: tuple[str, ...]
    indices: np.ndarray
    matrix: np.ndarray

    def __len__(self) -> int:
        return len(self.words)


@dataclass(frozen=True)
class ResolvedEqualitySet:
    """An equality set whose every member resolved (partial sets are dropped)."""

    terms: tuple[str, ...]
    keys: tuple[str, ...]
    indices: np.ndarray
    matrix: np.ndarray


@dataclass
class DropReport:
    """What resolution had to discard, by set."""

    targets: dict[str, list[str]] = field(default_factory=dict)
    attributes: dict[str, list[str]] = field(default_factory=dict)
    equality_sets: list[tuple[str, ...]] = field(default_factory=list)

    @property
    def total(self) -> int:
        return (sum(len(v) for v in self.targets.values())
                + sum(len(v) for v in self.attributes.values())
                + len(self.equality_sets))

    def as_dict(self) -> dict:
        return {
            "targets": {k: list(v) for k, v in self.targets.items()},
            "attributes": {k: list(v) for k, v in self.attributes.items()},
            "equality_sets": [list(t) for t in self.equality_sets],
            "total": self.total,
        }


@dataclass(frozen=True)
class ResolvedLexicon:
    class_name: str
    subclasses: tuple[ResolvedSet, ...]
    equality_sets: tuple[ResolvedEqualitySet, ...]
    attribute_sets: tuple[ResolvedSet, ...]
    drops: DropReport

    def subclass_names(self) -> list[str]:
        return [s.name for s in self.subclasses]

    def subclass(self, name: str) -> ResolvedSet:
        for s in self.subclasses:
            if s.name == name:
                return s
        raise KeyError(name)

    def attribute_set(self, name: str) -> ResolvedSet:
        for a in self.attribute_sets:
            if a.name == name:
                return a
        raise KeyError(name)


def _lookup_key(lexicon: BiasLexicon, store: EmbeddingStore,
                word: str) -> str | None:
    """Matching policy: lowercased form first, original spelling second."""
    if word in store.vocab:
        return word
    original = lexicon.source_forms.get(word)
    if original is not None and original in store.vocab:
        return original
    return None


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _resolved_set(name: str, words: tuple[str, ...], keys: list[str | None],
                  store: EmbeddingStore) -> ResolvedSet:
    kept_words = tuple(w for w, k in zip(words, keys) if k is not None)
    kept_keys = tuple(k for k in keys if k is not None)
    indices = np.array([store.vocab[k] for k in kept_keys], dtype=np.intp)
    matrix = (store.matrix[indices].astype(np.float64) if len(indices)
              else np.empty((0, store.dim)))
    return ResolvedSet(name=name, words=kept_words, keys=kept_keys,
                       indices=_freeze(indices), matrix=_freeze(matrix))


def resolve(lexicon: BiasLexicon, store: EmbeddingStore) -> ResolvedLexicon:
    """Tie every lexicon word to its embedding row.

    Out-of-vocabulary words are dropped from their set with a warning;
    an equality set missing any member is dropped whole. A subclass whose
    target set empties out, or a lexicon with no surviving equality set,
    is unusable and raises ResolutionError.
    """
    drops = DropReport()

    subclasses = []
    for sub in lexicon.subclasses:
        keys = [_lookup_key(lexicon, store, w) for w in sub.targets]
        missing = [w for w, k in zip(sub.targets, keys) if k is None]
        if missing:
            drops.targets[sub.name] = missing
            logger.warning(
                "subclass %r: dropped %d of %d target terms: %s",
                sub.name, len(missing), len(sub.targets), ", ".join(missing),
            )
        resolved = _resolved_set(sub.name, sub.targets, keys, store)
        if len(resolved) == 0:
            raise ResolutionError(
                f"subclass {sub.name!r} has no in-vocabulary target terms"
            )
        subclasses.append(resolved)

    equality_sets = []
    for eq in lexicon.equality_sets:
        keys = [_lookup_key(lexicon, store, w) for w in eq.terms]
        if any(k is None for k in keys):
            drops.equality_sets.append(eq.terms)
            missing = [w for w, k in zip(eq.terms, keys) if k is None]
            logger.warning(
                "equality set %s dropped: missing %s",
                "/".join(eq.terms), ", ".join(missing),
            )
            continue
        indices = np.array([store.vocab[k] for k in keys], dtype=np.intp)
        equality_sets.append(ResolvedEqualitySet(
            terms=eq.terms,
            keys=tuple(keys),
            indices=_freeze(indices),
            matrix=_freeze(store.matrix[indices].astype(np.float64)),
        ))
    if not equality_sets:
        raise ResolutionError(
            "no equality set survived resolution; the lexicon cannot be "
            "used against this vocabulary"
        )

    attribute_sets = []
    for attr in lexicon.attribute_sets:
        keys = [_lookup_key(lexicon, store, w) for w in attr.words]
        missing = [w for w, k in zip(attr.words, keys) if k is None]
        if missing:
            drops.attributes[attr.name] = missing
            logger.warning(
                "attribute set %r: dropped %d of %d words",
                attr.name, len(missing), len(attr.words),
            )
        resolved = _resolved_set(attr.name, attr.words, keys, store)
        if len(resolved) == 0:
            raise ResolutionError(
                f"attribute set {attr.name!r} has no in-vocabulary words"
            )
        attribute_sets.append(resolved)

    return ResolvedLexicon(
        class_name=lexicon.class_name,
        subclasses=tuple(subclasses),
        equality_sets=tuple(equality_sets),
        attribute_sets=tuple(attribute_sets),
        drops=drops,
    )
