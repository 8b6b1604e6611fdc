"""Sentiment-classifier bias probe.

A logistic regression is trained to separate positive from negative
sentiment words by their embedding vectors alone. Each subclass's identity
terms are then scored for predicted negative sentiment; the per-subclass
means, normalized into a distribution, are compared against the uniform
distribution by KL divergence. An unbiased embedding spreads negativity
evenly and scores 0.

The headline number averages many training runs over reshuffled splits;
a one-tailed location test compares run populations before and after
debiasing.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.special import betainc, expit

from .errors import DegenerateInputError, LexiconError, ResolutionError
from .lexicon import BiasLexicon, ResolvedLexicon, resolve
from .parallel import parallel_map
from .store import EmbeddingStore

logger = logging.getLogger(__name__)

MIN_WORDS_PER_POLARITY = 10
DISTRIBUTION_TOL = 1e-9


@dataclass(frozen=True)
class SentimentLexicon:
    """Positive and negative word lists, disjoint after lowercasing."""

    positive: tuple[str, ...]
    negative: tuple[str, ...]
    # lowercased form -> spelling as written in the file, where they differ
    source_forms: dict[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if not self.positive or not self.negative:
            raise LexiconError("both sentiment word lists must be non-empty")
        overlap = set(self.positive) & set(self.negative)
        if overlap:
            sample = ", ".join(sorted(overlap)[:5])
            raise LexiconError(
                f"sentiment lists overlap after lowercasing: {sample}"
            )


@dataclass(frozen=True)
class TrainConfig:
    """Gradient-descent hyperparameters for the sentiment classifier."""

    learning_rate: float = 0.1
    l2: float = 1e-3
    epochs: int = 1000
    grad_tol: float = 1e-8

    def as_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "l2": self.l2,
            "epochs": self.epochs,
            "grad_tol": self.grad_tol,
        }


@dataclass(frozen=True)
class LogisticModel:
    """Trained sentiment classifier; label 1 means negative sentiment."""

    weights: np.ndarray
    bias: float
    train_accuracy: float
    test_accuracy: float
    converged: bool
    loss_history: tuple[float, ...]
    seed: int
    n_train: int
    n_test: int


@dataclass(frozen=True)
class RnsbResult:
    kl: float
    kl_std: float
    per_run_kl: tuple[float, ...]
    per_subclass_negative_prob: dict[str, float]
    distribution_P: dict[str, float]
    runs: int
    base_seed: int
    per_term: bool
    config: TrainConfig


@dataclass(frozen=True)
class TTestResult:
    t: float
    p: float
    df: float


# -- sentiment lexicon I/O -----------------------------------------------


def _read_word_list(path: Path) -> tuple[list[str], dict[str, str]]:
    words: list[str] = []
    forms: dict[str, str] = {}
    seen: set[str] = set()
    try:
        text = path.read_text(encoding="utf-8", errors="replace")
    except OSError as exc:
        raise LexiconError(f"cannot open sentiment list {path}: {exc}") from exc
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        lowered = line.lower()
        if lowered in seen:
            continue
        seen.add(lowered)
        words.append(lowered)
        if lowered != line:
            forms.setdefault(lowered, line)
    return words, forms


def load_sentiment_lexicon(positive_path: str | Path,
                           negative_path: str | Path) -> SentimentLexicon:
    """Load two one-word-per-line files; ';' comment lines are skipped."""
    pos, pos_forms = _read_word_list(Path(positive_path))
    neg, neg_forms = _read_word_list(Path(negative_path))
    return SentimentLexicon(
        positive=tuple(pos),
        negative=tuple(neg),
        source_forms={**pos_forms, **neg_forms},
    )


def bundled_sentiment_paths() -> tuple[Path, Path]:
    """The sentiment word lists shipped with the package."""
    data = resources.files("fairvec") / "data"
    return Path(str(data / "positive-words.txt")), Path(str(data / "negative-words.txt"))


# -- logistic regression -------------------------------------------------


def loss_and_grad(weights: np.ndarray, bias: float, X: np.ndarray,
                  y: np.ndarray, l2: float
                  ) -> tuple[float, np.ndarray, float]:
    """Regularized mean log-loss and its analytic gradient.

    The L2 penalty covers the weights only, not the bias.
    """
    z = X @ weights + bias
    p = expit(z)
    # log-loss via logaddexp avoids overflow for large |z|
    per_sample = np.logaddexp(0.0, z) - y * z
    loss = float(np.mean(per_sample) + 0.5 * l2 * np.dot(weights, weights))
    resid = p - y
    grad_w = X.T @ resid / len(y) + l2 * weights
    grad_b = float(np.mean(resid))
    return loss, grad_w, grad_b


def _resolve_polarity(store: EmbeddingStore, words: tuple[str, ...],
                      forms: dict[str, str], label: str) -> np.ndarray:
    rows = []
    missing = 0
    for w in words:
        row = store.get(w)
        if row is None:
            original = forms.get(w)
            row = store.get(original) if original is not None else None
        if row is None:
            missing += 1
            continue
        rows.append(np.asarray(row, dtype=np.float64))
    if missing:
        logger.warning("%s sentiment words: %d of %d not in vocabulary",
                       label, missing, len(words))
    if len(rows) < MIN_WORDS_PER_POLARITY:
        raise ResolutionError(
            f"only {len(rows)} {label} sentiment words resolve; "
            f"need at least {MIN_WORDS_PER_POLARITY}"
        )
    return np.vstack(rows)


def train_sentiment_classifier(store: EmbeddingStore,
                               sentiment: SentimentLexicon,
                               seed: int = 0,
                               split_ratio: float = 0.8,
                               config: TrainConfig = TrainConfig()
                               ) -> LogisticModel:
    """Full-batch gradient descent on embedding vectors; negative label = 1.

    The split shuffles each polarity separately with the given seed, so a
    fixed seed always yields the same model. Features are scaled by the
    largest training-row norm during descent, which keeps the loss surface
    smooth enough that the fixed learning rate can never overshoot; the
    scale is folded back into the reported weights.
    """
    if not 0.0 < split_ratio < 1.0:
        raise ValueError("split_ratio must be in (0, 1)")
    X_pos = _resolve_polarity(store, sentiment.positive,
                              sentiment.source_forms, "positive")
    X_neg = _resolve_polarity(store, sentiment.negative,
                              sentiment.source_forms, "negative")
    rng = np.random.default_rng(seed)

    def split(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        order = rng.permutation(len(X))
        n_train = max(1, int(len(X) * split_ratio))
        return X[order[:n_train]], X[order[n_train:]]

    pos_tr, pos_te = split(X_pos)
    neg_tr, neg_te = split(X_neg)
    X_train = np.vstack([pos_tr, neg_tr])
    y_train = np.concatenate([np.zeros(len(pos_tr)), np.ones(len(neg_tr))])
    X_test = np.vstack([pos_te, neg_te])
    y_test = np.concatenate([np.zeros(len(pos_te)), np.ones(len(neg_te))])

    max_norm = float(np.max(np.linalg.norm(X_train, axis=1)))
    scale = 1.0 / max_norm if max_norm > 0 else 1.0
    Xs = X_train * scale

    w = np.zeros(X_train.shape[1])
    b = 0.0
    history = []
    converged = False
    for _ in range(config.epochs):
        loss, grad_w, grad_b = loss_and_grad(w, b, Xs, y_train, config.l2)
        history.append(loss)
        gnorm = math.sqrt(float(np.dot(grad_w, grad_w)) + grad_b * grad_b)
        if gnorm < config.grad_tol:
            converged = True
            break
        w -= config.learning_rate * grad_w
        b -= config.learning_rate * grad_b
    if not converged:
        logger.warning(
            "sentiment classifier: gradient norm still %.3g after %d epochs",
            gnorm, config.epochs,
        )

    weights = w * scale
    weights.setflags(write=False)

    def accuracy(X: np.ndarray, y: np.ndarray) -> float:
        if len(y) == 0:
            return float("nan")
        pred = expit(X @ weights + b) >= 0.5
        return float(np.mean(pred == y))

    return LogisticModel(
        weights=weights,
        bias=float(b),
        train_accuracy=accuracy(X_train, y_train),
        test_accuracy=accuracy(X_test, y_test),
        converged=converged,
        loss_history=tuple(history),
        seed=seed,
        n_train=len(y_train),
        n_test=len(y_test),
    )


def negative_probability(model: LogisticModel, word_vector) -> float:
    """Predicted probability that a vector carries negative sentiment."""
    x = np.asarray(word_vector, dtype=np.float64)
    if x.shape != model.weights.shape:
        raise ValueError(
            f"dimension mismatch: vector {x.shape} vs weights "
            f"{model.weights.shape}"
        )
    return float(expit(np.dot(model.weights, x) + model.bias))


# -- distributions and divergence ----------------------------------------


def subclass_distribution(model: LogisticModel, resolved: ResolvedLexicon
                          ) -> tuple[dict[str, float], dict[str, float]]:
    """Mean negative-sentiment probability per subclass, and the same
    values normalized into a distribution."""
    means = {}
    for sub in resolved.subclasses:
        if len(sub) == 0:
            raise DegenerateInputError(f"subclass {sub.name!r} has no terms")
        probs = [negative_probability(model, sub.matrix[i])
                 for i in range(len(sub))]
        means[sub.name] = math.fsum(probs) / len(probs)
    total = math.fsum(means.values())
    P = {name: v / total for name, v in means.items()}
    return means, P


def term_distribution(model: LogisticModel, resolved: ResolvedLexicon
                      ) -> dict[str, float]:
    """Alternative construction: one probability mass per identity term."""
    probs = {}
    for sub in resolved.subclasses:
        for i, word in enumerate(sub.words):
            probs[f"{sub.name}:{word}"] = negative_probability(
                model, sub.matrix[i])
    total = math.fsum(probs.values())
    return {k: v / total for k, v in probs.items()}


def kl_from_uniform(P) -> float:
    """KL divergence, in nats, of a distribution from uniform over its support.

    Accepts a mapping or a sequence of probabilities; zero entries
    contribute nothing. The result is clamped at 0 so rounding in the
    sum can never produce a negative divergence.
    """
    values = list(P.values()) if hasattr(P, "values") else list(P)
    if not values:
        raise DegenerateInputError("empty distribution")
    arr = np.asarray(values, dtype=np.float64)
    if np.any(arr < 0):
        raise DegenerateInputError("negative probability in distribution")
    if abs(math.fsum(values) - 1.0) > DISTRIBUTION_TOL:
        raise DegenerateInputError(
            f"distribution sums to {math.fsum(values)!r}, not 1"
        )
    k = len(values)
    return max(0.0, math.fsum(p * math.log(p * k) for p in values if p > 0.0))


def _ensure_resolved(store: EmbeddingStore,
                     lexicon: BiasLexicon | ResolvedLexicon) -> ResolvedLexicon:
    if isinstance(lexicon, ResolvedLexicon):
        return lexicon
    return resolve(lexicon, store)


def rnsb(store: EmbeddingStore, lexicon: BiasLexicon | ResolvedLexicon,
         sentiment: SentimentLexicon, runs: int = 20, base_seed: int = 0,
         per_term: bool = False,
         config: TrainConfig = TrainConfig()) -> RnsbResult:
    """Averaged KL-from-uniform of negative-sentiment mass across subclasses.

    Trains ``runs`` classifiers with seeds base_seed .. base_seed+runs-1,
    each on a fresh shuffled split, and averages the per-run divergences.
    ``per_term`` switches the distribution to one mass per identity term
    instead of one per subclass.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    resolved = _ensure_resolved(store, lexicon)

    def one_run(seed: int) -> tuple[float, dict[str, float]]:
        model = train_sentiment_classifier(
            store, sentiment, seed=seed, config=config)
        means, P = subclass_distribution(model, resolved)
        if per_term:
            P = term_distribution(model, resolved)
        return kl_from_uniform(P), means

    outcomes = parallel_map(one_run, range(base_seed, base_seed + runs))
    per_run_kl = [kl for kl, _ in outcomes]
    prob_sums = {sub.name: 0.0 for sub in resolved.subclasses}
    for _, means in outcomes:
        for name, v in means.items():
            prob_sums[name] += v
    kl_mean = math.fsum(per_run_kl) / runs
    kl_std = math.sqrt(
        math.fsum((v - kl_mean) ** 2 for v in per_run_kl) / runs)
    mean_probs = {name: s / runs for name, s in prob_sums.items()}
    total = math.fsum(mean_probs.values())
    return RnsbResult(
        kl=kl_mean,
        kl_std=kl_std,
        per_run_kl=tuple(per_run_kl),
        per_subclass_negative_prob=mean_probs,
        distribution_P={k: v / total for k, v in mean_probs.items()},
        runs=runs,
        base_seed=base_seed,
        per_term=per_term,
        config=config,
    )


# -- one-tailed location test --------------------------------------------


def _student_t_sf(t: float, df: float) -> float:
    """P(T > t) for Student's t with ``df`` degrees of freedom.

    Uses the regularized incomplete beta identity for the t CDF.
    """
    if df <= 0:
        raise ValueError("df must be positive")
    x = df / (df + t * t)
    tail = 0.5 * float(betainc(df / 2.0, 0.5, x))
    return tail if t >= 0 else 1.0 - tail


def one_tailed_t_test(sample_a, sample_b) -> TTestResult:
    """Welch's unequal-variance t-test of mean(a) > mean(b).

    Small p means sample_a's mean is credibly larger. Two all-constant
    samples with equal means give t = 0, p = 0.5 by convention.
    """
    a = np.asarray(list(sample_a), dtype=np.float64)
    b = np.asarray(list(sample_b), dtype=np.float64)
    if len(a) < 2 or len(b) < 2:
        raise DegenerateInputError("each sample needs at least 2 values")
    ma, mb = float(np.mean(a)), float(np.mean(b))
    va = float(np.var(a, ddof=1))
    vb = float(np.var(b, ddof=1))
    se2 = va / len(a) + vb / len(b)
    if se2 == 0.0:
        df = float(len(a) + len(b) - 2)
        if ma == mb:
            return TTestResult(t=0.0, p=0.5, df=df)
        t = math.inf if ma > mb else -math.inf
        return TTestResult(t=t, p=0.0 if t > 0 else 1.0, df=df)
    t = (ma - mb) / math.sqrt(se2)
    df = se2 ** 2 / (
        (va / len(a)) ** 2 / (len(a) - 1) + (vb / len(b)) ** 2 / (len(b) - 1)
    )
    return TTestResult(t=t, p=_student_t_sf(t, df), df=df)
