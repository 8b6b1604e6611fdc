"""Structured audit results: JSON documents plus flat CSV tables.

Every report type stores only JSON-native values (dicts, lists, strings,
numbers, booleans, None), so ``from_dict(as_dict(r)) == r`` holds
exactly and serialization is lossless. The JSON text itself is emitted
with sorted keys, making identical computations byte-identical apart
from the timestamp field.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .lexicon import BiasLexicon, ResolvedLexicon
from .metrics import AnalogyScore, mac, weat_all_pairs
from .rnsb import (
    RnsbResult,
    SentimentLexicon,
    TrainConfig,
    _ensure_resolved,
    one_tailed_t_test,
    rnsb,
)
from .store import EmbeddingStore

__all__ = [
    "AuditReport",
    "DebiasReport",
    "SweepResult",
    "analogies_csv",
    "audit_csv",
    "build_audit",
    "check_finite",
    "now_iso",
    "sweep_csv",
    "write_json",
]


def now_iso() -> str:
    """Current UTC time, ISO-8601 with explicit offset."""
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def check_finite(value, path: str = "report") -> None:
    """Reject NaN or infinity anywhere in a nested JSON-native value."""
    if isinstance(value, bool) or value is None or isinstance(value, (str, int)):
        return
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value at {path}: {value!r}")
        return
    if isinstance(value, dict):
        for k, v in value.items():
            check_finite(v, f"{path}.{k}")
        return
    if isinstance(value, (list, tuple)):
        for i, v in enumerate(value):
            check_finite(v, f"{path}[{i}]")
        return
    raise TypeError(f"non-JSON value at {path}: {type(value).__name__}")


@dataclass(frozen=True)
class AuditReport:
    """One full measurement pass over a store.

    ``ttest`` is the one-tailed location test of this audit's divergence
    runs against a baseline's; None when there is no baseline.
    """

    embedding: dict
    lexicon: dict
    weat: dict
    mac: dict
    rnsb: dict
    ttest: dict | None
    settings: dict
    timestamp: str
    version: str

    def as_dict(self) -> dict:
        return {
            "embedding": self.embedding,
            "lexicon": self.lexicon,
            "weat": self.weat,
            "mac": self.mac,
            "rnsb": self.rnsb,
            "ttest": self.ttest,
            "settings": self.settings,
            "timestamp": self.timestamp,
            "version": self.version,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "AuditReport":
        return cls(**{k: doc[k] for k in (
            "embedding", "lexicon", "weat", "mac", "rnsb", "ttest",
            "settings", "timestamp", "version")})


@dataclass(frozen=True)
class DebiasReport:
    """Pre/post audit pair around one debiasing transform."""

    method: str
    params: dict
    pre: AuditReport
    post: AuditReport
    ttest: dict
    timestamp: str
    version: str

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "params": self.params,
            "pre": self.pre.as_dict(),
            "post": self.post.as_dict(),
            "ttest": self.ttest,
            "timestamp": self.timestamp,
            "version": self.version,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "DebiasReport":
        return cls(
            method=doc["method"],
            params=doc["params"],
            pre=AuditReport.from_dict(doc["pre"]),
            post=AuditReport.from_dict(doc["post"]),
            ttest=doc["ttest"],
            timestamp=doc["timestamp"],
            version=doc["version"],
        )


@dataclass(frozen=True)
class SweepResult:
    """One metric row per grid value of a single swept parameter."""

    parameter: str
    grid: list
    rows: list
    timestamp: str
    version: str

    def __post_init__(self) -> None:
        if not self.grid:
            raise ValueError("sweep grid must be non-empty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("sweep grid must be strictly increasing")
        if len(self.rows) != len(self.grid):
            raise ValueError("one row per grid value required")

    def as_dict(self) -> dict:
        return {
            "parameter": self.parameter,
            "grid": self.grid,
            "rows": self.rows,
            "timestamp": self.timestamp,
            "version": self.version,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SweepResult":
        return cls(**{k: doc[k] for k in (
            "parameter", "grid", "rows", "timestamp", "version")})


# -- building ------------------------------------------------------------


def _weat_payload(resolved: ResolvedLexicon) -> dict:
    summary = weat_all_pairs(resolved)
    return {
        "aggregate": summary.aggregate,
        "degenerate_count": summary.degenerate_count,
        "per_pair": [
            {
                "subclasses": list(p.subclass_pair),
                "attributes": list(p.attribute_pair),
                "statistic": p.result.statistic,
                "effect_size": p.result.effect_size,
            }
            for p in summary.pairs
        ],
    }


def _mac_payload(resolved: ResolvedLexicon) -> dict:
    result = mac(list(resolved.subclasses), list(resolved.attribute_sets))
    return {
        "mac": result.mac,
        "distance_from_one": abs(1.0 - result.mac),
        "degenerate_count": result.degenerate_count,
        "per_pair": [
            {"targets": t, "attributes": a, "value": v}
            for (t, a), v in sorted(result.per_pair.items())
        ],
    }


def _rnsb_payload(result: RnsbResult) -> dict:
    return {
        "kl": result.kl,
        "kl_std": result.kl_std,
        "per_run_kl": list(result.per_run_kl),
        "per_subclass_negative_prob": dict(
            sorted(result.per_subclass_negative_prob.items())),
        "distribution": dict(sorted(result.distribution_P.items())),
        "runs": result.runs,
        "base_seed": result.base_seed,
        "config": result.config.as_dict(),
    }


def build_audit(store: EmbeddingStore, lexicon: BiasLexicon | ResolvedLexicon,
                sentiment: SentimentLexicon, runs: int = 20,
                base_seed: int = 0, config: TrainConfig = TrainConfig(),
                embedding_path: str = "", embedding_format: str = "",
                settings: dict | None = None,
                baseline: RnsbResult | None = None
                ) -> tuple[AuditReport, RnsbResult]:
    """Measure a store with every metric and assemble the report.

    ``baseline`` adds a one-tailed test of the baseline's divergence runs
    being larger than this store's. The divergence result is returned
    alongside so a caller can feed it to a later audit as the baseline.
    """
    resolved = _ensure_resolved(store, lexicon)
    divergence = rnsb(store, resolved, sentiment, runs=runs,
                      base_seed=base_seed, config=config)
    ttest = None
    if baseline is not None:
        outcome = one_tailed_t_test(baseline.per_run_kl,
                                    divergence.per_run_kl)
        ttest = {"t": outcome.t, "p": outcome.p, "df": outcome.df}
    report = AuditReport(
        embedding={
            "path": embedding_path,
            "format": embedding_format,
            "n_words": len(store),
            "dim": store.dim,
            "normalized": store.normalized,
        },
        lexicon={
            "class": resolved.class_name,
            "subclasses": [s.name for s in resolved.subclasses],
            "attribute_sets": [a.name for a in resolved.attribute_sets],
            "equality_sets": len(resolved.equality_sets),
            "dropped_targets": {k: list(v)
                                for k, v in resolved.drops.targets.items()},
            "dropped_attributes": {
                k: list(v) for k, v in resolved.drops.attributes.items()},
            "dropped_equality_sets": [list(t)
                                      for t in resolved.drops.equality_sets],
            "dropped_total": resolved.drops.total,
        },
        weat=_weat_payload(resolved),
        mac=_mac_payload(resolved),
        rnsb=_rnsb_payload(divergence),
        ttest=ttest,
        settings=dict(settings or {}),
        timestamp=now_iso(),
        version=__version__,
    )
    check_finite(report.as_dict())
    return report, divergence


# -- writing -------------------------------------------------------------


def write_json(payload: dict, path: str | Path) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def audit_csv(report: AuditReport) -> str:
    """The report's numbers as ``metric,key,value`` lines."""
    rows = [("weat_aggregate", "", report.weat["aggregate"])]
    for p in report.weat["per_pair"]:
        key = "|".join(p["subclasses"]) + ";" + "|".join(p["attributes"])
        rows.append(("weat_effect_size", key, p["effect_size"]))
        rows.append(("weat_statistic", key, p["statistic"]))
    rows.append(("mac", "", report.mac["mac"]))
    rows.append(("mac_distance_from_one", "", report.mac["distance_from_one"]))
    for p in report.mac["per_pair"]:
        rows.append(("mac_pair", f"{p['targets']};{p['attributes']}",
                     p["value"]))
    rows.append(("rnsb_kl", "", report.rnsb["kl"]))
    rows.append(("rnsb_kl_std", "", report.rnsb["kl_std"]))
    for name, v in report.rnsb["per_subclass_negative_prob"].items():
        rows.append(("rnsb_negative_prob", name, v))
    for name, v in report.rnsb["distribution"].items():
        rows.append(("rnsb_distribution", name, v))
    if report.ttest is not None:
        for field in ("t", "p", "df"):
            rows.append((f"ttest_{field}", "", report.ttest[field]))
    lines = ["metric,key,value"]
    lines += [f"{m},{k},{v!r}" for m, k, v in rows]
    return "\n".join(lines) + "\n"


def sweep_csv(result: SweepResult) -> str:
    lines = [f"{result.parameter},weat_aggregate,mac_distance_from_one,"
             "rnsb_kl"]
    for value, row in zip(result.grid, result.rows):
        lines.append(f"{value!r},{row['weat_aggregate']!r},"
                     f"{row['mac_distance_from_one']!r},{row['rnsb_kl']!r}")
    return "\n".join(lines) + "\n"


def analogies_csv(scores: list[AnalogyScore]) -> str:
    lines = ["a,b,x,y,score"]
    lines += [f"{s.a},{s.b},{s.x},{s.y},{s.score!r}" for s in scores]
    return "\n".join(lines) + "\n"
