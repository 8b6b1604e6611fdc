"""Command-line toolkit: audit, debias, analogies, sweep, convert.

Exit codes: 0 on success, 1 when a computation cannot proceed
(degenerate inputs, nothing resolvable, empty null space), 2 on input
errors (unreadable or malformed files, bad flag values). The
FAIRVEC_THREADS environment variable caps how many worker threads the
library uses for independent runs; results do not depend on it.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .debias import (
    DEFAULT_ALPHA,
    DEFAULT_LAMBDA,
    DEFAULT_NEIGHBORS,
    DEFAULT_THRESHOLD,
    apply_displacement,
    conceptor_debias,
    hard_debias,
    softweat_debias,
    softweat_plans,
)
from .errors import ComputationError, InputError
from .lexicon import bundled_lexicon_path, load_lexicon, resolve
from .metrics import (
    DEFAULT_DELTA,
    DEFAULT_MIN_SCORE,
    enumerate_analogies,
    mac,
    weat_all_pairs,
)
from .parallel import parallel_map
from .report import (
    DebiasReport,
    SweepResult,
    analogies_csv,
    audit_csv,
    build_audit,
    now_iso,
    sweep_csv,
    write_json,
)
from .rnsb import bundled_sentiment_paths, load_sentiment_lexicon, rnsb
from .store import (
    GLOVE_TEXT,
    WORD2VEC_BINARY,
    load_embeddings,
    normalize_all,
    save_embeddings,
)

FORMATS = (GLOVE_TEXT, WORD2VEC_BINARY)
DEFAULT_RUNS = 20
DEFAULT_SWEEP_GRID = "0,0.25,0.5,0.75,1"


def _add_input_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--embedding", required=True,
                        help="embedding file to load")
    parser.add_argument("--format", choices=FORMATS, default=GLOVE_TEXT,
                        help="embedding file format (default glove-text)")
    parser.add_argument("--limit", type=int, default=None,
                        help="load only the first N words")
    parser.add_argument("--normalize", action="store_true",
                        help="scale every vector to unit length after "
                             "loading")


def _add_lexicon_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lexicon", default=None,
                        help="bias lexicon JSON (default: bundled religion "
                             "lexicon)")


def _add_sentiment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--sentiment-pos", default=None,
                        help="positive sentiment word list (default: "
                             "bundled)")
    parser.add_argument("--sentiment-neg", default=None,
                        help="negative sentiment word list (default: "
                             "bundled)")


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--runs", type=int, default=DEFAULT_RUNS,
                        help="classifier runs to average (default 20)")
    parser.add_argument("--seed", type=int, default=0,
                        help="base seed; run i uses seed+i (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairvec",
        description="Measure and remove multiclass social bias in word "
                    "embeddings.",
    )
    parser.add_argument("--version", action="version",
                        version=f"fairvec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("audit", help="measure association bias and "
                                     "sentiment divergence")
    _add_input_flags(p)
    _add_lexicon_flag(p)
    _add_sentiment_flags(p)
    _add_run_flags(p)
    p.add_argument("--out", required=True,
                   help="report JSON path; a flat CSV is written next to "
                        "it with a .csv suffix")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("debias", help="transform an embedding and report "
                                      "before/after measurements")
    _add_input_flags(p)
    _add_lexicon_flag(p)
    _add_sentiment_flags(p)
    _add_run_flags(p)
    p.add_argument("--method", required=True,
                   choices=("hard", "softweat", "conceptor"))
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA,
                   help="conceptor aperture (default 10)")
    p.add_argument("--lambda", dest="lam", type=float,
                   default=DEFAULT_LAMBDA,
                   help="softweat translation strength in [0,1] "
                        "(default 0.5)")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD,
                   help="softweat effect-size screening threshold "
                        "(default 0.5)")
    p.add_argument("--neighbors", type=int, default=DEFAULT_NEIGHBORS,
                   help="softweat neighbor expansion size (default 10)")
    p.add_argument("--k", type=int, default=None,
                   help="bias subspace dimension for hard debias "
                        "(default: subclasses - 1)")
    p.add_argument("--out", required=True,
                   help="pre/post report JSON path")
    p.add_argument("--out-embedding", required=True,
                   help="where to write the transformed embedding (same "
                        "format as the input)")
    p.set_defaults(func=cmd_debias)

    p = sub.add_parser("analogies", help="enumerate scored identity "
                                         "analogies as CSV")
    _add_input_flags(p)
    _add_lexicon_flag(p)
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA,
                   help="maximum distance between analogy offsets "
                        "(default 1.0)")
    p.add_argument("--min-score", type=float, default=DEFAULT_MIN_SCORE,
                   help="keep |score| at or above this (default 0.15)")
    p.add_argument("--out", required=True, help="CSV output path")
    p.set_defaults(func=cmd_analogies)

    p = sub.add_parser("sweep", help="rerun softweat from the original "
                                     "store across a strength grid")
    _add_input_flags(p)
    _add_lexicon_flag(p)
    _add_sentiment_flags(p)
    _add_run_flags(p)
    p.add_argument("--lambda", dest="lam_grid", default=DEFAULT_SWEEP_GRID,
                   help="comma-separated strength grid (default "
                        f"{DEFAULT_SWEEP_GRID})")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--neighbors", type=int, default=DEFAULT_NEIGHBORS)
    p.add_argument("--out", required=True,
                   help="sweep JSON path; plottable CSV written next to "
                        "it with a .csv suffix")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("convert", help="rewrite an embedding file in "
                                       "another format")
    _add_input_flags(p)
    p.add_argument("--to-format", required=True, choices=FORMATS,
                   help="output format")
    p.add_argument("--out-embedding", required=True,
                   help="output embedding path")
    p.set_defaults(func=cmd_convert)
    return parser


# -- shared loading ------------------------------------------------------


def _load_store(args):
    store = load_embeddings(args.embedding, args.format, limit=args.limit)
    if args.normalize:
        store = normalize_all(store)
    return store


def _load_lexicon(args):
    path = args.lexicon if args.lexicon else bundled_lexicon_path()
    return load_lexicon(path)


def _load_sentiment(args):
    pos, neg = args.sentiment_pos, args.sentiment_neg
    if pos is None or neg is None:
        bundled_pos, bundled_neg = bundled_sentiment_paths()
        pos = pos if pos is not None else bundled_pos
        neg = neg if neg is not None else bundled_neg
    return load_sentiment_lexicon(pos, neg)


def _base_settings(args) -> dict:
    return {
        "format": args.format,
        "limit": args.limit,
        "normalize": args.normalize,
        "runs": args.runs,
        "seed": args.seed,
    }


# -- subcommands ---------------------------------------------------------


def cmd_audit(args) -> int:
    store = _load_store(args)
    lexicon = _load_lexicon(args)
    sentiment = _load_sentiment(args)
    report, _ = build_audit(
        store, lexicon, sentiment, runs=args.runs, base_seed=args.seed,
        embedding_path=str(args.embedding), embedding_format=args.format,
        settings=_base_settings(args),
    )
    write_json(report.as_dict(), args.out)
    csv_path = Path(args.out).with_suffix(".csv")
    csv_path.write_text(audit_csv(report), encoding="utf-8", newline="\n")
    print(f"weat aggregate {report.weat['aggregate']:.6f}  "
          f"|1-mac| {report.mac['distance_from_one']:.6f}  "
          f"rnsb {report.rnsb['kl']:.6f}")
    print(f"wrote {args.out} and {csv_path}")
    return 0


def _run_method(args, store, lexicon):
    if args.method == "hard":
        return hard_debias(store, lexicon, k=args.k), {"k": args.k}
    if args.method == "softweat":
        params = {"lambda": args.lam, "threshold": args.threshold,
                  "neighbors": args.neighbors}
        return softweat_debias(store, lexicon, lam=args.lam,
                               threshold=args.threshold,
                               n=args.neighbors), params
    return (conceptor_debias(store, lexicon, alpha=args.alpha),
            {"alpha": args.alpha})


def cmd_debias(args) -> int:
    store = _load_store(args)
    lexicon = _load_lexicon(args)
    sentiment = _load_sentiment(args)
    settings = _base_settings(args)
    settings["method"] = args.method
    pre, pre_runs = build_audit(
        store, lexicon, sentiment, runs=args.runs, base_seed=args.seed,
        embedding_path=str(args.embedding), embedding_format=args.format,
        settings=settings,
    )
    debiased, params = _run_method(args, store, lexicon)
    save_embeddings(debiased, args.out_embedding, args.format)
    post, _ = build_audit(
        debiased, lexicon, sentiment, runs=args.runs, base_seed=args.seed,
        embedding_path=str(args.out_embedding),
        embedding_format=args.format, settings=settings,
        baseline=pre_runs,
    )
    report = DebiasReport(
        method=args.method,
        params=params,
        pre=pre,
        post=post,
        ttest=post.ttest,
        timestamp=now_iso(),
        version=__version__,
    )
    write_json(report.as_dict(), args.out)
    print(f"{args.method}: weat {pre.weat['aggregate']:.6f} -> "
          f"{post.weat['aggregate']:.6f}, rnsb {pre.rnsb['kl']:.6f} -> "
          f"{post.rnsb['kl']:.6f} (p={report.ttest['p']:.4g})")
    print(f"wrote {args.out_embedding} and {args.out}")
    return 0


def cmd_analogies(args) -> int:
    store = _load_store(args)
    resolved = resolve(_load_lexicon(args), store)
    attr_vocab: list[str] = []
    for attr_set in resolved.attribute_sets:
        for key in attr_set.keys:
            if key not in attr_vocab:
                attr_vocab.append(key)
    scored = []
    for left in resolved.subclasses:
        for right in resolved.subclasses:
            if left.name == right.name:
                continue
            scored.extend(enumerate_analogies(
                store, list(left.keys), list(right.keys), attr_vocab,
                delta=args.delta, min_score=args.min_score))
    scored.sort(key=lambda s: (-s.score, (s.a, s.b, s.x, s.y)))
    Path(args.out).write_text(analogies_csv(scored), encoding="utf-8",
                              newline="\n")
    print(f"wrote {len(scored)} analogies to {args.out}")
    return 0


def cmd_sweep(args) -> int:
    store = _load_store(args)
    lexicon = _load_lexicon(args)
    sentiment = _load_sentiment(args)
    try:
        raw = [float(v) for v in args.lam_grid.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"bad --lambda grid {args.lam_grid!r}") from exc
    if not raw:
        raise InputError("sweep grid is empty")
    if any(not 0.0 <= v <= 1.0 for v in raw):
        raise InputError("sweep grid values must lie in [0, 1]")
    grid = sorted(set(raw))
    _, displacement = softweat_plans(store, lexicon,
                                     threshold=args.threshold,
                                     n=args.neighbors)

    def measure(lam: float) -> dict:
        at = apply_displacement(store, displacement, lam)
        resolved = resolve(lexicon, at)
        summary = weat_all_pairs(resolved)
        closeness = mac(list(resolved.subclasses),
                        list(resolved.attribute_sets))
        divergence = rnsb(at, resolved, sentiment, runs=args.runs,
                          base_seed=args.seed)
        return {
            "weat_aggregate": summary.aggregate,
            "mac_distance_from_one": abs(1.0 - closeness.mac),
            "rnsb_kl": divergence.kl,
        }

    result = SweepResult(
        parameter="lambda",
        grid=grid,
        rows=parallel_map(measure, grid),
        timestamp=now_iso(),
        version=__version__,
    )
    write_json(result.as_dict(), args.out)
    csv_path = Path(args.out).with_suffix(".csv")
    csv_path.write_text(sweep_csv(result), encoding="utf-8", newline="\n")
    print(f"swept {len(grid)} strengths; wrote {args.out} and {csv_path}")
    return 0


def cmd_convert(args) -> int:
    store = _load_store(args)
    save_embeddings(store, args.out_embedding, args.to_format)
    print(f"wrote {len(store)} x {store.dim} vectors to "
          f"{args.out_embedding} ({args.to_format})")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ComputationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
