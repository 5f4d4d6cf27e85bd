"""Command-line interface: ``patprof profile | refine | suggest-examples``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from collections import Counter
from typing import Optional, Sequence

from . import cache as hcache
from .clustering import Hierarchy
from .cost import pattern_cost
from .errors import ConfigError, IngestError, LearningCapacityError, StaleCacheError
from .ingest import ingest
from .library import load_universe
from .profiler import (ApproxParams, Profile, ProfileEntry, big_profile, refine,
                       refinement_hierarchy)
from .significant import order_partitions, suggest_examples

log = logging.getLogger("patprof")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_CAPACITY = 4
MAX_SAMPLES = 5


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, metavar="PATH", help="dataset file")
    common.add_argument("--column", metavar="NAME|INDEX",
                        help="column to profile in a CSV/TSV file (header row required)")
    common.add_argument("--newline-mode", action="store_true",
                        help="treat the input as one string per line (default without --column)")
    common.add_argument("--atoms", metavar="PATH", help="JSON or YAML file declaring extra atoms")
    common.add_argument("--min-patterns", type=int, default=1, metavar="INT")
    common.add_argument("--max-patterns", type=int, default=10, metavar="INT")
    common.add_argument("--theta", type=float, default=1.25, metavar="REAL",
                        help="pattern-sampling factor (>= 1)")
    common.add_argument("--mu", type=float, default=4.0, metavar="REAL",
                        help="string-sampling factor (>= 1)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--cache", metavar="PATH", help="hierarchy/profile cache file")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="patprof", description="Learn a syntactic profile (a few regex-like patterns) of a string column.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("profile", parents=[common], help="profile a dataset")
    p = sub.add_parser("refine", parents=[common], help="re-cut the hierarchy into exactly k patterns")
    p.add_argument("--k", type=int, required=True)
    p = sub.add_parser("suggest-examples", parents=[common], help="pick representative inputs")
    p.add_argument("--n", type=int, required=True)
    return parser


def _params(args) -> ApproxParams:
    try:
        return ApproxParams(args.min_patterns, args.max_patterns, args.theta, args.mu, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _fmt_cost(c: float):
    return None if math.isinf(c) else c


def _sorted_entries(entries: Sequence[ProfileEntry]) -> list:
    return sorted(entries, key=lambda e: (e.count, e.pattern.render("human")))


def render_profile(prof: Profile, fmt: str, params: ApproxParams, extra: Optional[dict] = None) -> str:
    entries = _sorted_entries(prof.entries)
    if fmt == "structured":
        doc = {
            "params": dict(params.as_dict(), **(extra or {})),
            "entries": [
                {
                    "pattern_human": e.pattern.render("human"),
                    "pattern_regex": e.pattern.render("regex"),
                    "count": e.count,
                    "cost": _fmt_cost(e.cost),
                    "samples": list(e.data[:MAX_SAMPLES]),
                }
                for e in entries
            ],
        }
        return json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True) + "\n"
    if not entries:
        return ""
    width = max(len(str(e.count)) for e in entries)
    return "".join(f"{e.count:>{width}}  {e.pattern.render('human')}\n" for e in entries)


def _load(args):
    universe = load_universe(args.atoms)
    strings = ingest(args.input, args.column, args.newline_mode)
    return universe, strings


def _profile_doc(prof: Profile, strings, params: ApproxParams) -> dict:
    return {
        "params": params.as_dict(),
        "entries": [{"data": list(e.data), "pattern": hcache.encode_pattern(e.pattern)}
                    for e in prof.entries],
    }


def _profile_from_doc(doc: dict, universe, strings) -> Profile:
    counts = Counter(strings)
    entries = []
    for d in doc["entries"]:
        p = hcache.decode_pattern(d["pattern"], universe)
        data = tuple(d["data"])
        cost = math.inf if p.is_bottom else pattern_cost(p, data).total
        entries.append(ProfileEntry(data, p, cost, sum(counts[s] for s in data)))
    return Profile(entries, None, universe.fingerprint, 0)


def _cached(args, strings, universe) -> Optional[dict]:
    if not args.cache:
        return None
    return hcache.load(args.cache, hcache.dataset_hash(strings), universe.fingerprint) or None


def _base_doc(strings, universe) -> dict:
    return {"dataset_hash": hcache.dataset_hash(strings), "universe_fingerprint": universe.fingerprint}


def _get_profile(args, params, strings, universe) -> Profile:
    doc = _cached(args, strings, universe)
    if doc and doc.get("profile", {}).get("params") == params.as_dict():
        return _profile_from_doc(doc["profile"], universe, strings)
    prof = big_profile(strings, params.m, params.M, params.theta, params.mu, universe, params.seed)
    if args.cache:
        new = dict(doc or _base_doc(strings, universe))
        new["profile"] = _profile_doc(prof, strings, params)
        hcache.save(args.cache, new)
    return prof


def cmd_profile(args) -> str:
    params = _params(args)
    universe, strings = _load(args)
    if not strings:
        log.warning("input has no strings; emitting an empty profile")
        return render_profile(Profile([]), args.format, params)
    prof = _get_profile(args, params, strings, universe)
    return render_profile(prof, args.format, params)


def _hier_params(params: ApproxParams, M_r: int) -> dict:
    return {"max_patterns": M_r, "theta": params.theta, "seed": params.seed}


def cmd_refine(args) -> str:
    params = _params(args)
    if args.k < 1:
        raise UsageError("--k must be at least 1")
    universe, strings = _load(args)
    extra = {"k": args.k}
    if not strings:
        log.warning("input has no strings; emitting an empty profile")
        return render_profile(Profile([]), args.format, params, extra)
    doc = _cached(args, strings, universe)
    H = None
    M_r = max(params.M, args.k)
    if doc and "hierarchy" in doc and doc.get("hierarchy_params") == _hier_params(params, M_r):
        H = Hierarchy.from_dict(doc["hierarchy"])
    if H is None:
        H = refinement_hierarchy(strings, M_r, params.theta, universe, params.seed)
        if args.cache:
            new = dict(doc or _base_doc(strings, universe))
            new["hierarchy"] = H.to_dict()
            new["hierarchy_params"] = _hier_params(params, M_r)
            hcache.save(args.cache, new)
    prof = refine(strings, args.k, H, universe, params)
    return render_profile(prof, args.format, params, extra)


def cmd_suggest_examples(args) -> str:
    params = _params(args)
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    universe, strings = _load(args)
    if not strings:
        log.warning("input has no strings; nothing to suggest")
        picks, order, entries = [], None, []
    else:
        prof = _get_profile(args, params, strings, universe)
        order = order_partitions(prof, universe)
        picks = suggest_examples(order, args.n, params.seed)
        entries = prof.entries
    if args.format == "structured":
        where = {}
        if order is not None:
            for rank, idx in enumerate(order.indices):
                for s in entries[idx].data:
                    where.setdefault(s, (rank, entries[idx].pattern.render("human")))
        doc = {
            "params": dict(params.as_dict(), n=args.n),
            "examples": [{"input": s, "partition": where[s][0], "pattern_human": where[s][1]}
                         for s in picks],
        }
        return json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True) + "\n"
    return "".join(s + "\n" for s in picks)


COMMANDS = {"profile": cmd_profile, "refine": cmd_refine, "suggest-examples": cmd_suggest_examples}


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="patprof: %(levelname)s: %(message)s")
    try:
        text = COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"patprof: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IngestError, StaleCacheError) as exc:
        print(f"patprof: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except LearningCapacityError as exc:
        print(f"patprof: error: {exc} (raise PATPROF_STATE_BUDGET to allow more)", file=sys.stderr)
        return EXIT_CAPACITY
    out.write(text)
    out.flush()
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
