"""Command-line front end: ``rmm solve | pairs | enumerate | count | gadget | popular | gen``.

Exit status: 0 on success (or a popular matching), 1 for a negative domain
answer (not popular, truncated enumeration), 2 for usage or input errors.
Default limits can be set with RMM_ENUM_LIMIT, RMM_EXACT_LIMIT and
RMM_BRUTE_LIMIT.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass
from typing import IO, Dict, List, Optional, Sequence

from . import counting, oracle
from .instance import (
    InstanceFormatError,
    InvalidMatchingError,
    Matching,
    PreferenceInstance,
    format_instance,
    parse_instance,
    parse_matching,
    signature_of,
    strip_last_resorts,
)
from .generate import random_instance
from .popularity import PopularityVerdict, check_popular, popular_rmms
from .solver import SolverTrace, solve
from .switching import NotRankMaximalError, enumerate_rmms, rmm_pairs

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2


def _env_limit(name: str, default: Optional[int]) -> Optional[int]:
    raw = os.environ.get(name)
    if raw is None:
        return default
    value = int(raw)
    if value < 1:
        raise ValueError(f"{name} must be positive")
    return value


@dataclass
class CliConfig:
    command: str
    inputs: List[str]
    json: bool = False
    brute: bool = False
    enum_limit: Optional[int] = None
    exact_limit: int = counting.DEFAULT_EXACT_LIMIT
    brute_limit: int = oracle.DEFAULT_LIMIT
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("enum_limit", "exact_limit", "brute_limit"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name.replace('_', '-')} must be positive")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _sig_text(sig: Sequence[int]) -> str:
    return "(" + ",".join(str(x) for x in sig) + ")"


def _matching_json(inst: PreferenceInstance, m: Matching) -> Dict[str, str]:
    return dict(m.ordered(inst))


def _matching_line(inst: PreferenceInstance, m: Matching) -> str:
    return " ".join(f"{a}:{p}" for a, p in m.ordered(inst))


def _trace_json(trace: SolverTrace) -> dict:
    def edges(g):
        return [[a, p, k] for a, p, k in g.edges()]

    return {
        "phases": [
            {
                "rank": ph.rank,
                "edges": edges(ph.graph),
                "matching": _matching_json(trace.instance, ph.matching),
                "labels": {
                    "applicants": {a: lab.value for a, lab in ph.labels.applicants.items()},
                    "posts": {p: lab.value for p, lab in ph.labels.posts.items()},
                },
            }
            for ph in trace.phases
        ],
        "reduced": edges(trace.reduced),
        "deleted": [
            {"applicant": d.applicant, "post": d.post, "rank": d.rank, "phase": d.phase, "rule": d.rule}
            for d in trace.deleted
        ],
    }


def _rank_maximal(cfg: CliConfig, inst: PreferenceInstance) -> tuple:
    if cfg.brute:
        found = oracle.all_max_signature_matchings(inst, cfg.brute_limit)
        return min(found, key=lambda m: tuple(m.ordered(inst))), None
    m, trace = solve(inst)
    if not inst.has_last_resorts:
        m = strip_last_resorts(trace.instance, m)
    return m, trace


def cmd_solve(cfg: CliConfig, args: argparse.Namespace, out: IO[str]) -> int:
    inst = parse_instance(_read(cfg.inputs[0]))
    m, trace = _rank_maximal(cfg, inst)
    sig = signature_of(inst, m)
    if args.trace:
        if trace is None:
            raise ValueError("--trace is not available with --brute")
        with open(args.trace, "w", encoding="utf-8") as fh:
            json.dump(_trace_json(trace), fh, indent=2)
    if cfg.json:
        json.dump({"matching": _matching_json(inst, m), "signature": list(sig)}, out)
        out.write("\n")
        return EXIT_OK
    for a, p in m.ordered(inst):
        out.write(f"{a} {p}\n")
    unmatched = [a for a in inst.applicants if a not in m]
    if unmatched:
        out.write("unmatched: " + " ".join(unmatched) + "\n")
    out.write(f"signature: {_sig_text(sig)}\n")
    return EXIT_OK


def cmd_pairs(cfg: CliConfig, args: argparse.Namespace, out: IO[str]) -> int:
    inst = parse_instance(_read(cfg.inputs[0]))
    pairs = oracle.brute_rmm_pairs(inst, cfg.brute_limit) if cfg.brute else rmm_pairs(inst)
    a_idx = {a: i for i, a in enumerate(inst.applicants)}
    p_idx = {p: i for i, p in enumerate(inst.posts)}
    rows = sorted(
        ((a, p, inst.rank(a, p)) for a, p in pairs),
        key=lambda t: (a_idx[t[0]], t[2], p_idx[t[1]]),
    )
    if cfg.json:
        json.dump({"pairs": [list(r) for r in rows]}, out)
        out.write("\n")
    else:
        for a, p, k in rows:
            out.write(f"{a} {p} {k}\n")
    return EXIT_OK


def cmd_enumerate(cfg: CliConfig, args: argparse.Namespace, out: IO[str]) -> int:
    inst = parse_instance(_read(cfg.inputs[0]))
    if cfg.brute:
        found = sorted(
            oracle.all_max_signature_matchings(inst, cfg.brute_limit),
            key=lambda m: tuple(m.ordered(inst)),
        )
        truncated = cfg.enum_limit is not None and len(found) > cfg.enum_limit
        matchings = found[: cfg.enum_limit] if truncated else found
    else:
        result = enumerate_rmms(inst, cfg.enum_limit)
        matchings, truncated = list(result.matchings), result.truncated
    if cfg.json:
        json.dump(
            {
                "matchings": [_matching_json(inst, m) for m in matchings],
                "signature": list(signature_of(inst, matchings[0])) if matchings else [],
                "count": len(matchings),
                "truncated": truncated,
            },
            out,
        )
        out.write("\n")
    else:
        for m in matchings:
            out.write(_matching_line(inst, m) + "\n")
    if truncated:
        print(f"rmm: enumeration truncated after {len(matchings)} matchings", file=sys.stderr)
        return EXIT_NEGATIVE
    return EXIT_OK


def cmd_count(cfg: CliConfig, args: argparse.Namespace, out: IO[str]) -> int:
    inst = parse_instance(_read(cfg.inputs[0]))
    if cfg.brute:
        total = oracle.brute_count_rmms(inst, cfg.brute_limit)
    else:
        total = counting.count_rmms(inst, cfg.exact_limit)
    if cfg.json:
        json.dump({"count": total}, out)
        out.write("\n")
    else:
        out.write(f"{total}\n")
    return EXIT_OK


def cmd_gadget(cfg: CliConfig, args: argparse.Namespace, out: IO[str]) -> int:
    edges = counting.parse_bipartite_graph(_read(cfg.inputs[0]))
    text = format_instance(counting.hardness_gadget(edges, ties=args.ties))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def _verdict_json(inst: PreferenceInstance, m: Matching, v: PopularityVerdict) -> dict:
    doc = {
        "popular": v.popular,
        "matching": _matching_json(inst, m),
        "signature": list(signature_of(inst, m)),
    }
    if not v.popular:
        if v.witness is not None:
            doc["witness"] = {
                "kind": v.witness.kind,
                "posts": list(v.witness.posts),
                "weight": v.witness.weight,
            }
        doc["better"] = _matching_json(inst, v.better)
        doc["tally"] = list(v.tally)
    return doc


def cmd_popular(cfg: CliConfig, args: argparse.Namespace, out: IO[str]) -> int:
    inst = parse_instance(_read(cfg.inputs[0]))
    if args.search:
        found, truncated = popular_rmms(inst, cfg.enum_limit)
        if cfg.json:
            json.dump(
                {"popular": [_matching_json(inst, m) for m in found], "truncated": truncated}, out
            )
            out.write("\n")
        else:
            for m in found:
                out.write(_matching_line(inst, m) + "\n")
            if not found:
                out.write("no popular rank-maximal matching\n")
        return EXIT_OK if found and not truncated else EXIT_NEGATIVE
    if args.matching:
        m = parse_matching(_read(args.matching), inst)
    else:
        m, _ = _rank_maximal(cfg, inst)
    if cfg.brute:
        best = oracle.brute_max_signature(inst, cfg.brute_limit)
        if signature_of(inst, m) != best:
            raise NotRankMaximalError(
                f"signature {_sig_text(signature_of(inst, m))} differs from rank-maximal "
                f"{_sig_text(best)}"
            )
        v = oracle.brute_popular(inst, m, cfg.brute_limit)
    else:
        v = check_popular(inst, m)
    if cfg.json:
        json.dump(_verdict_json(inst, m, v), out)
        out.write("\n")
    elif v.popular:
        out.write("popular\n")
    else:
        out.write("not popular\n")
        if v.witness is not None:
            arrow = " -> ".join(v.witness.posts)
            if v.witness.kind == "cycle":
                arrow += f" -> {v.witness.posts[0]}"
            out.write(f"witness {v.witness.kind}: {arrow}\n")
        out.write(f"votes: {v.tally[0]} prefer the better matching, {v.tally[1]} prefer the input\n")
        out.write("better matching:\n")
        for a, p in v.better.ordered(inst):
            out.write(f"{a} {p}\n")
    return EXIT_OK if v.popular else EXIT_NEGATIVE


def cmd_gen(cfg: CliConfig, args: argparse.Namespace, out: IO[str]) -> int:
    rng = random.Random(cfg.seed)
    inst = random_instance(rng, args.applicants, args.posts, args.max_rank, args.tie_prob)
    out.write(format_instance(inst))
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "pairs": cmd_pairs,
    "enumerate": cmd_enumerate,
    "count": cmd_count,
    "gadget": cmd_gadget,
    "popular": cmd_popular,
    "gen": cmd_gen,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rmm",
        description="Rank-maximal matchings: solve, rank-maximal pairs, enumeration, "
        "exact counting, hardness gadgets and popularity checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, help_text: str, *, instance: bool = True, brute: bool = True):
        p = sub.add_parser(name, help=help_text, description=help_text)
        if instance:
            p.add_argument("instance", help="instance file ('-' for stdin)")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if brute:
            p.add_argument(
                "--brute", action="store_true", help="use the exhaustive reference implementation"
            )
            p.add_argument(
                "--brute-limit",
                type=_positive,
                default=None,
                help="max applicants for --brute (default 8, env RMM_BRUTE_LIMIT)",
            )
        return p

    p = add("solve", "Compute a rank-maximal matching and its signature.")
    p.add_argument("--trace", metavar="PATH", help="write the per-phase trace as JSON")

    add("pairs", "List every (applicant, post, rank) used by some rank-maximal matching.")

    p = add("enumerate", "List all rank-maximal matchings; exit 1 if truncated.")
    p.add_argument("--limit", type=_positive, default=None, help="stop after K matchings")

    p = add("count", "Count rank-maximal matchings exactly.")
    p.add_argument(
        "--exact-limit",
        type=_positive,
        default=None,
        help="max side of the perfect-matching instance (default 30, env RMM_EXACT_LIMIT)",
    )

    p = add("gadget", "Build the cubic-graph hardness instance.", instance=False, brute=False)
    p.add_argument("graph", help="edge list file: one 'x y' per line")
    p.add_argument("--ties", action="store_true", help="rank every edge 1 instead")
    p.add_argument("-o", "--output", help="write the instance here instead of stdout")

    p = add("popular", "Decide whether a rank-maximal matching is popular; exit 1 if not.")
    p.add_argument("--matching", help="matching file (default: the solver's matching)")
    p.add_argument(
        "--search", action="store_true", help="check every rank-maximal matching (exponential)"
    )
    p.add_argument("--limit", type=_positive, default=None, help="enumeration cap for --search")

    p = add("gen", "Write a seeded random instance.", instance=False, brute=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--applicants", type=_positive, default=5)
    p.add_argument("--posts", type=_positive, default=5)
    p.add_argument("--max-rank", type=_positive, default=3)
    p.add_argument("--tie-prob", type=float, default=0.3)
    return parser


def config_from_args(args: argparse.Namespace) -> CliConfig:
    inputs = [getattr(args, "instance", None) or getattr(args, "graph", None)]
    return CliConfig(
        command=args.command,
        inputs=[i for i in inputs if i],
        json=args.json,
        brute=getattr(args, "brute", False),
        enum_limit=getattr(args, "limit", None) or _env_limit("RMM_ENUM_LIMIT", None),
        exact_limit=getattr(args, "exact_limit", None)
        or _env_limit("RMM_EXACT_LIMIT", counting.DEFAULT_EXACT_LIMIT),
        brute_limit=getattr(args, "brute_limit", None)
        or _env_limit("RMM_BRUTE_LIMIT", oracle.DEFAULT_LIMIT),
        seed=getattr(args, "seed", 0),
    )


def run(argv: Optional[Sequence[str]] = None, out: Optional[IO[str]] = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg, args, out)
    except (
        InstanceFormatError,
        InvalidMatchingError,
        NotRankMaximalError,
        counting.TooLargeError,
        oracle.OracleLimitError,
        OSError,
        ValueError,
    ) as exc:
        print(f"rmm: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
