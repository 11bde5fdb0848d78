"""Command-line entry point: ``hypermatch <command> [options]``.

Exit codes: 0 success, 2 unreadable or invalid input, 3 precondition
violated (for example a 3-comb in the input), 4 size guard hit, 70 internal
invariant failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import secrets
import sys
import time
from pathlib import Path

from . import __version__
from .chain import DEFAULT_STATE_CAP, analyze, build_transition_matrix
from .core import Hypergraph, find_three_comb, load_hypergraph
from .counting import SamplingMode, count_exact, estimate_count, sample_matchings
from .errors import (
    BadParameters,
    HypermatchError,
    InvariantViolation,
    NotCombFree,
    PreconditionError,
    ResourceLimit,
    ValidationError,
)
from .generators import FAMILIES, GeneratorSpec
from .paths import congestion_report

log = logging.getLogger("hypermatch")

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_RESOURCE = 4
EXIT_INTERNAL = 70


def _document(command: str, params: dict, result: dict) -> str:
    doc = {
        "tool": "hypermatch",
        "version": __version__,
        "command": command,
        "parameters": params,
        "result": result,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _seed(args) -> int:
    return args.seed if args.seed is not None else secrets.randbits(64)


def _params(args, *names) -> dict:
    return {name: getattr(args, name) for name in names}


# -- commands ---------------------------------------------------------------

def cmd_check(args) -> int:
    H = load_hypergraph(args.input)
    witness = find_three_comb(H)
    lines = [f"comb-free: {str(witness is None).lower()}"]
    if witness is not None:
        lines.append("witness: edges {} {} {} meet edge {}".format(*witness))
    sys.stdout.write("\n".join(lines) + "\n")
    if args.output:
        result = {
            "comb_free": witness is None,
            "witness": None if witness is None else list(witness),
            "edges": H.m,
        }
        _emit(_document("check", _params(args, "input"), result), args.output)
    return EXIT_OK


def _int_list(text: str | None) -> list[int] | None:
    if text is None:
        return None
    return [int(tok) for tok in text.replace(",", " ").split()]


def cmd_generate(args) -> int:
    params = {
        key: value
        for key, value in {
            "n": args.n,
            "k": args.k,
            "ell": args.ell,
            "p": args.p,
            "seed": args.seed,
            "sizes": _int_list(args.sizes),
            "nu": _int_list(args.nu),
            "rows": args.rows,
            "cols": args.cols,
        }.items()
        if value is not None
    }
    if "nu" in params and len(params["nu"]) == 1:
        params["nu"] = params["nu"][0]
    if args.family in ("random", "triangle") and "seed" not in params and args.input is None:
        params["seed"] = secrets.randbits(64)
    source = load_hypergraph(args.input) if args.input else None
    H = GeneratorSpec(args.family, params).build(source)
    doc = H.to_dict()
    doc["meta"] = {
        "tool": "hypermatch",
        "version": __version__,
        "family": args.family,
        "parameters": params,
        "input": args.input,
    }
    _emit(json.dumps(doc, sort_keys=True) + "\n", args.output)
    return EXIT_OK


def cmd_reduce(args) -> int:
    args.family = "reduce"
    return cmd_generate(args)


def cmd_count_exact(args) -> int:
    H = load_hypergraph(args.input)
    result = {"count": count_exact(H), "n": H.n, "k": H.k, "edges": H.m}
    _emit(_document("count-exact", _params(args, "input"), result), args.output)
    return EXIT_OK


def _mode(args) -> SamplingMode:
    mode = SamplingMode(args.mode)
    if mode is SamplingMode.EMPIRICAL_BURN_IN and args.burn_in is None:
        raise BadParameters("empirical mode needs --burn-in")
    return mode


def cmd_estimate(args) -> int:
    H = load_hypergraph(args.input)
    seed = _seed(args)
    mode = _mode(args)
    started = time.perf_counter()
    res = estimate_count(H, args.epsilon, args.delta, mode, args.burn_in, seed)
    result = res.to_dict()
    if args.timing:
        result["wall_time_s"] = time.perf_counter() - started
    params = _params(args, "input", "epsilon", "delta", "mode", "burn_in")
    params["seed"] = seed
    _emit(_document("estimate", params, result), args.output)
    return EXIT_OK


def cmd_sample(args) -> int:
    H = load_hypergraph(args.input)
    seed = _seed(args)
    mode = _mode(args)
    if mode is SamplingMode.THEORETICAL_BOUND and args.epsilon is None:
        raise BadParameters("theoretical mode needs --epsilon")
    if mode is SamplingMode.THEORETICAL_BOUND:
        find = find_three_comb(H)
        if find is not None:
            raise NotCombFree(find)
    draws = sample_matchings(H, args.count, args.epsilon, mode, args.burn_in, seed)
    params = _params(args, "input", "epsilon", "mode", "burn_in", "count")
    params["seed"] = seed
    result = {"samples": [sorted(s) for s in draws]}
    _emit(_document("sample", params, result), args.output)
    return EXIT_OK


def cmd_analyze(args) -> int:
    H = load_hypergraph(args.input)
    T = build_transition_matrix(H, args.state_cap)
    res = analyze(T, args.epsilon, args.t_max, state_cap=args.state_cap)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "tv_distance", "bound_eq2"])
    for t, d, env in res.csv_rows():
        writer.writerow([t, repr(d), "" if env is None else repr(env)])
    params = _params(args, "input", "epsilon", "t_max", "state_cap")
    if args.output:
        _emit(buf.getvalue(), args.output)
        _emit(_document("analyze", params, res.summary()), args.summary or "-")
    else:
        _emit(buf.getvalue(), "-")
        if args.summary:
            _emit(_document("analyze", params, res.summary()), args.summary)
    if args.matrix:
        _emit(T.dumps(), args.matrix)
    return EXIT_OK


def cmd_verify_paths(args) -> int:
    H = load_hypergraph(args.input)
    report = congestion_report(
        H, args.state_cap, cut_samples=args.cut_samples, seed=args.seed or 0
    )
    params = _params(args, "input", "state_cap", "cut_samples", "seed")
    if args.output:
        _emit(report.to_csv(), args.output)
    _emit(_document("verify-paths", params, report.summary()), args.summary or "-")
    if not report.ok:
        raise InvariantViolation("canonical-path verification found violations")
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypermatch",
        description="Count and sample matchings in 3-comb-free uniform hypergraphs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_io(p, needs_input=True):
        p.add_argument("--input", "-i", required=needs_input, help="hypergraph file (JSON or 'n k m' lines)")
        p.add_argument("--output", "-o", help="output file (default: stdout)")
        return p

    p = with_io(sub.add_parser("check", help="test a hypergraph for 3-combs"))
    p.set_defaults(func=cmd_check)

    p = with_io(sub.add_parser("generate", help="build a hypergraph from a named family"), needs_input=False)
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--n", type=int, help="vertex count")
    p.add_argument("--k", type=int, help="uniformity")
    p.add_argument("--ell", type=int, help="overlap of consecutive cycle edges")
    p.add_argument("--p", type=float, help="edge probability (random, triangle)")
    p.add_argument("--seed", type=int, help="64-bit seed for random families")
    p.add_argument("--sizes", help="part sizes for blowup, e.g. 2,2,3")
    p.add_argument("--nu", help="subdivision multiplicity: one value or one per edge")
    p.add_argument("--rows", type=int, help="lattice rows (cells)")
    p.add_argument("--cols", type=int, help="lattice columns (cells)")
    p.set_defaults(func=cmd_generate)

    p = with_io(sub.add_parser("reduce", help="pad a graph (k=2 file) into a 3-comb-free k-graph"))
    p.add_argument("--k", type=int, required=True)
    for name in ("n", "ell", "p", "seed", "sizes", "nu", "rows", "cols"):
        p.set_defaults(**{name: None})
    p.set_defaults(func=cmd_reduce)

    p = with_io(sub.add_parser("count-exact", help="exact number of matchings"))
    p.set_defaults(func=cmd_count_exact)

    def with_sampling(p):
        p.add_argument("--mode", choices=[m.value for m in SamplingMode], default="empirical",
                       help="chain length: theoretical mixing bound or fixed burn-in")
        p.add_argument("--burn-in", type=int, help="chain steps per sample (empirical mode)")
        p.add_argument("--seed", type=int, help="64-bit master seed (recorded in the output)")

    p = with_io(sub.add_parser("estimate", help="approximate the number of matchings"))
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--timing", action="store_true", help="record wall time in the result")
    with_sampling(p)
    p.set_defaults(func=cmd_estimate)

    p = with_io(sub.add_parser("sample", help="draw almost-uniform matchings"))
    p.add_argument("--epsilon", type=float, help="target distance from uniform (theoretical mode)")
    p.add_argument("--count", type=int, default=1)
    with_sampling(p)
    p.set_defaults(func=cmd_sample)

    p = with_io(sub.add_parser("analyze", help="exact mixing analysis; CSV of t, tv_distance, bound_eq2"))
    p.add_argument("--epsilon", type=float, default=0.25)
    p.add_argument("--t-max", type=int, default=1000)
    p.add_argument("--state-cap", type=int, default=DEFAULT_STATE_CAP)
    p.add_argument("--summary", help="where to write the JSON summary (default: stdout)")
    p.add_argument("--matrix", help="also dump the exact transition matrix here")
    p.set_defaults(func=cmd_analyze)

    p = with_io(sub.add_parser("verify-paths", help="congestion and injectivity certificate; CSV per transition"))
    p.add_argument("--state-cap", type=int, default=500)
    p.add_argument("--cut-samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0, help="seed for the random cut sample")
    p.add_argument("--summary", help="where to write the JSON summary (default: stdout)")
    p.set_defaults(func=cmd_verify_paths)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ValidationError as exc:
        log.error("invalid input: %s", exc)
        return EXIT_PARSE
    except (PreconditionError, BadParameters) as exc:
        log.error("%s", exc)
        return EXIT_PRECONDITION
    except ResourceLimit as exc:
        log.error("%s", exc)
        return EXIT_RESOURCE
    except (HypermatchError, AssertionError) as exc:
        log.error("internal check failed: %s", exc)
        return EXIT_INTERNAL
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
