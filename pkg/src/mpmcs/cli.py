"""Most probable minimal cut sets of fault trees, via weighted partial MaxSAT.

Exit codes: 0 success (optimum found or nothing to optimise), 1 usage or
configuration error, 2 parse error, 3 verification failure, 4 budget
exhausted without a proven optimum.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

from . import __version__
from .bench import default_suite, load_suite, rows_to_csv, rows_to_text, run_suite
from .core import (FaultTree, is_cut_set, is_minimal_cut_set, joint_probability,
                   load_tree, save_tree)
from .encode import VarMap, build_weights, encode
from .engine import DEFAULT_STRATEGIES, STRATEGIES, Status
from .errors import InputError, MpmcsError, ParseError, VerificationError
from .gen import GenConfig, composition, generate
from .oracle import DEFAULT_MAX_EVENTS, mpmcs_brute_int
from .solve import SolveBudget, decode, load_solution, portfolio, solution_to_json
from .wcnf import emit_wcnf, read_wcnf

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_VERIFY, EXIT_BUDGET = 0, 1, 2, 3, 4
ENV_PREFIX = "MPMCS_"

logger = logging.getLogger("mpmcs")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _env(name, default):
    return os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"), default)


def _ratios(text):
    try:
        parts = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad ratios {text!r}") from None
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three ratios AT,AND,OR")
    return parts


def _shift(text):
    return "auto" if str(text) == "auto" else int(text)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options (also read from MPMCS_<NAME>)")
    g.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    g.add_argument("--log-base", choices=["e", "10"], default=_env("log_base", "e"))
    g.add_argument("--shift", type=_shift, default=_shift(_env("shift", "auto")),
                   help="decimal right shift of -log weights, or 'auto'")
    g.add_argument("--k", type=int, default=int(_env("k", 3)), help="generator fan-in bound")
    g.add_argument("--budget-ms", type=float, default=float(_env("budget_ms", 60_000)))
    g.add_argument("--strategies", default=_env("strategies", ",".join(DEFAULT_STRATEGIES)),
                   help=f"comma list from: {', '.join(STRATEGIES)}")
    g.add_argument("--jobs", type=int, default=int(_env("jobs", 0)) or None)
    g.add_argument("--scale", type=float, default=float(_env("scale", 1.0)))
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="mpmcs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", parents=[common], help="random fault tree")
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=_ratios, help="AT,AND,OR ratios, e.g. 0.8,0.1,0.1")
    p.add_argument("--config", help="JSON generator config")
    p.add_argument("-o", "--out", required=True)

    p = sub.add_parser("encode", parents=[common], help="fault tree -> WCNF")
    p.add_argument("tree")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--varmap", help="default: <out stem>.varmap.json")

    p = sub.add_parser("solve", parents=[common], help="solve a WCNF instance")
    p.add_argument("wcnf")
    p.add_argument("--varmap")
    p.add_argument("--tree")
    p.add_argument("-o", "--out", help="solution JSON path")

    p = sub.add_parser("verify", parents=[common], help="check a solution against its tree")
    p.add_argument("tree")
    p.add_argument("solution")

    p = sub.add_parser("bench", parents=[common], help="run a benchmark suite")
    p.add_argument("--suite", help="JSON case list (default: 80-case grid)")
    p.add_argument("--cases", help="id filter, e.g. 1-10,35")
    p.add_argument("-o", "--out-dir", required=True)

    p = sub.add_parser("pipeline", parents=[common], help="generate, encode, solve, verify")
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=_ratios)
    p.add_argument("--config")
    p.add_argument("-o", "--out-dir", required=True)
    p.add_argument("--name", default="tree")
    return parser


# --------------------------------------------------------------------------
# helpers shared with tests


def verify_solution(tree: FaultTree, sol: dict, max_events: int = DEFAULT_MAX_EVENTS) -> list:
    """Recheck a solution document. Returns (check, passed, detail) triples."""
    checks = []

    def add(name, ok, detail=""):
        checks.append((name, bool(ok), detail))

    status = sol.get("status")
    if status not in (Status.OPTIMAL.value, Status.FEASIBLE.value):
        add("has-solution", False, f"status {status!r}")
        return checks
    events = sol.get("events") or []
    unknown = [e for e in events if e not in tree.nodes or e not in set(tree.events)]
    add("events-exist", not unknown, f"unknown events {unknown}" if unknown else "")
    if unknown or not events:
        add("non-empty", bool(events))
        return checks
    cut = frozenset(events)
    add("size", sol.get("size") == len(cut), f"size {sol.get('size')} vs {len(cut)}")
    add("cut-set", is_cut_set(tree, cut), "" if is_cut_set(tree, cut) else "not a cut set")
    minimal = is_minimal_cut_set(tree, cut)
    add("minimal", minimal, "" if minimal else "not minimal")
    p = joint_probability(tree, cut)
    got = sol.get("probability")
    add("probability", got is not None and math.isclose(got, p, rel_tol=1e-12, abs_tol=0.0),
        f"{got} vs {p}")
    if "shift" in sol:
        weights, s = build_weights(tree, sol.get("log_base", "e"), sol["shift"])
        cost = sum(weights[e] for e in cut)
        add("int-log-cost", sol.get("intLogCost") == cost, f"{sol.get('intLogCost')} vs {cost}")
        lc = sol.get("logCost")
        add("log-cost", lc is not None and math.isclose(lc, cost / 10**s, rel_tol=1e-12),
            f"{lc} vs {cost / 10**s}")
        if len(tree.events) <= max_events:
            _, best = mpmcs_brute_int(tree, weights, max_events)
            if status == Status.OPTIMAL.value:
                add("oracle", cost == best, f"cost {cost}, oracle {best}")
            else:
                add("oracle", cost >= best, f"cost {cost}, oracle {best}")
    return checks


def _gen_config(args) -> GenConfig:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = GenConfig.from_json(fh.read())
        over = {}
        if args.n is not None:
            over["n"] = args.n
        if args.r is not None:
            over.update(r_at=args.r[0], r_and=args.r[1], r_or=args.r[2])
        if over:
            cfg = GenConfig(**{**cfg.__dict__, **over})
    else:
        if args.n is None or args.r is None:
            raise InputError("give --n and --r, or --config")
        cfg = GenConfig(args.n, *args.r, k=args.k, seed=args.seed)
    cfg.check()
    return cfg


def _strategies(args):
    names = [s.strip() for s in args.strategies.split(",") if s.strip()]
    for s in names:
        if s not in STRATEGIES:
            raise InputError(f"unknown strategy {s!r}")
    return names


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _varmap_path(wcnf_path):
    stem = wcnf_path[:-5] if wcnf_path.endswith(".wcnf") else wcnf_path
    return stem + ".varmap.json"


def _wcnf_comments(tree, varmap):
    return [f"mpmcs {__version__}: {len(tree.events)} events, {len(tree.gates)} gates, "
            f"shift {varmap.shift}, log base {varmap.log_base}"]


ROW_FIELDS = ("status", "size", "intLogCost", "logCost", "probability", "time_ms", "strategy")


def _row(doc) -> str:
    cells = ["-" if doc.get(f) is None else str(doc.get(f)) for f in ROW_FIELDS]
    widths = [max(len(f), len(c)) for f, c in zip(ROW_FIELDS, cells)]
    head = "  ".join(f.rjust(w) for f, w in zip(ROW_FIELDS, widths))
    return head + "\n" + "  ".join(c.rjust(w) for c, w in zip(cells, widths))


# --------------------------------------------------------------------------
# commands


def cmd_generate(args) -> int:
    cfg = _gen_config(args)
    tree = generate(cfg)
    save_tree(tree, args.out)
    c = composition(tree)
    print(f"{args.out}: gNodes={c.gNodes} gEdges={c.gEdges} gAT={c.gAT} gAND={c.gAND} gOR={c.gOR}")
    return EXIT_OK


def cmd_encode(args) -> int:
    tree = load_tree(args.tree)
    instance, varmap = encode(tree, args.log_base, args.shift)
    _write(args.out, emit_wcnf(instance, _wcnf_comments(tree, varmap)))
    vpath = args.varmap or _varmap_path(args.out)
    _write(vpath, varmap.to_json())
    print(f"{args.out}: tsVars={instance.num_vars} tsClauses={instance.num_clauses} shift={varmap.shift}")
    return EXIT_OK


def _solve(instance, args):
    return portfolio(instance, _strategies(args), SolveBudget.from_ms(args.budget_ms))


def cmd_solve(args) -> int:
    instance = read_wcnf(args.wcnf)
    vpath = args.varmap or (_varmap_path(args.wcnf) if args.tree else None)
    if args.tree and vpath and not os.path.exists(vpath):
        raise InputError(f"varmap {vpath} not found")
    outcome = _solve(instance, args)
    result = varmap = None
    if args.tree and outcome.status in (Status.OPTIMAL, Status.FEASIBLE):
        with open(vpath, encoding="utf-8") as fh:
            varmap = VarMap.from_json(fh.read())
        result = decode(outcome, varmap, load_tree(args.tree))
    text = solution_to_json(outcome, result, varmap)
    if args.out:
        _write(args.out, text)
    print(_row(json.loads(text)))
    return EXIT_OK if outcome.status in (Status.OPTIMAL, Status.INFEASIBLE) else EXIT_BUDGET


def _print_checks(checks) -> bool:
    ok = all(passed for _, passed, _ in checks)
    for name, passed, detail in checks:
        print(f"{'PASS' if passed else 'FAIL'} {name}" + (f": {detail}" if detail and not passed else ""))
    print("verification " + ("passed" if ok else "FAILED"))
    return ok


def cmd_verify(args) -> int:
    tree = load_tree(args.tree)
    with open(args.solution, encoding="utf-8") as fh:
        sol = load_solution(fh.read())
    return EXIT_OK if _print_checks(verify_solution(tree, sol)) else EXIT_VERIFY


def _id_filter(text):
    keep = set()
    for part in text.split(","):
        if "-" in part:
            a, b = part.split("-")
            keep.update(range(int(a), int(b) + 1))
        elif part.strip():
            keep.add(int(part))
    return keep


def cmd_bench(args) -> int:
    if args.suite:
        with open(args.suite, encoding="utf-8") as fh:
            cases = load_suite(fh.read(), args.scale, args.k)
    else:
        cases = default_suite(args.scale, args.seed, args.k)
    if args.cases:
        keep = _id_filter(args.cases)
        cases = [c for c in cases if c.id in keep]
    rows = run_suite(cases, args.out_dir, args.log_base, args.shift, args.budget_ms,
                     _strategies(args), args.jobs)
    _write(os.path.join(args.out_dir, "bench.csv"), rows_to_csv(rows))
    text = rows_to_text(rows)
    _write(os.path.join(args.out_dir, "bench.txt"), text)
    sys.stdout.write(text)
    return EXIT_OK if all(r.status == Status.OPTIMAL.value for r in rows) else EXIT_BUDGET


def cmd_pipeline(args) -> int:
    cfg = _gen_config(args)
    os.makedirs(args.out_dir, exist_ok=True)
    base = os.path.join(args.out_dir, args.name)
    tree = generate(cfg)
    save_tree(tree, base + ".json")
    instance, varmap = encode(tree, args.log_base, args.shift)
    _write(base + ".wcnf", emit_wcnf(instance, _wcnf_comments(tree, varmap)))
    _write(base + ".varmap.json", varmap.to_json())
    outcome = _solve(instance, args)
    result = None
    if outcome.status in (Status.OPTIMAL, Status.FEASIBLE):
        result = decode(outcome, varmap, tree)
    text = solution_to_json(outcome, result, varmap)
    _write(base + ".solution.json", text)
    print(_row(json.loads(text)))
    if not _print_checks(verify_solution(tree, json.loads(text))):
        return EXIT_VERIFY
    return EXIT_OK if outcome.status is Status.OPTIMAL else EXIT_BUDGET


COMMANDS = {
    "generate": cmd_generate,
    "encode": cmd_encode,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "bench": cmd_bench,
    "pipeline": cmd_pipeline,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        args = build_parser().parse_args(argv)
    except ValueError as exc:  # malformed environment override
        print(f"mpmcs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # usage errors, --help, --version
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (ParseError, json.JSONDecodeError) as exc:
        print(f"mpmcs: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except VerificationError as exc:
        print(f"mpmcs: verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (MpmcsError, OSError) as exc:
        print(f"mpmcs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
