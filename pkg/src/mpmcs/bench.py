"""Benchmark suites: the 80-case size/configuration grid and report tables."""

from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

from .core import save_tree
from .encode import encode
from .errors import ConfigError
from .gen import GenConfig, composition, generate, round_half_up
from .solve import SolveBudget, decode, portfolio, solution_to_json
from .engine import DEFAULT_STRATEGIES, Status
from .wcnf import write_wcnf

SIZES = (2500, 5000, 7500, 10000)
R1 = (0.8, 0.1, 0.1)
R2 = (0.6, 0.2, 0.2)
CASES_PER_CELL = 10


@dataclass(frozen=True)
class CaseSpec:
    id: int
    n: int
    config: GenConfig

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def stem(self) -> str:
        return f"case-{self.id}-{self.n}"


@dataclass
class BenchRow:
    id: int
    gNodes: int
    gEdges: int
    gAT: int
    gAND: int
    gOR: int
    tsVars: int
    tsClauses: int
    time_ms: float
    size: int | None
    intLogCost: int | None
    logCost: float | None
    probability: float | None
    status: str = ""


def default_suite(scale: float = 1.0, base_seed: int = 0, k: int = 3) -> list[CaseSpec]:
    """Sizes x {R1, R2} x 10 seeds; ids 1-10 are 2500/R1, 11-20 2500/R2, ..."""
    if not scale > 0:
        raise ConfigError("scale must be positive")
    cases = []
    for si, size in enumerate(SIZES):
        n = max(1, round_half_up(size * scale))
        for ri, r in enumerate((R1, R2)):
            for j in range(CASES_PER_CELL):
                cid = si * 2 * CASES_PER_CELL + ri * CASES_PER_CELL + j + 1
                cfg = GenConfig(n, *r, k=k, seed=base_seed + cid)
                cases.append(CaseSpec(cid, n, cfg))
    return cases


def load_suite(text: str, scale: float = 1.0, k: int = 3) -> list[CaseSpec]:
    """JSON list of {"id", "n", "r": [at, and, or], "seed", optional "k"}."""
    cases = []
    for d in json.loads(text):
        n = max(1, round_half_up(d["n"] * scale))
        cfg = GenConfig(n, *d["r"], k=d.get("k", k), seed=d.get("seed", d["id"]))
        cases.append(CaseSpec(int(d["id"]), n, cfg))
    ids = [c.id for c in cases]
    if len(ids) != len(set(ids)):
        raise ConfigError("case ids must be unique")
    return cases


def run_case(case: CaseSpec, out_dir: str, log_base="e", shift="auto",
             budget_ms: float = 10_000, strategies=DEFAULT_STRATEGIES) -> BenchRow:
    tree = generate(case.config)
    instance, varmap = encode(tree, log_base, shift)
    base = os.path.join(out_dir, case.stem)
    save_tree(tree, base + ".json")
    write_wcnf(instance, base + ".wcnf", comments=[
        f"case {case.id}: n={case.n} r=({case.config.r_at}, {case.config.r_and}, "
        f"{case.config.r_or}) k={case.config.k} seed={case.seed}",
    ])
    with open(base + ".varmap.json", "w", encoding="utf-8") as fh:
        fh.write(varmap.to_json())

    t0 = time.perf_counter()
    outcome = portfolio(instance, strategies, SolveBudget.from_ms(budget_ms))
    time_ms = (time.perf_counter() - t0) * 1000.0

    result = None
    if outcome.status in (Status.OPTIMAL, Status.FEASIBLE):
        result = decode(outcome, varmap, tree)
    with open(base + ".solution.json", "w", encoding="utf-8") as fh:
        fh.write(solution_to_json(outcome, result, varmap))

    comp = composition(tree)
    return BenchRow(
        id=case.id, gNodes=comp.gNodes, gEdges=comp.gEdges, gAT=comp.gAT,
        gAND=comp.gAND, gOR=comp.gOR, tsVars=instance.num_vars,
        tsClauses=instance.num_clauses, time_ms=round(time_ms, 1),
        size=result.size if result else None,
        intLogCost=result.int_log_cost if result else None,
        logCost=result.log_cost if result else None,
        probability=result.probability if result else None,
        status=outcome.status.value,
    )


def _run(args):
    return run_case(*args)


def run_suite(cases, out_dir, log_base="e", shift="auto", budget_ms=10_000,
              strategies=DEFAULT_STRATEGIES, jobs: int | None = None) -> list[BenchRow]:
    """Run every case; rows come back in id order whatever the completion order."""
    os.makedirs(out_dir, exist_ok=True)
    jobs = jobs or os.cpu_count() or 1
    work = [(c, out_dir, log_base, shift, budget_ms, tuple(strategies)) for c in cases]
    if jobs == 1:
        rows = [_run(w) for w in work]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run, work))
    return sorted(rows, key=lambda r: r.id)


COLUMNS = [f.name for f in fields(BenchRow)]


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: "" if v is None else v for k, v in asdict(r).items()})
    return buf.getvalue()


def _fmt(name, v) -> str:
    if v is None:
        return "-"
    if name == "probability":
        return f"{v:.6e}"
    if name == "logCost":
        return f"{v:.6f}"
    return str(v)


def rows_to_text(rows) -> str:
    """Aligned table, one case per line."""
    table = [COLUMNS] + [[_fmt(c, getattr(r, c)) for c in COLUMNS] for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(COLUMNS))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in table]
    return "\n".join(lines) + "\n"
