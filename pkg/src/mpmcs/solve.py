"""Solving front end: budgets, portfolio racing and decoding to cut sets."""

from __future__ import annotations

import json
import logging
import math
import queue
import threading
import time
from dataclasses import dataclass

from .core import FaultTree, is_cut_set, is_minimal_cut_set, joint_probability
from .encode import VarMap
from .engine import DEFAULT_STRATEGIES, MaxSatOutcome, Status, make_strategy
from .errors import InputError, VerificationError
from .wcnf import WcnfInstance

logger = logging.getLogger(__name__)

# How long cancelled strategies get to notice the stop flag.
CANCEL_GRACE = 2.0


@dataclass(frozen=True)
class SolveBudget:
    wall_time: float = 60.0  # seconds
    upper_bound: int | None = None

    def __post_init__(self):
        if not self.wall_time > 0:
            raise InputError("budget must be a positive duration")

    @classmethod
    def from_ms(cls, ms, upper_bound=None):
        return cls(ms / 1000.0, upper_bound)


def _strategy(s):
    return make_strategy(s) if isinstance(s, str) else s


def _name(s) -> str:
    return getattr(s, "name", getattr(s, "__name__", repr(s)))


def solve(instance: WcnfInstance, strategy="bnb", budget: SolveBudget | None = None) -> MaxSatOutcome:
    """Run one strategy in the calling thread."""
    budget = budget or SolveBudget()
    instance.check()
    strat = _strategy(strategy)
    deadline = time.monotonic() + budget.wall_time
    out = strat(instance, deadline=deadline, stop=threading.Event(),
                on_incumbent=None, upper_bound=budget.upper_bound)
    _recheck(instance, out)
    return out


class _Incumbent:
    """Best model reported by any strategy; written only by the coordinator
    callbacks, under a lock."""

    def __init__(self):
        self.lock = threading.Lock()
        self.cost = math.inf
        self.model = None
        self.owner = None
        self.when = math.inf

    def offer(self, cost, model, owner, when):
        with self.lock:
            if cost < self.cost:
                self.cost, self.model, self.owner, self.when = cost, model, owner, when


def portfolio(instance: WcnfInstance, strategies=DEFAULT_STRATEGIES,
              budget: SolveBudget | None = None) -> MaxSatOutcome:
    """Race ``strategies`` on one instance.

    The first Optimal or Infeasible answer wins and the others are told to
    stop. If nothing is conclusive in time, the cheapest model seen by any
    strategy is returned as Feasible (earliest wins ties).
    """
    budget = budget or SolveBudget()
    strategies = [_strategy(s) for s in strategies]
    if not strategies:
        raise InputError("portfolio needs at least one strategy")
    instance.check()
    t0 = time.monotonic()
    deadline = t0 + budget.wall_time
    stop = threading.Event()
    results: queue.Queue = queue.Queue()
    best = _Incumbent()

    def run(strat):
        name = _name(strat)

        def report(cost, model, owner=name):
            best.offer(cost, model, owner, time.monotonic())

        try:
            out = strat(instance, deadline=deadline, stop=stop,
                        on_incumbent=report, upper_bound=budget.upper_bound)
            if not out.strategy_id:
                out.strategy_id = name
            results.put((time.monotonic(), out, None))
        except Exception as exc:  # reported to the coordinator
            results.put((time.monotonic(), None, exc))

    threads = [threading.Thread(target=run, args=(s,), daemon=True, name=_name(s)) for s in strategies]
    for th in threads:
        th.start()

    finished, errors, winner = [], [], None
    while len(finished) + len(errors) < len(threads):
        wait = deadline + CANCEL_GRACE - time.monotonic()
        try:
            when, out, exc = results.get(timeout=max(wait, 0.0))
        except queue.Empty:
            break
        if exc is not None:
            logger.error("strategy failed: %r", exc)
            errors.append(exc)
            continue
        finished.append((when, out))
        if out.status in (Status.OPTIMAL, Status.INFEASIBLE):
            winner = out
            break
    stop.set()
    for th in threads:
        th.join(timeout=CANCEL_GRACE)

    if winner is None:
        if errors and not finished:
            raise errors[0]
        candidates = [(o.cost, when, o) for when, o in finished if o.has_model]
        if best.model is not None:
            stub = MaxSatOutcome(Status.FEASIBLE, best.model, best.cost, best.owner)
            candidates.append((best.cost, best.when, stub))
        if candidates:
            cost, _, src = min(candidates, key=lambda c: (c[0], c[1]))
            winner = MaxSatOutcome(Status.FEASIBLE, src.model, cost, src.strategy_id,
                                   trace=list(src.trace))
        else:
            winner = MaxSatOutcome(Status.UNKNOWN, strategy_id="")
    winner.elapsed = time.monotonic() - t0
    _recheck(instance, winner)
    return winner


def _recheck(instance: WcnfInstance, out: MaxSatOutcome) -> None:
    """Independent soundness check of whatever model came back."""
    if out.model is None:
        return
    if len(out.model) != instance.num_vars:
        raise VerificationError("model has the wrong number of variables")
    if not instance.satisfies_hard(out.model):
        raise VerificationError(f"strategy {out.strategy_id} returned a model violating hard clauses")
    if instance.cost(out.model) != out.cost:
        raise VerificationError(f"strategy {out.strategy_id} misreported its cost")


# --------------------------------------------------------------------------
# decoding


@dataclass(frozen=True)
class MpmcsResult:
    cut_set: frozenset
    size: int
    int_log_cost: int
    log_cost: float
    probability: float


def decode(outcome: MaxSatOutcome, varmap: VarMap, tree: FaultTree) -> MpmcsResult:
    """Falsified event variables are the events that occur."""
    if outcome.status not in (Status.OPTIMAL, Status.FEASIBLE) or outcome.model is None:
        raise InputError(f"cannot decode an outcome with status {outcome.status.value}")
    model = outcome.model
    cut = frozenset(e for e, v in varmap.event_to_var.items() if not model[v - 1])
    if not cut:
        raise VerificationError("decoded cut set is empty")
    if outcome.status is Status.OPTIMAL:
        if not is_cut_set(tree, cut):
            raise VerificationError("optimal model does not decode to a cut set")
        if not is_minimal_cut_set(tree, cut):
            raise VerificationError("optimal model decodes to a non-minimal cut set")
    return MpmcsResult(
        cut_set=cut,
        size=len(cut),
        int_log_cost=outcome.cost,
        log_cost=outcome.cost / 10**varmap.shift,
        probability=joint_probability(tree, cut),
    )


def solution_to_json(outcome: MaxSatOutcome, result: MpmcsResult | None, varmap: VarMap | None = None) -> str:
    doc = {
        "status": outcome.status.value,
        "cost": outcome.cost,
        "size": result.size if result else None,
        "intLogCost": result.int_log_cost if result else None,
        "logCost": result.log_cost if result else None,
        "probability": result.probability if result else None,
        "events": sorted(result.cut_set) if result else [],
        "strategy": outcome.strategy_id,
        "time_ms": round(outcome.elapsed * 1000.0, 3),
    }
    if varmap is not None:
        doc["shift"] = varmap.shift
        doc["log_base"] = varmap.log_base
    return json.dumps(doc, indent=1) + "\n"


def load_solution(text: str) -> dict:
    doc = json.loads(text)
    for key in ("status", "events"):
        if key not in doc:
            raise InputError(f"solution is missing {key!r}")
    return doc
