"""Exact weighted partial MaxSAT search for unit-soft instances.

The engine branches only on variables that carry a soft penalty. For MPMCS
instances every other variable is a Tseitin auxiliary, and with the
biconditional encoding those are fixed by unit propagation as soon as the
event variables are set. Variables that propagation leaves open (general
instances) are branched on last, at zero cost.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field
from enum import Enum

from .errors import InputError
from .wcnf import WcnfInstance


class Status(str, Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNKNOWN = "unknown"


@dataclass
class MaxSatOutcome:
    status: Status
    model: tuple | None = None  # model[v - 1] is the value of variable v
    cost: int | None = None
    strategy_id: str = ""
    elapsed: float = 0.0
    trace: list = field(default_factory=list)  # (elapsed, cost) per incumbent

    @property
    def has_model(self) -> bool:
        return self.model is not None


class Propagator:
    """Two-watched-literal unit propagation over the hard clauses.

    Keeps a chronological trail and the running soft penalty of the current
    partial assignment. Values: -1 unassigned, 0 false, 1 true.
    """

    def __init__(self, instance: WcnfInstance):
        n = instance.num_vars
        self.num_vars = n
        self.value = [-1] * (n + 1)
        self.trail: list[int] = []
        self.qhead = 0
        self.cost = 0
        self.pen_false = [0] * (n + 1)
        self.pen_true = [0] * (n + 1)
        for w, c in instance.soft:
            if len(c) != 1:
                raise InputError("only unit soft clauses are supported")
            lit = c[0]
            if lit > 0:
                self.pen_false[lit] += w
            else:
                self.pen_true[-lit] += w
        self.watches: list[list[int]] = [[] for _ in range(2 * n + 1)]
        self.clauses: list[list[int]] = []
        self.root_conflict = False
        units = []
        for c in instance.hard:
            lits = list(dict.fromkeys(c))
            if any(-l in lits for l in lits):
                continue
            if not lits:
                self.root_conflict = True
            elif len(lits) == 1:
                units.append(lits[0])
            else:
                ci = len(self.clauses)
                self.clauses.append(lits)
                self.watches[lits[0] + n].append(ci)
                self.watches[lits[1] + n].append(ci)
        for lit in units:
            x = self.value[abs(lit)]
            if x < 0:
                self.assign(lit)
            elif (x == 1) != (lit > 0):
                self.root_conflict = True
        if not self.root_conflict and not self.propagate():
            self.root_conflict = True
        self.base = len(self.trail)

    def assign(self, lit: int) -> None:
        if lit > 0:
            self.value[lit] = 1
            self.cost += self.pen_true[lit]
        else:
            self.value[-lit] = 0
            self.cost += self.pen_false[-lit]
        self.trail.append(lit)

    def undo(self, length: int) -> None:
        value, trail = self.value, self.trail
        while len(trail) > length:
            lit = trail.pop()
            if lit > 0:
                value[lit] = -1
                self.cost -= self.pen_true[lit]
            else:
                value[-lit] = -1
                self.cost -= self.pen_false[-lit]
        self.qhead = min(self.qhead, length)

    def propagate(self) -> bool:
        """Run unit propagation to fixpoint; False on conflict."""
        value, trail, watches, clauses = self.value, self.trail, self.watches, self.clauses
        off = self.num_vars
        while self.qhead < len(trail):
            fl = -trail[self.qhead]
            self.qhead += 1
            ws = watches[fl + off]
            i = j = 0
            nws = len(ws)
            while i < nws:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c[0] == fl:
                    c[0] = c[1]
                    c[1] = fl
                first = c[0]
                x = value[first] if first > 0 else value[-first]
                if x >= 0 and (x == 1) == (first > 0):
                    ws[j] = ci
                    j += 1
                    continue
                for kk in range(2, len(c)):
                    l = c[kk]
                    y = value[l] if l > 0 else value[-l]
                    if y < 0 or (y == 1) == (l > 0):
                        c[1] = l
                        c[kk] = fl
                        watches[l + off].append(ci)
                        break
                else:
                    ws[j] = ci
                    j += 1
                    if x >= 0:
                        while i < nws:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.qhead = len(trail)
                        return False
                    self.assign(first)
            del ws[j:]
        return True

    def snapshot(self) -> tuple:
        return tuple(v == 1 for v in self.value[1:])

    def complete(self) -> bool:
        return all(v >= 0 for v in self.value[1:])


# Minimum time granted to the tie-breaking pass after optimality is proven.
CANON_SLICE = 1.0


class _Stopped(Exception):
    pass


class BranchAndBound:
    """Depth-first branch and bound with incumbent pruning.

    ``order`` is "index" (ascending variable), "weight-desc" or "weight-asc";
    ``cheap_first`` tries the penalty-free value of each variable first.
    Pruning uses the accumulated penalty only. A greedy incumbent (cheapest
    penalties paid first, then made locally minimal) seeds the bound.
    """

    def __init__(self, name="bnb", order="index", cheap_first=True, greedy=True,
                 minimize=True, canonical=True):
        if order not in ("index", "weight-desc", "weight-asc"):
            raise InputError(f"unknown variable order {order!r}")
        self.name = name
        self.order = order
        self.cheap_first = cheap_first
        self.greedy = greedy
        self.minimize = minimize
        self.canonical = canonical

    def __repr__(self):
        return f"BranchAndBound({self.name!r}, order={self.order!r}, cheap_first={self.cheap_first})"

    def __call__(self, instance: WcnfInstance, deadline: float = math.inf,
                 stop: threading.Event | None = None, on_incumbent=None,
                 upper_bound: int | None = None) -> MaxSatOutcome:
        return _Run(self, instance, deadline, stop, on_incumbent, upper_bound).execute()


class _Run:
    def __init__(self, strat, instance, deadline, stop, on_incumbent, upper_bound):
        self.s = strat
        self.instance = instance
        self.deadline = deadline
        self.stop = stop or threading.Event()
        self.on_incumbent = on_incumbent
        self.t0 = time.monotonic()
        self.prop = Propagator(instance)
        self.checker = Propagator(instance)
        self.best_cost = math.inf
        self.best_model = None
        self.trace = []
        self.bound = math.inf if upper_bound is None else upper_bound + 1
        self.ticks = 0
        self.timed_out = False
        self.cancelled = False

        p = self.prop
        n = instance.num_vars
        soft = [v for v in range(1, n + 1) if p.pen_false[v] or p.pen_true[v]]
        # cheap value of a soft variable and the extra penalty of the other one
        self.cheap = [True] * (n + 1)
        self.extra = [0] * (n + 1)
        for v in soft:
            self.cheap[v] = p.pen_false[v] >= p.pen_true[v]
            self.extra[v] = abs(p.pen_false[v] - p.pen_true[v])
        self.soft = soft
        if strat.order == "weight-desc":
            soft_order = sorted(soft, key=lambda v: (-self.extra[v], v))
        elif strat.order == "weight-asc":
            soft_order = sorted(soft, key=lambda v: (self.extra[v], v))
        else:
            soft_order = soft
        softset = set(soft)
        self.rest = [v for v in range(1, n + 1) if v not in softset]
        self.order = soft_order + self.rest

    # -- bookkeeping -------------------------------------------------------

    def _elapsed(self):
        return time.monotonic() - self.t0

    def _poll(self):
        self.ticks += 1
        if self.stop.is_set():
            self.cancelled = True
            raise _Stopped
        if self.ticks & 63 == 0 and time.monotonic() > self.deadline:
            self.timed_out = True
            raise _Stopped

    def _offer(self, model, cost):
        if cost < self.best_cost:
            self.best_cost = cost
            self.best_model = model
            self.bound = min(self.bound, cost)
            self.trace.append((self._elapsed(), cost))
            if self.on_incumbent is not None:
                self.on_incumbent(cost, model, self.s.name)

    # -- fixed-assignment checks (on the separate checker) ----------------

    def _check(self, values: dict):
        """Model extending the soft-variable values, or None."""
        c = self.checker
        if c.root_conflict:
            return None
        c.undo(c.base)
        for v, b in values.items():
            x = c.value[v]
            if x < 0:
                c.assign(v if b else -v)
            elif (x == 1) != b:
                return None
        if not c.propagate() or not c.complete():
            return None
        return c.snapshot(), c.cost

    def _greedy(self):
        order = sorted(self.soft, key=lambda v: (self.extra[v], v))

        def plan(j):
            return {v: (not self.cheap[v]) if i < j else self.cheap[v] for i, v in enumerate(order)}

        if self._check(plan(len(order))) is None:
            return None
        lo, hi = -1, len(order)  # plan(hi) feasible
        while hi - lo > 1:
            self._poll()
            mid = (lo + hi) // 2
            if self._check(plan(mid)) is not None:
                hi = mid
            else:
                lo = mid
        return self._check(plan(hi))

    def _shrink(self, model, cost):
        """Move paid soft variables back to their cheap value while feasible.

        Works incrementally on the checker: unpaid variables are fixed first,
        then each paid one (most expensive first) is tentatively made cheap
        and accepted if paying for every still-undecided one completes a
        model. That completion was feasible before the step, so rejected
        variables can always fall back to their paid value.
        """
        c = self.checker
        c.undo(c.base)
        cheap = self.cheap
        paid = [v for v in self.soft if model[v - 1] != cheap[v]]
        keep = set(paid)
        for v in self.soft:
            if v in keep:
                continue
            x = c.value[v]
            if x < 0:
                c.assign(v if cheap[v] else -v)
            elif (x == 1) != cheap[v]:
                return model, cost
        if not c.propagate():
            return model, cost
        paid.sort(key=lambda v: (-self.extra[v], v))
        for idx, v in enumerate(paid):
            self._poll()
            if c.value[v] >= 0:
                continue
            mark = len(c.trail)
            c.assign(v if cheap[v] else -v)
            if c.propagate():
                mark_v = len(c.trail)
                for u in paid[idx + 1:]:
                    if c.value[u] < 0:
                        c.assign(-u if cheap[u] else u)
                accepted = c.propagate() and c.complete()
                c.undo(mark_v)
                if accepted:
                    continue
            c.undo(mark)
            c.assign(-v if cheap[v] else v)
            c.propagate()
        if not c.complete():
            return model, cost
        return c.snapshot(), c.cost

    # -- search ------------------------------------------------------------

    def _dfs(self, order, first_value, on_leaf):
        """Exhaust the tree under ``self.bound``. ``on_leaf`` returns False to stop."""
        p = self.prop
        p.undo(p.base)
        value = p.value
        frames = []  # [position, var, alternative value or None, trail length]
        backtrack = False
        while True:
            self._poll()
            if not backtrack:
                if p.cost >= self.bound:
                    backtrack = True
                else:
                    pos = frames[-1][0] + 1 if frames else 0
                    while pos < len(order) and value[order[pos]] >= 0:
                        pos += 1
                    if pos == len(order):
                        if not on_leaf(p.snapshot(), p.cost):
                            return False
                        backtrack = True
                    else:
                        v = order[pos]
                        b = first_value(v)
                        frames.append([pos, v, not b, len(p.trail)])
                        p.assign(v if b else -v)
                        if not p.propagate():
                            backtrack = True
            if backtrack:
                while frames:
                    top = frames[-1]
                    p.undo(top[3])
                    if top[2] is None:
                        frames.pop()
                        continue
                    v, b = top[1], top[2]
                    top[2] = None
                    p.assign(v if b else -v)
                    if p.propagate() and p.cost < self.bound:
                        backtrack = False
                        break
                else:
                    return True

    def _leaf(self, model, cost):
        if self.s.minimize:
            model, cost = self._shrink(model, cost)
        self._offer(model, cost)
        return True

    def execute(self) -> MaxSatOutcome:
        if self.prop.root_conflict:
            return self._result(Status.INFEASIBLE)
        exhausted = False
        try:
            if self.s.greedy:
                got = self._greedy()
                if got is not None:
                    self._offer(*got)
                    if self.s.minimize:
                        self._offer(*self._shrink(*got))
            if self.s.cheap_first:
                first = self.cheap.__getitem__
            else:
                first = lambda v: not self.cheap[v]  # noqa: E731
            exhausted = self._dfs(self.order, first, self._leaf)
        except _Stopped:
            pass
        if not exhausted:
            if self.cancelled:
                return self._result(Status.UNKNOWN, keep_model=False)
            return self._result(Status.FEASIBLE if self.best_model else Status.UNKNOWN)
        if self.best_model is None:
            # with a caller-supplied bound an empty search proves nothing
            infeasible = self.bound == math.inf
            return self._result(Status.INFEASIBLE if infeasible else Status.UNKNOWN)
        if self.s.canonical:
            self._canonicalize()
        return self._result(Status.OPTIMAL)

    def _canonicalize(self):
        """Among optimal models, pick the lexicographically smallest set of
        penalised variables: ascending order, paid value first, bound opt+1."""
        found = []

        def leaf(model, cost):
            found.append((model, cost))
            return False

        self.bound = self.best_cost + 1
        order = self.soft + self.rest
        saved = self.deadline
        self.deadline = min(saved, time.monotonic() + max(CANON_SLICE, self._elapsed()))
        try:
            self._dfs(order, lambda v: not self.cheap[v], leaf)
        except _Stopped:
            return
        finally:
            self.deadline = saved
            self.timed_out = False
        if found and found[0][1] == self.best_cost:
            self.best_model = found[0][0]

    def _result(self, status, keep_model=True):
        has = keep_model and self.best_model is not None
        return MaxSatOutcome(
            status=status,
            model=self.best_model if has else None,
            cost=self.best_cost if has else None,
            strategy_id=self.s.name,
            elapsed=self._elapsed(),
            trace=list(self.trace),
        )


STRATEGIES = {
    "bnb": lambda: BranchAndBound("bnb", order="index", cheap_first=True),
    "bnb-flip": lambda: BranchAndBound("bnb-flip", order="weight-desc", cheap_first=False),
    "bnb-heavy": lambda: BranchAndBound("bnb-heavy", order="weight-desc", cheap_first=True),
}
DEFAULT_STRATEGIES = ("bnb", "bnb-flip")


def make_strategy(name: str) -> BranchAndBound:
    try:
        return STRATEGIES[name]()
    except KeyError:
        raise InputError(f"unknown strategy {name!r}; known: {', '.join(STRATEGIES)}") from None
