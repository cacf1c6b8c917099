"""Fault tree -> weighted partial MaxSAT.

Pipeline: ``to_expression`` gives f(t); :func:`flip_gates` swaps AND/OR to get
g(t); :func:`negate_to_nnf` pushes the negation of g(t) onto the leaves;
:func:`tseitin` turns that into hard clauses. Each basic event x_i gets a soft
unit clause (x_i) weighted by its scaled -log probability, so a falsified
event variable means "this event occurs" and pays its log cost.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass

from .core import FaultTree, to_expression, validate
from .errors import CapacityError, InputError
from .expr import And, BoolExpr, Lit, Or, has_negation, postorder, rebuild
from .wcnf import TOP, WcnfInstance

logger = logging.getLogger(__name__)


def flip_gates(expr: BoolExpr) -> BoolExpr:
    """Swap every AND with OR and vice versa; leaves stay positive."""
    if has_negation(expr):
        raise InputError("flip_gates expects a negation-free expression")
    return rebuild(
        expr,
        leaf=lambda v: v,
        gate=lambda g, kids: Or(kids) if isinstance(g, And) else And(kids),
    )


def negate_to_nnf(expr: BoolExpr) -> BoolExpr:
    """NNF of ``not expr`` by De Morgan: negate leaves, swap gates."""
    if has_negation(expr):
        raise InputError("negate_to_nnf expects a negation-free expression")
    return rebuild(
        expr,
        leaf=lambda v: ~v,
        gate=lambda g, kids: Or(kids) if isinstance(g, And) else And(kids),
    )


@dataclass(frozen=True)
class TseitinResult:
    hard: tuple
    num_vars: int
    aux_from: int
    aux_to: int  # aux_to < aux_from when no auxiliary was needed

    @property
    def num_clauses(self) -> int:
        return len(self.hard)


def tseitin(expr: BoolExpr, event_to_var) -> TseitinResult:
    """Biconditional Tseitin encoding of ``expr``, root asserted as a unit.

    Each gate vertex v with two or more distinct child literals gets an
    auxiliary z_v and the clauses of z_v <-> op(children). Vertices reduced
    to a single literal reuse it. Auxiliaries are numbered after the largest
    event variable in post-order; clauses come out in the same order.
    """
    first_aux = max(event_to_var.values(), default=0) + 1
    nxt = first_aux
    hard: list[tuple] = []
    lit_of: dict[int, int] = {}
    for node in postorder(expr):
        if isinstance(node, Lit):
            try:
                var = event_to_var[node.event]
            except KeyError:
                raise InputError(f"event {node.event} has no variable") from None
            lit_of[id(node)] = -var if node.negated else var
            continue
        kids = list(dict.fromkeys(lit_of[id(c)] for c in node.children))
        if len(kids) == 1:
            lit_of[id(node)] = kids[0]
            continue
        z = nxt
        nxt += 1
        if isinstance(node, And):
            hard.extend((-z, c) for c in kids)
            hard.append((z, *(-c for c in kids)))
        else:
            hard.append((-z, *kids))
            hard.extend((z, -c) for c in kids)
        lit_of[id(node)] = z
    hard.append((lit_of[id(expr)],))
    return TseitinResult(tuple(hard), nxt - 1, first_aux, nxt - 1)


# --------------------------------------------------------------------------
# weights


def round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def compute_shift(values) -> int:
    """Smallest s >= 0 with min(values) * 10**s >= 1."""
    values = list(values)
    if not values:
        raise InputError("compute_shift needs at least one value")
    lo = min(values)
    if not lo > 0 or not math.isfinite(lo):
        raise InputError("compute_shift needs positive finite values")
    s = max(0, math.ceil(-math.log10(lo)) - 1)
    # relative slack absorbs float noise such as 0.001 -> 0.0009999999999
    while lo * 10**s < 1.0 - 1e-9:
        s += 1
    while s > 0 and lo * 10 ** (s - 1) >= 1.0 - 1e-9:
        s -= 1
    return s


def shift_values(values, s: int) -> list:
    return [round_half_up(v * 10**s) for v in values]


def parse_log_base(base) -> float:
    if base in ("e", None):
        return math.e
    try:
        b = float(base)
    except (TypeError, ValueError):
        raise InputError(f"bad log base {base!r}") from None
    if not (b > 0 and b != 1 and math.isfinite(b)):
        raise InputError(f"bad log base {base!r}")
    return b


def log_base_label(base) -> str:
    b = parse_log_base(base)
    if b == math.e:
        return "e"
    return str(int(b)) if b.is_integer() else repr(b)


def neg_log(p: float, base=math.e) -> float:
    return -math.log(p) / math.log(parse_log_base(base))


def build_weights(tree: FaultTree, log_base="e", shift="auto", top: int = TOP):
    """Integer soft weights per basic event.

    ``w = max(1, round_half_up(-log_base(p) * 10**shift))``. With
    ``shift="auto"`` the shift is :func:`compute_shift` over the -log values.
    Either way the shift is lowered while the weights sum to ``top`` or more.
    Returns ``(weights, shift)``.
    """
    base = parse_log_base(log_base)
    events = tree.events
    for e in events:
        p = tree.probability(e)
        if not (0.0 < p < 1.0):
            raise InputError(f"event {e}: probability {p!r} outside (0, 1)")
    costs = {e: -math.log(tree.probability(e)) / math.log(base) for e in events}
    if not events:
        return {}, 0
    if shift == "auto" or shift is None:
        s = compute_shift(costs.values())
    else:
        s = int(shift)
        if s < 0:
            raise InputError("shift must be non-negative")
    requested = s
    while True:
        weights = {e: max(1, round_half_up(c * 10**s)) for e, c in costs.items()}
        if sum(weights.values()) < top:
            break
        if s == 0:
            raise CapacityError("soft weights reach the top weight even without shifting")
        s -= 1
    if s != requested:
        logger.warning("shift lowered from %d to %d to keep soft weights below top", requested, s)
    return weights, s


# --------------------------------------------------------------------------
# full encoding


@dataclass(frozen=True)
class VarMap:
    event_to_var: dict
    aux_from: int
    aux_to: int
    shift: int
    log_base: str = "e"

    @property
    def var_to_event(self) -> dict:
        return {v: e for e, v in self.event_to_var.items()}

    def to_json(self) -> str:
        doc = {
            "events": {str(e): v for e, v in sorted(self.event_to_var.items())},
            "aux_from": self.aux_from,
            "aux_to": self.aux_to,
            "shift": self.shift,
            "log_base": self.log_base,
        }
        return json.dumps(doc, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> VarMap:
        doc = json.loads(text)
        return cls(
            {int(e): int(v) for e, v in doc["events"].items()},
            int(doc["aux_from"]),
            int(doc["aux_to"]),
            int(doc["shift"]),
            log_base_label(doc.get("log_base", "e")),
        )


def encode(tree: FaultTree, log_base="e", shift="auto"):
    """Return ``(WcnfInstance, VarMap)`` for the MPMCS problem of ``tree``."""
    report = validate(tree)
    if not report.is_valid:
        raise InputError("invalid fault tree: " + "; ".join(v.message for v in report.errors))
    events = tree.events
    event_to_var = {e: i for i, e in enumerate(events, start=1)}
    weights, s = build_weights(tree, log_base, shift)
    expr = negate_to_nnf(flip_gates(to_expression(tree)))
    ts = tseitin(expr, event_to_var)
    soft = tuple((weights[e], (event_to_var[e],)) for e in events)
    num_vars = max(ts.num_vars, len(events))
    instance = WcnfInstance(num_vars, ts.hard, soft, TOP)
    varmap = VarMap(event_to_var, ts.aux_from, ts.aux_to, s, log_base_label(log_base))
    return instance, varmap


def event_weights(instance: WcnfInstance, varmap: VarMap) -> dict:
    """Soft weight per event id, read back from an instance."""
    by_var = {c[0]: w for w, c in instance.soft if len(c) == 1 and c[0] > 0}
    return {e: by_var.get(v, 0) for e, v in varmap.event_to_var.items()}

