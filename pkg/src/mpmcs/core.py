"""Fault-tree model: nodes, validation, Boolean semantics and cut-set predicates.

A fault tree is a DAG. Leaves are basic events carrying an independent
failure probability; internal nodes are n-ary AND/OR gates; ``top`` names the
root gate. Gate inputs are stored child-side, so an edge ``a -> g`` in the
usual drawing is ``a in g.inputs``.
"""

from __future__ import annotations

import json
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Union

from .errors import InputError, ParseError
from .expr import And, BoolExpr, Lit, Or

logger = logging.getLogger(__name__)

P_MIN = 1e-9
P_MAX = 1.0 - 1e-9
FORMAT_VERSION = 1


@dataclass(frozen=True)
class BasicEvent:
    id: int
    probability: float


@dataclass(frozen=True)
class Gate:
    id: int
    op: str  # "and" | "or"
    inputs: tuple

    def __post_init__(self):
        if self.op not in ("and", "or"):
            raise InputError(f"gate {self.id}: unknown operator {self.op!r}")
        object.__setattr__(self, "inputs", tuple(self.inputs))


Node = Union[BasicEvent, Gate]


class FaultTree:
    """Immutable id-indexed collection of nodes under a single top gate.

    Construction only rejects what cannot be represented (duplicate ids).
    Everything else, including cycles, is reported by :func:`validate`.
    """

    def __init__(self, nodes: Iterable[Node], top: int):
        table: dict[int, Node] = {}
        for node in nodes:
            if node.id in table:
                raise InputError(f"duplicate node id {node.id}")
            table[node.id] = node
        self._nodes = table
        self.top = top
        self._order = None
        self._parents = None

    @classmethod
    def build(cls, top: int, events: Mapping[int, float], gates: Mapping[int, tuple]):
        """Shorthand: ``events={id: p}``, ``gates={id: (op, [inputs])}``."""
        nodes: list[Node] = [BasicEvent(i, p) for i, p in events.items()]
        nodes += [Gate(i, op, tuple(ins)) for i, (op, ins) in gates.items()]
        return cls(nodes, top)

    @property
    def nodes(self) -> Mapping[int, Node]:
        return MappingProxyType(self._nodes)

    def __getitem__(self, node_id: int) -> Node:
        return self._nodes[node_id]

    def __contains__(self, node_id) -> bool:
        return node_id in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FaultTree):
            return NotImplemented
        return self.top == other.top and self._nodes == other._nodes

    def __repr__(self) -> str:
        return f"FaultTree(top={self.top}, events={len(self.events)}, gates={len(self.gates)})"

    @property
    def events(self) -> list[int]:
        return sorted(i for i, n in self._nodes.items() if isinstance(n, BasicEvent))

    @property
    def gates(self) -> list[int]:
        return sorted(i for i, n in self._nodes.items() if isinstance(n, Gate))

    def probability(self, event: int) -> float:
        node = self._nodes.get(event)
        if not isinstance(node, BasicEvent):
            raise InputError(f"{event} is not a basic event of this tree")
        return node.probability

    def parents(self) -> Mapping[int, list]:
        """Map node id -> ids of gates listing it as an input."""
        if self._parents is None:
            par: dict[int, list] = {i: [] for i in self._nodes}
            for n in self._nodes.values():
                if isinstance(n, Gate):
                    for c in n.inputs:
                        par.setdefault(c, []).append(n.id)
            self._parents = par
        return self._parents

    def topological_order(self) -> list[int]:
        """Ids reachable from top, every node after all of its inputs."""
        if self._order is None:
            if self.top not in self._nodes:
                raise InputError(f"top {self.top} is not a node")
            order, state = [], {}
            stack = [(self.top, False)]
            while stack:
                nid, done = stack.pop()
                if done:
                    state[nid] = 2
                    order.append(nid)
                    continue
                if state.get(nid) == 2:
                    continue
                if state.get(nid) == 1:
                    raise InputError(f"cycle through node {nid}")
                node = self._nodes.get(nid)
                if node is None:
                    raise InputError(f"unknown input {nid}")
                state[nid] = 1
                stack.append((nid, True))
                if isinstance(node, Gate):
                    for c in reversed(node.inputs):
                        if state.get(c) == 1:
                            raise InputError(f"cycle through node {c}")
                        if state.get(c) != 2:
                            stack.append((c, False))
            self._order = order
        return self._order


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    kind: str
    node: int | None
    message: str
    severity: str = "error"


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def errors(self) -> list:
        return [v for v in self.violations if v.severity == "error"]

    @property
    def warnings(self) -> list:
        return [v for v in self.violations if v.severity == "warning"]

    @property
    def is_valid(self) -> bool:
        return not self.errors

    def __bool__(self) -> bool:
        return bool(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    def kinds(self) -> set:
        return {v.kind for v in self.violations}


def validate(tree: FaultTree) -> ValidationReport:
    """Check every structural invariant; problems are returned, never raised."""
    out: list[Violation] = []
    nodes = tree.nodes
    top = nodes.get(tree.top)
    if top is None:
        out.append(Violation("top-missing", tree.top, f"top {tree.top} is not a node"))
    elif not isinstance(top, Gate):
        out.append(Violation("top-not-gate", tree.top, "top must be a gate"))

    for nid in sorted(nodes):
        node = nodes[nid]
        if isinstance(node, BasicEvent):
            p = node.probability
            if not (isinstance(p, (int, float)) and math.isfinite(p) and 0.0 < p < 1.0):
                out.append(Violation("probability-range", nid, f"p={p!r} outside (0, 1)"))
            continue
        if not node.inputs:
            out.append(Violation("empty-gate", nid, "gate has no inputs"))
        if len(set(node.inputs)) != len(node.inputs):
            out.append(Violation("duplicate-input", nid, "gate lists an input twice"))
        for c in node.inputs:
            if c not in nodes:
                out.append(Violation("missing-input", nid, f"input {c} does not exist"))

    for nid in _cycle_nodes(nodes):
        out.append(Violation("cycle", nid, f"node {nid} lies on a cycle"))

    if top is not None:
        seen = {tree.top}
        queue = deque([tree.top])
        while queue:
            n = nodes.get(queue.popleft())
            if isinstance(n, Gate):
                for c in n.inputs:
                    if c in nodes and c not in seen:
                        seen.add(c)
                        queue.append(c)
        for nid in sorted(set(nodes) - seen):
            out.append(Violation("unreachable", nid, "not reachable from top", "warning"))
    return ValidationReport(out)


def _cycle_nodes(nodes: Mapping[int, Node]) -> list[int]:
    """Nodes on some directed cycle (Kahn's algorithm leftovers, trimmed)."""
    indeg = {i: 0 for i in nodes}
    for n in nodes.values():
        if isinstance(n, Gate):
            for c in set(n.inputs):
                if c in nodes:
                    indeg[c] += 1
    queue = deque(i for i, d in indeg.items() if d == 0)
    removed = set()
    while queue:
        i = queue.popleft()
        removed.add(i)
        n = nodes[i]
        if isinstance(n, Gate):
            for c in set(n.inputs):
                if c in nodes:
                    indeg[c] -= 1
                    if indeg[c] == 0:
                        queue.append(c)
    # Leftovers are on a cycle or downstream of one; keep those that can reach
    # themselves.
    rest = set(nodes) - removed
    on_cycle = []
    for i in sorted(rest):
        stack, seen = [i], set()
        found = False
        while stack and not found:
            n = nodes[stack.pop()]
            if not isinstance(n, Gate):
                continue
            for c in n.inputs:
                if c == i:
                    found = True
                    break
                if c in rest and c not in seen:
                    seen.add(c)
                    stack.append(c)
        if found:
            on_cycle.append(i)
    return on_cycle


# --------------------------------------------------------------------------
# semantics


def _check_events(tree: FaultTree, events) -> frozenset:
    events = frozenset(events)
    for e in events:
        if not isinstance(tree.nodes.get(e), BasicEvent):
            raise InputError(f"{e!r} is not a basic event of this tree")
    return events


def _eval(tree: FaultTree, occurring: frozenset) -> bool:
    nodes = tree.nodes
    val: dict[int, bool] = {}
    for nid in tree.topological_order():
        n = nodes[nid]
        if isinstance(n, BasicEvent):
            val[nid] = nid in occurring
        elif n.op == "and":
            val[nid] = all(val[c] for c in n.inputs)
        else:
            val[nid] = any(val[c] for c in n.inputs)
    return val[tree.top]


def evaluate(tree: FaultTree, occurring) -> bool:
    """Truth of the top event when exactly the events in ``occurring`` happen."""
    return _eval(tree, _check_events(tree, occurring))


def is_cut_set(tree: FaultTree, events) -> bool:
    return _eval(tree, _check_events(tree, events))


def is_minimal_cut_set(tree: FaultTree, events) -> bool:
    """Cut set from which no single event can be dropped.

    AND/OR formulas without negation are monotone: if some proper subset T of
    S were a cut set, then so would be every set between T and S, in
    particular S minus one element. Checking the |S| single removals is
    therefore equivalent to checking all proper subsets.
    """
    events = _check_events(tree, events)
    if not _eval(tree, events):
        return False
    return not any(_eval(tree, events - {e}) for e in events)


def joint_probability(tree: FaultTree, events) -> float:
    """Product of the event probabilities (events are independent)."""
    events = _check_events(tree, events)
    if not events:
        raise InputError("joint probability of an empty set is undefined")
    return math.prod(tree.probability(e) for e in sorted(events))


def to_expression(tree: FaultTree) -> BoolExpr:
    """Boolean formula of the top event; shared sub-DAGs stay shared.

    Unary gates collapse onto their single input.
    """
    nodes = tree.nodes
    built: dict[int, BoolExpr] = {}
    for nid in tree.topological_order():
        n = nodes[nid]
        if isinstance(n, BasicEvent):
            built[nid] = Lit(nid)
        elif len(n.inputs) == 1:
            built[nid] = built[n.inputs[0]]
        else:
            kids = tuple(built[c] for c in n.inputs)
            built[nid] = And(kids) if n.op == "and" else Or(kids)
    return built[tree.top]


# --------------------------------------------------------------------------
# serialization


def tree_to_json(tree: FaultTree) -> str:
    """Versioned JSON, one node per line, nodes in id order."""
    lines = []
    for nid in sorted(tree.nodes):
        n = tree.nodes[nid]
        if isinstance(n, BasicEvent):
            d = {"id": nid, "kind": "event", "p": n.probability}
        else:
            d = {"id": nid, "kind": n.op, "inputs": list(n.inputs)}
        lines.append("  " + json.dumps(d, separators=(", ", ": ")))
    body = ",\n".join(lines)
    return f'{{"version": {FORMAT_VERSION}, "top": {tree.top}, "nodes": [\n{body}\n]}}\n'


def tree_from_json(text: str, clamp: bool = True) -> FaultTree:
    """Parse the tree format. Out-of-range probabilities are clamped into
    [P_MIN, P_MAX] with a logged warning unless ``clamp`` is false."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if not isinstance(doc, dict) or doc.get("version") != FORMAT_VERSION:
        raise ParseError(f"expected a version {FORMAT_VERSION} fault-tree document")
    try:
        top = doc["top"]
        raw = doc["nodes"]
        nodes: list[Node] = []
        for d in raw:
            nid, kind = d["id"], d["kind"]
            if not isinstance(nid, int) or isinstance(nid, bool) or nid < 0:
                raise ParseError(f"invalid node id {nid!r}")
            if kind == "event":
                p = float(d["p"])
                if clamp and not (P_MIN <= p <= P_MAX):
                    q = min(max(p, P_MIN), P_MAX) if math.isfinite(p) else P_MIN
                    logger.warning("event %d: probability %r clamped to %r", nid, p, q)
                    p = q
                nodes.append(BasicEvent(nid, p))
            elif kind in ("and", "or"):
                nodes.append(Gate(nid, kind, tuple(int(c) for c in d["inputs"])))
            else:
                raise ParseError(f"node {nid}: unknown kind {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed node entry: {exc}") from None
    return FaultTree(nodes, top)


def load_tree(path, clamp: bool = True) -> FaultTree:
    with open(path, encoding="utf-8") as fh:
        return tree_from_json(fh.read(), clamp=clamp)


def save_tree(tree: FaultTree, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(tree_to_json(tree))


def to_dot(tree: FaultTree) -> str:
    """Graphviz rendering, edges drawn child -> parent."""
    out = ["digraph faulttree {", "  rankdir=BT;"]
    for nid in sorted(tree.nodes):
        n = tree.nodes[nid]
        if isinstance(n, BasicEvent):
            out.append(f'  n{nid} [shape=circle, label="{nid}\\np={n.probability:.3g}"];')
        else:
            shape = "box" if n.op == "and" else "diamond"
            out.append(f'  n{nid} [shape={shape}, label="{n.op.upper()} {nid}"];')
            out.extend(f"  n{c} -> n{nid};" for c in n.inputs)
    out.append("}")
    return "\n".join(out) + "\n"
