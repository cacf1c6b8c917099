"""N-ary AND/OR expressions over basic-event literals.

Expressions are immutable DAGs: a sub-expression shared by several parents is
one object, and every traversal here visits it once (memoised on ``id``).
All traversals are iterative, so generated trees hundreds of levels deep are
fine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Union


@dataclass(frozen=True)
class Lit:
    """Leaf: a basic event, optionally negated."""

    event: int
    negated: bool = False

    def __invert__(self) -> Lit:
        return Lit(self.event, not self.negated)


@dataclass(frozen=True)
class And:
    children: tuple


@dataclass(frozen=True)
class Or:
    children: tuple


BoolExpr = Union[Lit, And, Or]


def is_gate(e) -> bool:
    return isinstance(e, (And, Or))


def postorder(root: BoolExpr) -> Iterator[BoolExpr]:
    """Yield every distinct vertex once, children before parents."""
    seen = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if id(node) in seen:
            continue
        if expanded or isinstance(node, Lit):
            seen.add(id(node))
            yield node
            continue
        stack.append((node, True))
        for child in reversed(node.children):
            if id(child) not in seen:
                stack.append((child, False))


def rebuild(
    root: BoolExpr,
    leaf: Callable[[Lit], BoolExpr],
    gate: Callable[[BoolExpr, tuple], BoolExpr],
) -> BoolExpr:
    """Structure-preserving map. ``gate(old, new_children)`` builds each vertex."""
    memo: dict[int, BoolExpr] = {}
    for node in postorder(root):
        if isinstance(node, Lit):
            memo[id(node)] = leaf(node)
        else:
            memo[id(node)] = gate(node, tuple(memo[id(c)] for c in node.children))
    return memo[id(root)]


def has_negation(root: BoolExpr) -> bool:
    return any(isinstance(v, Lit) and v.negated for v in postorder(root))


def events_of(root: BoolExpr) -> set[int]:
    return {v.event for v in postorder(root) if isinstance(v, Lit)}


def evaluate_expr(root: BoolExpr, true_events) -> bool:
    """Truth value when exactly ``true_events`` hold."""
    true_events = set(true_events)
    val: dict[int, bool] = {}
    for node in postorder(root):
        if isinstance(node, Lit):
            val[id(node)] = (node.event in true_events) != node.negated
        elif isinstance(node, And):
            val[id(node)] = all(val[id(c)] for c in node.children)
        else:
            val[id(node)] = any(val[id(c)] for c in node.children)
    return val[id(root)]


def to_str(root: BoolExpr, names: Callable[[int], str] | None = None) -> str:
    """Infix rendering, e.g. ``(x1 & x2) | ~x3``. Shared vertices are expanded."""
    names = names or (lambda e: f"x{e}")
    text: dict[int, str] = {}
    for node in postorder(root):
        if isinstance(node, Lit):
            text[id(node)] = ("~" if node.negated else "") + names(node.event)
            continue
        sep = " & " if isinstance(node, And) else " | "
        parts = []
        for c in node.children:
            s = text[id(c)]
            parts.append(f"({s})" if is_gate(c) and len(c.children) > 1 else s)
        text[id(node)] = sep.join(parts)
    return text[id(root)]
