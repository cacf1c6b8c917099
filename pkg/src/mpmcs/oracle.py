"""Brute-force reference for minimal cut sets and the MPMCS.

Shares nothing with the MaxSAT path beyond the tree model. The default method
evaluates the tree on all 2**E event subsets at once: subset ``m`` (bit i set
when the i-th event occurs) is bit ``m`` of a Python integer, so each gate is
a single ``&``/``|`` over 2**E bits. Minimality is then decided from the
definition (no proper subset is a cut set) with a subset-closure transform,
without relying on monotonicity.
"""

from __future__ import annotations

import itertools

import numpy as np

from .core import BasicEvent, FaultTree, evaluate, joint_probability
from .encode import build_weights
from .errors import CapacityError, InputError
from .solve import MpmcsResult

DEFAULT_MAX_EVENTS = 20


class _Cube:
    """Bit patterns over the 2**E subsets of E events."""

    def __init__(self, e: int):
        self.e = e
        self.size = 1 << e
        self.full = (1 << self.size) - 1
        self.nbytes = max(1, self.size // 8)

    def var(self, i: int) -> int:
        """Subsets containing event i."""
        if self.size < 8:
            return sum(1 << m for m in range(self.size) if m >> i & 1)
        if i < 3:
            byte = (0xAA, 0xCC, 0xF0)[i]
            return int.from_bytes(bytes([byte]) * self.nbytes, "little")
        half = (1 << i) // 8
        return int.from_bytes((b"\x00" * half + b"\xff" * half) * (self.nbytes // (2 * half)), "little")

    def up(self, x: int, i: int) -> int:
        """Bit m of the result is bit m - 2**i of x, for m containing i."""
        return ((x & ~self.var(i)) << (1 << i)) & self.full

    def members(self, x: int) -> list:
        if self.size < 8:
            return [m for m in range(self.size) if x >> m & 1]
        bits = np.unpackbits(np.frombuffer(x.to_bytes(self.nbytes, "little"), np.uint8),
                             bitorder="little")
        return [int(m) for m in np.flatnonzero(bits)]


def _events(tree: FaultTree, max_events: int) -> list:
    events = tree.events
    if len(events) > max_events:
        raise CapacityError(f"{len(events)} events exceed the oracle limit of {max_events}")
    return events


def truth_table(tree: FaultTree, events=None) -> tuple[int, list]:
    """(bitset of cut-set masks, event order)."""
    events = list(tree.events if events is None else events)
    cube = _Cube(len(events))
    pos = {e: i for i, e in enumerate(events)}
    bits: dict[int, int] = {}
    for nid in tree.topological_order():
        n = tree.nodes[nid]
        if isinstance(n, BasicEvent):
            bits[nid] = cube.var(pos[nid])
        elif n.op == "and":
            acc = cube.full
            for c in n.inputs:
                acc &= bits[c]
            bits[nid] = acc
        else:
            acc = 0
            for c in n.inputs:
                acc |= bits[c]
            bits[nid] = acc
    return bits[tree.top], events


def enumerate_mcs(tree: FaultTree, max_events: int = DEFAULT_MAX_EVENTS, method: str = "bitset") -> list:
    """All minimal cut sets, ordered by size then by sorted members.

    ``method="subsets"`` is the literal ascending-cardinality loop, kept as a
    cross-check for small trees.
    """
    events = _events(tree, max_events)
    if method == "subsets":
        return _enumerate_by_subsets(tree, events)
    if method != "bitset":
        raise InputError(f"unknown method {method!r}")
    tt, _ = truth_table(tree, events)
    cube = _Cube(len(events))
    down = tt  # subsets having some cut-set subset (itself included)
    for i in range(len(events)):
        down |= cube.up(down, i)
    strict = 0  # subsets having a cut-set proper subset
    for i in range(len(events)):
        strict |= cube.up(down, i)
    minimal = tt & ~strict & cube.full
    out = [frozenset(events[i] for i in range(len(events)) if m >> i & 1) for m in cube.members(minimal)]
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def _enumerate_by_subsets(tree: FaultTree, events: list) -> list:
    found: list[frozenset] = []
    for size in range(1, len(events) + 1):
        for combo in itertools.combinations(events, size):
            s = frozenset(combo)
            if any(f <= s for f in found):
                continue
            if evaluate(tree, s):
                found.append(s)
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def mpmcs_brute(tree: FaultTree, max_events: int = DEFAULT_MAX_EVENTS,
                log_base="e", shift="auto") -> MpmcsResult:
    """Catalog member of largest joint probability (ties: smallest sorted ids)."""
    catalog = enumerate_mcs(tree, max_events)
    if not catalog:
        raise InputError("tree has no cut set")
    best = min(catalog, key=lambda s: (-joint_probability(tree, s), sorted(s)))
    weights, s = build_weights(tree, log_base, shift)
    cost = sum(weights[e] for e in best)
    return MpmcsResult(best, len(best), cost, cost / 10**s, joint_probability(tree, best))


def mpmcs_brute_int(tree: FaultTree, weights, max_events: int = DEFAULT_MAX_EVENTS):
    """(cut set, cost) minimising the integer weight sum over the catalog."""
    if any(w < 1 for w in weights.values()):
        raise InputError("oracle weights must be >= 1")
    catalog = enumerate_mcs(tree, max_events)
    if not catalog:
        raise InputError("tree has no cut set")
    best = min(catalog, key=lambda s: (sum(weights[e] for e in s), sorted(s)))
    return best, sum(weights[e] for e in best)


def is_cut_set_by_catalog(catalog, events) -> bool:
    events = frozenset(events)
    return any(m <= events for m in catalog)

