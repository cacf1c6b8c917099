"""Seeded pseudo-random AND/OR fault trees.

Node ids: the root ``t`` is 0, logic nodes ``l_1..l_m`` are ``1..m`` and
basic events ``a_1..a_s`` are ``m+1..m+s``. Every gate-to-gate edge points
from a higher logic index to a lower one (or to ``t``), which makes the result
acyclic by construction.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass

from .core import P_MAX, P_MIN, BasicEvent, FaultTree, Gate
from .errors import ConfigError, InputError

ROOT = 0


def round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


@dataclass(frozen=True)
class GenConfig:
    n: int
    r_at: float
    r_and: float
    r_or: float
    k: int = 3
    seed: int = 0
    prob_lo: float = P_MIN
    prob_hi: float = P_MAX

    def sizes(self) -> tuple[int, int, int]:
        """(basic events, AND gates, OR gates)."""
        s = round_half_up(self.n * self.r_at)
        m = self.n - s
        logic = self.r_and + self.r_or
        n_and = round_half_up(m * self.r_and / logic) if logic > 0 else 0
        return s, n_and, m - n_and

    def check(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise ConfigError(f"n must be a positive integer, got {self.n!r}")
        for name in ("r_at", "r_and", "r_or"):
            r = getattr(self, name)
            if not 0.0 <= r <= 1.0:
                raise ConfigError(f"{name}={r} outside [0, 1]")
        total = self.r_at + self.r_and + self.r_or
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"ratios sum to {total}, expected 1")
        if not isinstance(self.k, int) or self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k!r}")
        if not (0 <= self.seed < 2**64):
            raise ConfigError("seed must fit in 64 unsigned bits")
        if not (0.0 < self.prob_lo < self.prob_hi < 1.0):
            raise ConfigError("need 0 < prob_lo < prob_hi < 1")
        s, n_and, n_or = self.sizes()
        if n_and + n_or < 1:
            raise ConfigError(f"n={self.n} yields no logic nodes")
        if s < self.k:
            raise ConfigError(f"n={self.n} yields {s} basic events, fewer than k={self.k}")

    @classmethod
    def from_json(cls, text: str) -> GenConfig:
        doc = json.loads(text)
        if "r" in doc:
            doc["r_at"], doc["r_and"], doc["r_or"] = doc.pop("r")
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def generate(config: GenConfig) -> FaultTree:
    config.check()
    rng = random.Random(config.seed)
    k = config.k
    s, n_and, n_or = config.sizes()
    m = n_and + n_or

    ops = ["and"] * n_and + ["or"] * n_or
    rng.shuffle(ops)
    logic = list(range(1, m + 1))
    atoms = list(range(m + 1, m + s + 1))
    probs = [rng.uniform(config.prob_lo, config.prob_hi) for _ in atoms]

    inputs: dict[int, list] = {i: [] for i in logic}
    has_parent = {1}  # l_1 feeds t
    for i in logic:
        ahead = list(range(i + 1, m + 1))
        if len(ahead) >= k:
            chosen = rng.sample(ahead, k)
        else:
            chosen = ahead + rng.sample(atoms, k - len(ahead))
        inputs[i].extend(chosen)
        has_parent.update(chosen)
        if i not in has_parent:
            h = rng.randint(1, i - 1)
            assert h < i
            inputs[h].append(i)
            has_parent.add(i)

    feeds: dict[int, set] = {a: set() for a in atoms}
    for g in logic:
        for c in inputs[g]:
            if c in feeds:
                feeds[c].add(g)
    for a in atoms:
        want = min(rng.randint(1, k), m - len(feeds[a]))
        # a random prefix long enough to hold `want` gates not yet fed by a
        draw = rng.sample(logic, min(m, want + len(feeds[a])))
        for g in [g for g in draw if g not in feeds[a]][:want]:
            inputs[g].append(a)

    nodes = [Gate(ROOT, "or", (1,))]
    nodes += [Gate(i, op, tuple(inputs[i])) for i, op in zip(logic, ops)]
    nodes += [BasicEvent(a, p) for a, p in zip(atoms, probs)]
    return FaultTree(nodes, ROOT)


@dataclass(frozen=True)
class CompositionStats:
    gNodes: int
    gEdges: int
    gAT: int
    gAND: int
    gOR: int


def composition(tree: FaultTree, include_root: bool = True) -> CompositionStats:
    """Node/edge counts. The top gate counts as whatever operator it carries
    (OR for generated trees); ``include_root=False`` leaves it and its
    outgoing edges out, giving the generator's class sizes."""
    at = n_and = n_or = edges = 0
    for nid, node in tree.nodes.items():
        if not include_root and nid == tree.top:
            continue
        if isinstance(node, BasicEvent):
            at += 1
            continue
        edges += len(node.inputs)
        if node.op == "and":
            n_and += 1
        else:
            n_or += 1
    return CompositionStats(at + n_and + n_or, edges, at, n_and, n_or)


def check_generated(tree: FaultTree) -> None:
    """Re-verify the ordering invariant of a generated tree."""
    for nid, node in tree.nodes.items():
        if isinstance(node, Gate):
            for c in node.inputs:
                if isinstance(tree.nodes[c], Gate) and not c > nid:
                    raise InputError(f"edge {c} -> {nid} breaks the index order")
