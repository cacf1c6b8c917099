"""Fixtures and small utilities shared across the test modules."""

from __future__ import annotations

import contextlib
import itertools
import random

from mpmcs.core import FaultTree
from mpmcs.expr import And, Lit, Or
from mpmcs.gen import GenConfig, generate

R1 = (0.8, 0.1, 0.1)
R2 = (0.6, 0.2, 0.2)

# criterion label -> "PASS"/"FAIL", filled by the acceptance module and
# printed by conftest at the end of the session
RESULTS: dict[str, str] = {}


@contextlib.contextmanager
def criterion(label: str):
    try:
        yield
    except BaseException:
        RESULTS[label] = "FAIL"
        print(f"FAIL {label}")
        raise
    RESULTS[label] = "PASS"
    print(f"PASS {label}")


def fps_tree(p=None) -> FaultTree:
    """The fire-protection-system example: events 1..7 are x1..x7.

    t = OR(fd, fs); fd = AND(x1, x2); fs = OR(x3, x4, ws);
    ws = AND(x5, wp); wp = OR(x6, x7).
    """
    p = p or {1: 0.9, 2: 0.8, 3: 0.1, 4: 0.1, 5: 0.1, 6: 0.1, 7: 0.1}
    return FaultTree.build(
        top=100,
        events=p,
        gates={
            100: ("or", [101, 102]),
            101: ("and", [1, 2]),
            102: ("or", [3, 4, 103]),
            103: ("and", [5, 104]),
            104: ("or", [6, 7]),
        },
    )


def x(i, negated=False):
    return Lit(i, negated)


FPS_EXPR = Or((And((x(1), x(2))), Or((x(3), x(4), And((x(5), Or((x(6), x(7)))))))))
FPS_FLIPPED = And((Or((x(1), x(2))), And((x(3), x(4), Or((x(5), And((x(6), x(7)))))))))


def random_small_tree(rng: random.Random, max_events: int = 12) -> FaultTree:
    """Generated tree with at most ``max_events`` basic events."""
    while True:
        r = rng.choice((R1, R2))
        k = rng.choice((2, 3, 4))
        n = rng.randint(4, 20)
        cfg = GenConfig(n, *r, k=k, seed=rng.randrange(2**32))
        s, n_and, n_or = cfg.sizes()
        if s < k or n_and + n_or < 1 or s > max_events:
            continue
        return generate(cfg)


def random_tree_config(rng: random.Random, max_events: int = 25, max_n: int = 60,
                       ratios=None) -> GenConfig:
    while True:
        r = ratios or rng.choice((R1, R2))
        k = rng.choice((2, 3, 4))
        n = rng.randint(5, max_n)
        cfg = GenConfig(n, *r, k=k, seed=rng.randrange(2**32))
        s, n_and, n_or = cfg.sizes()
        if s >= k and n_and + n_or >= 1 and s <= max_events:
            return cfg


def subsets(items):
    items = list(items)
    return itertools.chain.from_iterable(itertools.combinations(items, r) for r in range(len(items) + 1))
