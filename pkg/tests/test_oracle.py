import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import fps_tree, random_small_tree, subsets
from mpmcs.core import FaultTree, evaluate, is_minimal_cut_set
from mpmcs.encode import build_weights
from mpmcs.errors import CapacityError, InputError
from mpmcs.oracle import (
    enumerate_mcs, is_cut_set_by_catalog, mpmcs_brute, mpmcs_brute_int, truth_table,
)

FPS_CATALOG = [frozenset(s) for s in ({3}, {4}, {1, 2}, {5, 6}, {5, 7})]


def test_fps_catalog():
    assert enumerate_mcs(fps_tree()) == FPS_CATALOG
    assert enumerate_mcs(fps_tree(), method="subsets") == FPS_CATALOG


def test_fps_mpmcs():
    res = mpmcs_brute(fps_tree())
    assert res.cut_set == {1, 2}
    assert res.probability == pytest.approx(0.72, rel=1e-12)


def test_or_picks_likelier_event():
    t = FaultTree.build(0, {1: 0.3, 2: 0.7}, {0: ("or", [1, 2])})
    res = mpmcs_brute(t)
    assert res.cut_set == {2} and res.probability == 0.7


def test_and_needs_everything():
    t = FaultTree.build(0, {1: 0.3, 2: 0.7}, {0: ("and", [1, 2])})
    assert enumerate_mcs(t) == [frozenset({1, 2})]


def test_single_event():
    t = FaultTree.build(0, {4: 0.2}, {0: ("or", [4])})
    assert mpmcs_brute(t).cut_set == {4}


def test_brute_int():
    t = FaultTree.build(0, {1: 0.3, 2: 0.7}, {0: ("or", [1, 2])})
    assert mpmcs_brute_int(t, {1: 5, 2: 3}) == (frozenset({2}), 3)
    t2 = FaultTree.build(0, {1: 0.3, 2: 0.7}, {0: ("and", [1, 2])})
    assert mpmcs_brute_int(t2, {1: 5, 2: 3}) == (frozenset({1, 2}), 8)
    with pytest.raises(InputError):
        mpmcs_brute_int(t, {1: 0, 2: 3})


def test_brute_int_ties_lexicographic():
    t = fps_tree({i: 0.5 for i in range(1, 8)})
    w, _ = build_weights(t)
    assert mpmcs_brute_int(t, w)[0] == {3}


def test_capacity():
    with pytest.raises(CapacityError):
        enumerate_mcs(fps_tree(), max_events=6)


def test_unknown_method():
    with pytest.raises(InputError):
        enumerate_mcs(fps_tree(), method="magic")


def test_truth_table_bits():
    t = FaultTree.build(0, {1: 0.5, 2: 0.5}, {0: ("and", [1, 2])})
    tt, order = truth_table(t)
    assert order == [1, 2] and tt == 0b1000
    t = FaultTree.build(0, {1: 0.5, 2: 0.5}, {0: ("or", [1, 2])})
    assert truth_table(t)[0] == 0b1110


def test_catalog_completeness():
    rng = random.Random(31)
    for _ in range(15):
        t = random_small_tree(rng, max_events=12)
        catalog = enumerate_mcs(t)
        for s in subsets(t.events):
            assert evaluate(t, s) == is_cut_set_by_catalog(catalog, s)
        for m in catalog:
            assert is_minimal_cut_set(t, m)
        assert len(set(catalog)) == len(catalog)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_methods_agree(seed):
    t = random_small_tree(random.Random(seed), max_events=10)
    assert enumerate_mcs(t) == enumerate_mcs(t, method="subsets")


def test_bitset_handles_more_than_eight_events():
    t = FaultTree.build(0, {i: 0.5 for i in range(1, 15)}, {0: ("and", list(range(1, 15)))})
    assert enumerate_mcs(t) == [frozenset(range(1, 15))]


def test_integer_and_probability_oracles_agree_outside_rounding_margin():
    rng = random.Random(41)
    checked = 0
    for _ in range(60):
        t = random_small_tree(rng, max_events=12)
        w, _ = build_weights(t)
        costs = sorted(sum(w[e] for e in m) for m in enumerate_mcs(t))
        if len(costs) > 1 and costs[1] - costs[0] <= len(t.events):
            continue
        checked += 1
        assert mpmcs_brute_int(t, w)[0] == mpmcs_brute(t).cut_set
    assert checked > 20
