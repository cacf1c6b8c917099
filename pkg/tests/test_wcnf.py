import pytest
from hypothesis import given, settings, strategies as st

from mpmcs.errors import InputError, ParseError
from mpmcs.wcnf import TOP, WcnfInstance, emit_wcnf, parse_wcnf, read_wcnf, write_wcnf


def test_emit_example():
    inst = WcnfInstance(1, [(-1,)], [(5, (1,))])
    assert emit_wcnf(inst) == "p wcnf 1 2 2000000000\n2000000000 -1 0\n5 1 0\n"


def test_emit_comments():
    inst = WcnfInstance(1, [(-1,)], [(5, (1,))])
    text = emit_wcnf(inst, comments=["hello"])
    assert text.startswith("c hello\np wcnf 1 2 2000000000\n")
    assert parse_wcnf(text) == inst


def test_parse_ignores_blank_lines_and_comments():
    text = "c x\n\np wcnf 2 2 100\nc mid\n100 1 2 0\n\n3 -2 0\n"
    inst = parse_wcnf(text)
    assert inst == WcnfInstance(2, [(1, 2)], [(3, (-2,))], top=100)


@pytest.mark.parametrize("text, line", [
    ("1 1 0\n", 1),
    ("p wcnf 1 1\n", 1),
    ("p wcnf 1 1 10\np wcnf 1 1 10\n", 2),
    ("p wcnf 1 1 10\n5 1\n", 2),
    ("p wcnf 1 1 10\n0 1 0\n", 2),
    ("p wcnf 1 1 10\n11 1 0\n", 2),
    ("p wcnf 1 1 10\n5 0\n", 2),
    ("p wcnf 2 1 10\n5 1 0 2 0\n", 2),
    ("p wcnf 1 1 10\n5 2 0\n", 2),
    ("p wcnf 1 2 10\n5 1 0\n", None),
    ("p wcnf 1 1 10\n5 x 0\n", 2),
    ("", None),
])
def test_parse_errors(text, line):
    with pytest.raises(ParseError) as info:
        parse_wcnf(text)
    if line is not None:
        assert info.value.line == line
        assert str(info.value).startswith(f"line {line}:")


def test_cost_and_hard():
    inst = WcnfInstance(2, [(1, 2)], [(3, (1,)), (4, (2,))])
    assert inst.cost((False, True)) == 3
    assert inst.satisfies_hard((False, True))
    assert not inst.satisfies_hard((False, False))


def test_check():
    WcnfInstance(1, [(1,)], [(1, (1,))]).check()
    with pytest.raises(InputError):
        WcnfInstance(1, [(2,)], []).check()
    with pytest.raises(InputError):
        WcnfInstance(1, [], [(TOP, (1,))]).check()


def test_file_round_trip(tmp_path):
    inst = WcnfInstance(3, [(1, -2), (3,)], [(7, (1,)), (2, (2,))])
    p = tmp_path / "a.wcnf"
    write_wcnf(inst, p)
    assert read_wcnf(p) == inst


@st.composite
def instances(draw):
    n = draw(st.integers(1, 30))
    lit = st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v]))
    clause = st.lists(lit, min_size=1, max_size=5).map(tuple)
    hard = draw(st.lists(clause, max_size=20))
    soft = draw(st.lists(st.tuples(st.integers(1, 10**6), clause), max_size=20))
    return WcnfInstance(n, hard, soft)


@settings(max_examples=100, deadline=None)
@given(instances())
def test_round_trip_property(inst):
    text = emit_wcnf(inst)
    back = parse_wcnf(text)
    assert back == inst
    assert emit_wcnf(back) == text
