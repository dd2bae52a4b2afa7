import json
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from ait.bits import DomainError, Dyadic, is_prefix_free
from ait.codes import kraft_construct
from ait.coding import (MeasureError, aligned_cylinders, allocate_stream, as_dyadic, code_length_report,
                        decode_address, domination_probe, random_increments, read_increments, read_quadruples,
                        quadruple_record, semimeasure_to_programs, synthetic_events)
from ait.dovetail import MachineMode, dovetail
from ait.families import lift_prefix

EXAMPLE_EVENTS = [("1100", "01"), ("00110", "11011"), ("000", "1"), ("011101", "11011"), ("111", "11011")]
EXAMPLE_ROWS = [("0.0001", "00000"), ("0.00001", "000010"), ("0.001", "0001"), ("0.000011", None),
               ("0.001011", "0010")]


def test_worked_example_replay():
    log = allocate_stream(EXAMPLE_EVENTS).log
    assert [(q.S.to_binary(), q.a) for q in log] == EXAMPLE_ROWS
    assert [(q.p, q.x) for q in log] == EXAMPLE_EVENTS


def test_decode_and_code_lengths():
    assert decode_address("0010", EXAMPLE_EVENTS) == "11011"
    assert decode_address("00000", EXAMPLE_EVENTS) == "01"
    with pytest.raises(LookupError):
        decode_address("1", EXAMPLE_EVENTS)
    row = {r.x: r for r in code_length_report(EXAMPLE_EVENTS)}["11011"]
    assert (row.depth, row.ceil_neglog, row.gap) == (4, 3, 1)


def test_leading_one_stabilizes_without_new_nodes():
    more = EXAMPLE_EVENTS + [("01111000", "11011"), ("0111101", "11011")]
    log = allocate_stream(more).log
    assert [q.a for q in log[5:]] == [None, None]


def test_quadruple_records_roundtrip():
    log = allocate_stream(EXAMPLE_EVENTS).log
    assert read_quadruples(json.dumps(quadruple_record(q)) for q in log) == log


# -- independent allocator oracle ---------------------------------------------

def _neglog_ceil(f):
    i = 0
    while f < Fraction(1, 1 << i):
        i += 1
    return i


def _first_free(taken, depth):
    for t in product("01", repeat=depth):
        a = "".join(t)
        if all(not a.startswith(b) and not b.startswith(a) for b in taken):
            return a
    raise AssertionError("no room")


def oracle_allocate(events):
    S, pos, taken, out = {}, {}, [], []
    for p, x in events:
        S[x] = S.get(x, Fraction(0)) + Fraction(1, 1 << len(p))
        i = _neglog_ceil(S[x])
        a = None
        if pos.get(x) != i:
            pos[x] = i
            a = _first_free(taken, i + 1)
            taken.append(a)
        out.append((S[x], a))
    return out


@st.composite
def event_streams(draw):
    lengths = draw(st.lists(st.integers(1, 9), min_size=1, max_size=25))
    assume(sum(Fraction(1, 1 << l) for l in lengths) <= 1)
    programs = kraft_construct(lengths)
    order = draw(st.permutations(range(len(programs))))
    outputs = draw(st.lists(st.sampled_from(["", "0", "1", "01"]), min_size=len(programs), max_size=len(programs)))
    return [(programs[i], outputs[k]) for k, i in enumerate(order)]


@given(event_streams())
def test_allocator_matches_oracle(events):
    st_ = allocate_stream(events)
    assert [(q.S.as_fraction(), q.a) for q in st_.log] == oracle_allocate(events)
    nodes = list(st_.code)
    assert is_prefix_free(nodes)
    mass = sum(Fraction(1, 1 << len(a)) for a in nodes)
    assert mass <= sum(s.as_fraction() for s in st_.S.values()) <= 1


def test_synthetic_stream_bounds():
    rng = np.random.default_rng(8)
    events, totals = synthetic_events(rng, 2000, 40)
    st_ = allocate_stream(events)
    assert {x: s.as_fraction() for x, s in st_.S.items()} == totals
    assert is_prefix_free(list(st_.code))
    assert st_.tree.mass.as_fraction() == sum(Fraction(1, 1 << len(a)) for a in st_.code) < 1


# -- semimeasures -------------------------------------------------------------

def test_semimeasure_examples():
    res = semimeasure_to_programs([("0", "1/4"), ("1", "0.011"), ("0", "1/8")])
    assert res.programs == {"0": ["00", "101"], "1": ["01", "100"]}
    assert res.mass["0"] == Dyadic(3, 3)
    assert aligned_cylinders(Dyadic(1, 3), Dyadic(7, 3)) == ["001", "01", "10", "110"]


@pytest.mark.parametrize("bad,index", [([("0", "1/2"), ("1", "3/4")], 1), ([("0", "1/3")], 0),
                                       ([("0", "0")], 0), ([("0", 0.5)], 0), ([("0", "1/4"), ("2", "1/4")], 1)])
def test_semimeasure_errors(bad, index):
    with pytest.raises((MeasureError, DomainError)) as info:
        semimeasure_to_programs(bad)
    if isinstance(info.value, MeasureError):
        assert info.value.index == index


def _cylinder(a):
    return Fraction(int(a, 2) if a else 0, 1 << len(a)), Fraction(1, 1 << len(a))


@given(st.integers(0, 1 << 10), st.integers(1, 1 << 10))
def test_aligned_cover_is_exact_and_maximal(a, w):
    assume(a + w <= 1 << 10)
    lo, hi = Dyadic(a, 10), Dyadic(a + w, 10)
    cyl = aligned_cylinders(lo, hi)
    cursor = lo.as_fraction()
    for c in cyl:
        start, width = _cylinder(c)
        assert start == cursor
        cursor += width
    assert cursor == hi.as_fraction()
    for c, d in zip(cyl, cyl[1:]):  # neighbours never merge into one aligned parent
        assert not (len(c) == len(d) and c[:-1] == d[:-1])


def test_semimeasure_random_streams():
    for seed in range(100):
        incs = random_increments(np.random.default_rng(seed), 60)
        res = semimeasure_to_programs(incs)
        everything = [p for ps in res.programs.values() for p in ps]
        assert is_prefix_free(everything)
        mu = {}
        for x, d in incs:
            mu[x] = mu.get(x, Fraction(0)) + d.as_fraction()
        for x, ps in res.programs.items():
            assert sum(Fraction(1, 1 << len(p)) for p in ps) == mu[x] == res.mass[x].as_fraction()


def test_as_dyadic_and_increment_parsing():
    assert as_dyadic("3/8") == Dyadic(3, 3) == as_dyadic("0.011")
    with pytest.raises(DomainError):
        as_dyadic(0.25)
    assert read_increments('{"x": "0", "delta": "1/2"}\n{"x": "1", "delta": "0.01"}') == [("0", "1/2"),
                                                                                         ("1", "0.01")]


def test_domination_identity_on_reference_events():
    r = lift_prefix("ref-u", "ref-1")
    events = dovetail(MachineMode(), 10)
    rows = domination_probe(r, events)
    assert rows and all(row.holds(len(r)) for row in rows)
    lifted = dovetail(MachineMode("ref-u"), 11)
    by_x = {}
    for e in lifted:
        if e.program.startswith(r):
            by_x[e.output] = by_x.get(e.output, Fraction(0)) + Fraction(1, 1 << len(e.program))
    assert by_x == {row.x: row.lifted.as_fraction() for row in rows}
