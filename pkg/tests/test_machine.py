import random
from itertools import product

import pytest

from ait.bits import all_strings, is_prefix_free, number_to_string, string_to_number
from ait.codes import bar
from ait.machine import (BudgetExceeded, EncodingError, Halted, Machine, MachineFormatError, ProvenLooping,
                         UniversalFormatError, decode_machine, encode_machine, encoding_by_index, index_of_encoding,
                         index_of_machine, is_valid_encoding, machine_by_index, parse_machine,
                         parse_selfdelim_machine, run, selfdelim_run, universal_program, universal_run)
from ait.machine.encoding import MIN_LENGTH, headers_of_length, length_count

# -- independent validity oracle ---------------------------------------------

def _read_bar(bits, pos):
    k = 0
    while pos + k < len(bits) and bits[pos + k] == "1":
        k += 1
    if pos + k >= len(bits) or pos + 2 * k + 1 > len(bits):
        return None
    return int("1" + bits[pos + k + 1:pos + 2 * k + 1], 2), pos + 2 * k + 1


def oracle_valid(bits):
    h = _read_bar(bits, 0)
    if h is None:
        return False
    s, pos = h
    h = _read_bar(bits, pos)
    if h is None:
        return False
    r, pos = h
    body = bits[pos:]
    if s < 3 or len(body) != 4 * r * s:
        return False
    f = [int(body[i:i + s], 2) for i in range(0, len(body), s)]
    states = [f[i] for i in range(len(f)) if i % 4 in (0, 3)]
    top = -1
    for q in states:
        if q > top + 1:
            return False
        top = max(top, q)
    nq = top + 1
    if (nq + 4).bit_length() != s:
        return False
    seen = set()
    for i in range(0, len(f), 4):
        q, sc, ac, _ = f[i:i + 4]
        if not (nq <= sc < nq + 3 and nq <= ac < nq + 5) or (q, sc) in seen:
            return False
        seen.add((q, sc))
    return True


def test_examples():
    m = Machine.of([("q0", "0", "R", "q0")])
    assert encode_machine(m) == bar("1") + bar("") + "000" + "001" + "101" + "000"
    assert run(Machine.of([("q0", "1", "0", "q0")]), "1") == Halted("0", 1)
    assert isinstance(run(Machine.of([("q0", "B", "R", "q0")])), ProvenLooping)


def test_scan_oracle_short_lengths():
    """Every valid encoding of 16..18 bits, found by scanning all strings."""
    expected = [b for n in range(16, 19) for b in ("".join(t) for t in product("01", repeat=n)) if oracle_valid(b)]
    got = [encoding_by_index(i) for i in range(1, len(expected) + 1)]
    assert got == expected
    assert sum(length_count(n) for n in range(16, 19)) == len(expected)
    assert encoding_by_index(len(expected) + 1) > "" and len(encoding_by_index(len(expected) + 1)) > 18


def _oracle_layer(s, r):
    out = set()
    for nq in range(1, (1 << s) - 4):
        if (nq + 4).bit_length() != s:
            continue
        rule_space = [(q, nq + a, nq + b, q2) for q in range(nq) for a in range(3) for b in range(5) for q2 in range(nq)]
        for rules in product(rule_space, repeat=r):
            bits = bar(number_to_string(s)) + bar(number_to_string(r)) + \
                "".join(format(c, f"0{s}b") for rule in rules for c in rule)
            if oracle_valid(bits):
                out.add(bits)
    return sorted(out)


def test_product_oracle_30_bit_layer():
    layer = [b for s, r in headers_of_length(30) for b in _oracle_layer(s, r)]
    start = 1 + sum(length_count(n) for n in range(MIN_LENGTH, 30))
    assert len(layer) == length_count(30) == 2775
    assert [encoding_by_index(start + k) for k in range(len(layer))] == layer


def test_index_roundtrip_sample():
    rng = random.Random(3)
    for i in [1, 2, 30, 31, 2805] + [rng.randint(1, 10**6) for _ in range(50)]:
        bits = encoding_by_index(i)
        assert is_valid_encoding(bits) and oracle_valid(bits)
        assert index_of_encoding(bits) == i
        assert index_of_machine(machine_by_index(i)) == i


def test_decode_reports_violations():
    good = encode_machine(Machine.of([("q0", "0", "R", "q1")]))
    for bad, msg in [(good + "0", "trailing"), (good[:-1], "truncated"), ("1", "header")]:
        with pytest.raises(EncodingError, match=msg):
            decode_machine(bad)
    with pytest.raises(EncodingError, match="nondeterministic"):
        decode_machine(bar("1") + bar("0") + "000001100000" + "000001100000")
    with pytest.raises(MachineFormatError):
        encode_machine(Machine(()))


def test_machine_validation_and_parsing():
    with pytest.raises(MachineFormatError):
        Machine.of([("q", "0", "R", "q"), ("q", "0", "L", "q")])
    with pytest.raises(MachineFormatError):
        parse_machine("q0 0 R")
    m = parse_machine("# flip\nq0 0 1 q0  # write\nq0 1 R q0\n")
    assert len(m.rules) == 2 and m.start == "q0"
    assert decode_machine(encode_machine(m)) == m.canonical()


def test_budget_and_looping():
    walker = Machine.of([("q0", "B", "1", "q0"), ("q0", "1", "R", "q0")])
    assert run(walker, "", 50) == BudgetExceeded(50)
    cycle = Machine.of([("a", "0", "1", "a"), ("a", "1", "0", "a")])
    out = run(cycle, "0", 1000)
    assert isinstance(out, ProvenLooping) and out.period == 2 and out.shift == 0


def test_universal_agrees_with_direct():
    rng = random.Random(99)
    for _ in range(300):
        i = rng.randint(1, 500)
        x = "".join(rng.choice("01") for _ in range(rng.randint(0, 6)))
        assert universal_run(universal_program(i, x), 10_000) == run(machine_by_index(i), x, 10_000)
    with pytest.raises(UniversalFormatError):
        universal_run("111")


def test_first_machine_on_empty_input():
    t1 = machine_by_index(1)
    assert universal_run(universal_program(1, "")) == run(t1, "")
    assert string_to_number("") == 1


def test_selfdelim_prefix_property():
    m = parse_selfdelim_machine("""
        q0 B P q1
        q1 0 O0 q2
        q1 1 P q1
        q2 0 P q3
        q3 0 O1 q4
        q3 1 O0 q4
    """)
    ok = [p for p in all_strings(10) if selfdelim_run(m, p).success]
    assert ok and is_prefix_free(ok)


def test_selfdelim_statuses():
    m = parse_selfdelim_machine("q0 B P q1\n")
    assert selfdelim_run(m, "0").status == "success"
    assert selfdelim_run(m, "01").status == "underrun"
    assert selfdelim_run(m, "").status == "overrun"
    aux = parse_selfdelim_machine("q0 0 O0 q1\nq0 1 O1 q1\n")
    r = selfdelim_run(aux, "", aux="1")
    assert r.success and r.output == "1"
