from fractions import Fraction

import pytest

from ait.bits import all_strings, is_prefix_free
from ait.families import (FAMILIES, MAX_OUTPUT, copy_program, lift_prefix, print_program, run_family, run_ref)


class _Past(Exception):
    pass


def oracle_ref(program, aux="", budget=4096, kind="prefix"):
    """Straight-line re-implementation: lazy fetch, plain step budget, no cycle detection.
    Returns (kind of ending, output, steps)."""
    pos = 0

    def bit():
        nonlocal pos
        if pos >= len(program):
            raise _Past
        pos += 1
        return program[pos - 1]

    def unary():
        k = 0
        while bit() == "1":
            k += 1
        return k

    def fetch():
        nonlocal pos
        w = bit() + bit()
        if w == "00":
            return ("halt",)
        w += bit()
        table = {"010": ("out", "0"), "011": ("out", "1"), "100": ("inc",), "110": ("dup",)}
        if w in table:
            return table[w]
        if w == "101":
            return ("loop", unary())
        w += bit()
        if w == "1110":
            return ("aux",)
        w += bit()
        if w == "11110":
            k = unary()
            n = int("1" + "".join(bit() for _ in range(k)), 2) - 1
            return ("lit", "".join(bit() for _ in range(n)))
        if kind == "prefix":
            raise _Past
        rest = program[pos:]
        pos = len(program)
        return ("rest", rest)

    code, out, pc, ctr, steps = [], "", 0, 0, 0

    def end(status):
        if status == "halted" and kind == "prefix" and pos != len(program):
            status = "failed"
        return status, out, steps

    while True:
        if pc == len(code):
            try:
                code.append(fetch())
            except _Past:
                return end("failed" if kind == "prefix" else "halted")
        ins = code[pc]
        if ins[0] == "halt":
            return end("halted")
        if steps == budget:
            return end("running")
        steps += 1
        pc += 1
        if ins[0] == "out":
            out += ins[1]
        elif ins[0] == "inc":
            ctr += 1
        elif ins[0] == "loop" and ctr:
            ctr -= 1
            pc = max(0, pc - 1 - ins[1])
        elif ins[0] == "dup":
            out += out
        elif ins[0] == "aux":
            out += aux
        elif ins[0] in ("lit", "rest"):
            out += ins[1]
            if ins[0] == "rest":
                return end("halted")
        if len(out) > MAX_OUTPUT:
            return end("failed")


@pytest.mark.parametrize("kind", ["plain", "prefix"])
def test_interpreter_matches_oracle(kind):
    for p in all_strings(12):
        got = run_ref(p, "10", budget=4096, kind=kind)
        status, out, steps = oracle_ref(p, "10", 4096, kind)
        if status == "running":
            assert got.status in ("budget-exceeded", "proven-looping"), p
        else:
            assert (got.status, got.output, got.steps) == (status, out, steps), p


def test_prefix_domain_is_prefix_free():
    halting = [p for p in all_strings(14) if run_ref(p, budget=1 << len(p)).halted]
    assert is_prefix_free(halting)
    assert sum(Fraction(1, 1 << len(p)) for p in halting) <= 1


def test_small_programs():
    assert run_ref("00").halted and run_ref("00").output == ""
    assert run_ref("01100").output == "1"
    assert run_ref("0110").status == "failed"      # needs a HALT
    assert run_ref("0110", kind="plain").output == "1"
    assert run_ref("0011").status == "failed"      # unread bits
    assert run_ref("11111" + "0101").status == "failed"
    assert run_ref("11111" + "0101", kind="plain").output == "0101"


def test_loops_budget_and_output_cap():
    assert run_ref("10010010110", budget=1000).status == "proven-looping"
    grow = "100" + "011" + "100" + "101110"  # INC OUT1 INC LOOP 2: output grows forever
    r = run_ref(grow, budget=300)
    assert r.status == "budget-exceeded" and r.steps == 300
    blow = "011" + "110" * 17 + "00"
    assert run_ref(blow).status == "failed"
    assert run_ref("011" + "110" * 16 + "00").output == "1" * MAX_OUTPUT


@pytest.mark.parametrize("family,kind", [(f, k) for f in FAMILIES for k in ("plain", "prefix") if (f, k) != ("tm", "prefix")])
def test_print_programs(family, kind):
    for x in all_strings(6):
        r = run_family(family, print_program(family, x, kind), kind=kind)
        assert r.halted and r.output == x


def test_print_overheads():
    assert max(len(print_program("ref-1", x, "plain")) - len(x) for x in all_strings(8)) == 5
    assert max(len(print_program("ref-1", x, "prefix")) - len(x) for x in all_strings(8)) == 14


@pytest.mark.parametrize("family", ["ref-1", "ref-1x", "ref-u"])
def test_copy_program(family):
    for kind in ("plain", "prefix"):
        p = copy_program(family, kind)
        for y in ["", "1", "0110"]:
            r = run_family(family, p, aux=y, kind=kind)
            assert r.halted and r.output == y
    assert len(copy_program("ref-1", "prefix")) == 6


def test_complement_family_mirrors_reference():
    flip = str.maketrans("01", "10")
    for p in all_strings(10):
        a, b = run_ref(p, budget=1024), run_family("ref-1x", p.translate(flip), budget=1024)
        assert (a.status, a.output, a.steps) == (b.status, b.output, b.steps)


def test_universal_lifting():
    for guest in ("ref-1", "ref-1x"):
        r = lift_prefix("ref-u", guest)
        for q in all_strings(9):
            a = run_family(guest, q, budget=512)
            b = run_family("ref-u", r + q, budget=512)
            assert (a.status, a.output, a.steps) == (b.status, b.output, b.steps)
    assert lift_prefix("ref-1", "ref-1") == ""


def test_family_errors():
    with pytest.raises(ValueError):
        run_family("nope", "00")
    with pytest.raises(ValueError):
        run_family("tm", "00", kind="prefix")
    with pytest.raises(ValueError):
        run_family("ref-1", "00", kind="weird")
