"""Reference machine families for complexity and halting-probability runs.

``ref-1`` (version 1) is a small interpreter whose program tape is one-way:
instructions are decoded from the tape the first time control reaches them
and kept in an instruction memory, so backward jumps re-execute code without
re-reading bits.  Opcodes form a complete prefix code::

    00        HALT
    010 011   OUT0, OUT1        append a bit to the output
    100       INC               counter += 1
    101 1^k0  LOOP k            if counter > 0: counter -= 1, jump back k
                                instructions (clamped at 0); else fall through
    110       DUP               output += output
    1110      AUX               output += auxiliary string
    11110 bar(s) w
              LIT               append the n = number(s) - 1 bits w
    11111 w   REST              append every remaining program bit, then halt
                                (plain runs only; a prefix run fails)

HALT is free; every other executed instruction costs one step.

Plain runs see the end of the program (reading past it halts with the
output so far).  Prefix runs treat a read past the end as failure and halting
with unread program bits as failure too, so their successful programs are
self-delimiting.  Output beyond ``MAX_OUTPUT`` bits is a failure.

``ref-1x`` is ``ref-1`` reading complemented program bits.  ``ref-u`` reads
``bar(s)`` and runs sub-family ``number(s)``: 1 -> ref-1, 2 -> ref-1x.
``tm`` (plain only) is the universal machine over the enumerated single-tape
machines: programs are ``bar(i) j``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .bits import number_to_string, string_to_number
from .codes import DecodeError, bar, pair_decode
from .machine.encoding import index_of_machine, machine_by_index
from .machine.tm import Halted, Machine, ProvenLooping, run

FAMILY_VERSION = 1
MAX_OUTPUT = 1 << 16
KINDS = ("plain", "prefix")

HALT, OUT0, OUT1, INC, LOOP, DUP, AUX, LIT, REST = range(9)
_OPCODES = {"00": HALT, "010": OUT0, "011": OUT1, "100": INC, "101": LOOP,
            "110": DUP, "1110": AUX, "11110": LIT, "11111": REST}


@dataclass(frozen=True)
class ProgramRun:
    status: str  # halted | failed | budget-exceeded | proven-looping
    output: str
    steps: int
    consumed: int

    @property
    def halted(self) -> bool:
        return self.status == "halted"


class _EndOfProgram(Exception):
    pass


class _Reader:
    __slots__ = ("bits", "pos", "invert")

    def __init__(self, bits: str, invert: bool):
        self.bits, self.pos, self.invert = bits, 0, invert

    def read(self) -> str:
        if self.pos >= len(self.bits):
            raise _EndOfProgram
        b = self.bits[self.pos]
        self.pos += 1
        return ("1" if b == "0" else "0") if self.invert else b


def _fetch(reader: _Reader, prefix: bool) -> tuple:
    word = ""
    while word not in _OPCODES:
        word += reader.read()
    op = _OPCODES[word]
    if op == LOOP:
        k = 0
        while reader.read() == "1":
            k += 1
        return op, k
    if op == LIT:
        k = 0
        while reader.read() == "1":
            k += 1
        s = "".join(reader.read() for _ in range(k))
        n = string_to_number(s) - 1
        return op, "".join(reader.read() for _ in range(n))
    if op == REST:
        if prefix:  # reading to the end means reading past it
            reader.pos = len(reader.bits)
            raise _EndOfProgram
        rest = []
        try:
            while True:
                rest.append(reader.read())
        except _EndOfProgram:
            return op, "".join(rest)
    return op, None


def run_ref(program: str, aux: str = "", budget: int = 1 << 20, kind: str = "prefix",
            invert: bool = False) -> ProgramRun:
    prefix = kind == "prefix"
    reader = _Reader(program, invert)
    code: list[tuple] = []
    out: list[str] = []
    pc = counter = steps = 0
    seen: set = set()

    def finish(status: str) -> ProgramRun:
        if status == "halted" and prefix and reader.pos != len(program):
            status = "failed"  # halted before reading the whole program
        return ProgramRun(status, "".join(out), steps, reader.pos)

    while True:
        if pc == len(code):
            try:
                code.append(_fetch(reader, prefix))
            except _EndOfProgram:
                return finish("failed" if prefix else "halted")
        op, arg = code[pc]
        if op == HALT:
            return finish("halted")
        if steps >= budget:
            return finish("budget-exceeded")
        key = (pc, counter, len(out), reader.pos)
        if key in seen:
            return finish("proven-looping")
        seen.add(key)
        steps += 1
        pc += 1
        if op == OUT0:
            out.append("0")
        elif op == OUT1:
            out.append("1")
        elif op == INC:
            counter += 1
        elif op == LOOP:
            if counter > 0:
                counter -= 1
                pc = max(0, pc - 1 - arg)
        elif op == DUP:
            out.extend(out)
        elif op == AUX:
            out.extend(aux)
        elif op == LIT:
            out.extend(arg)
        elif op == REST:
            out.extend(arg)
            return finish("halted")
        if len(out) > MAX_OUTPUT:
            return finish("failed")


# sub-families reachable through ref-u, by the number of their bar-coded name
UNIVERSAL_REGISTRY = {1: "ref-1", 2: "ref-1x"}


def _run_universal(program: str, aux: str, budget: int, kind: str) -> ProgramRun:
    try:
        name, used = _read_bar(program)
    except DecodeError:
        return ProgramRun("failed" if kind == "prefix" else "halted", "", 0, len(program))
    sub = UNIVERSAL_REGISTRY.get(string_to_number(name))
    if sub is None:
        return ProgramRun("failed" if kind == "prefix" else "halted", "", 0, used)
    inner = run_family(sub, program[used:], aux, budget, kind)
    return ProgramRun(inner.status, inner.output, inner.steps, inner.consumed + used)


def _read_bar(program: str) -> tuple[str, int]:
    k = 0
    while k < len(program) and program[k] == "1":
        k += 1
    if k >= len(program) or k + 1 + k > len(program):
        raise DecodeError("incomplete bar header", len(program))
    return program[k + 1:2 * k + 1], 2 * k + 1


def _run_tm(program: str, aux: str, budget: int, kind: str) -> ProgramRun:
    if kind != "plain":
        raise ValueError("the 'tm' family has plain semantics only")
    try:
        i_str, j = pair_decode(program)
    except DecodeError:
        return ProgramRun("halted", "", 0, len(program))
    outcome = run(machine_by_index(string_to_number(i_str)), j, budget)
    if isinstance(outcome, Halted):
        return ProgramRun("halted", outcome.output, outcome.steps, len(program))
    status = "proven-looping" if isinstance(outcome, ProvenLooping) else "budget-exceeded"
    return ProgramRun(status, "", outcome.steps, len(program))


FAMILIES = ("ref-1", "ref-1x", "ref-u", "tm")


def run_family(family: str, program: str, aux: str = "", budget: int = 1 << 20,
               kind: str = "prefix") -> ProgramRun:
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if family == "ref-1":
        return run_ref(program, aux, budget, kind)
    if family == "ref-1x":
        return run_ref(program, aux, budget, kind, invert=True)
    if family == "ref-u":
        return _run_universal(program, aux, budget, kind)
    if family == "tm":
        return _run_tm(program, aux, budget, kind)
    raise ValueError(f"unknown machine family {family!r}; choose from {', '.join(FAMILIES)}")


def _complement(bits: str) -> str:
    return bits.translate(str.maketrans("01", "10"))


# identity machine: a single rule on blank, so any nonempty input is left as is
IDENTITY_TM = Machine.of([("q0", "B", "B", "q1")])


def print_program(family: str, x: str, kind: str) -> str:
    """A program that outputs ``x`` literally."""
    if family == "ref-1":
        if kind == "plain":
            return "11111" + x
        return "11110" + bar(number_to_string(len(x) + 1)) + x + "00"
    if family == "ref-1x":
        return _complement(print_program("ref-1", x, kind))
    if family == "ref-u":
        return lift_prefix("ref-u", "ref-1") + print_program("ref-1", x, kind)
    if family == "tm" and kind == "plain":
        return bar(number_to_string(index_of_machine(IDENTITY_TM))) + x
    raise ValueError(f"no print program for {family!r} in {kind} mode")


def copy_program(family: str, kind: str) -> str:
    """A program that outputs its auxiliary string."""
    if family == "ref-1":
        return "1110" + ("00" if kind == "prefix" else "")
    if family == "ref-1x":
        return _complement(copy_program("ref-1", kind))
    if family == "ref-u":
        return lift_prefix("ref-u", "ref-1") + copy_program("ref-1", kind)
    raise ValueError(f"no copy program for {family!r}")


def lift_prefix(host: str, guest: str) -> str:
    """Prefix r with host(r q) = guest(q) for every q, if the host has one."""
    if host == guest:
        return ""
    if host == "ref-u":
        for number, name in UNIVERSAL_REGISTRY.items():
            if name == guest:
                return bar(number_to_string(number))
    raise ValueError(f"{host} has no simulator prefix for {guest}")
