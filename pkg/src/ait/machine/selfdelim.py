"""Three-tape self-delimiting machines.

The program tape is one-way and read-only, the work tape starts with the
auxiliary string, the output tape is append-only.  Rules keep the
``(q, s, a, q')`` shape with ``s`` the scanned work-tape symbol; besides the
five work-tape actions there are

* ``P``  - read the next program bit into the scanned work cell,
* ``O0`` / ``O1`` - append a bit to the output tape.

A run succeeds only if the machine halts with the program head on the last
bit of the supplied program.  Asking for a bit past the end fails at once, so
the successful programs of a machine form a prefix-free set.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..bits import check_bits
from .tm import ACTIONS, Machine, parse_machine

SELFDELIM_ACTIONS = ACTIONS + ("P", "O0", "O1")


def selfdelim_machine(rules) -> Machine:
    return Machine(tuple(Machine.of(rules).rules), SELFDELIM_ACTIONS)


def parse_selfdelim_machine(text: str) -> Machine:
    return parse_machine(text, SELFDELIM_ACTIONS)


@dataclass(frozen=True)
class SelfDelimRun:
    consumed: int
    aux: str
    output: str
    success: bool
    steps: int
    status: str  # success | underrun | overrun | budget-exceeded | proven-looping


def selfdelim_run(machine: Machine, program: str, aux: str = "", budget: int = 10_000) -> SelfDelimRun:
    check_bits(program)
    check_bits(aux)
    delta = machine.table()
    tape = {i: b for i, b in enumerate(aux)}
    out: list[str] = []
    head, state, steps, consumed = 0, machine.start, 0, 0
    seen: dict = {}

    def result(status: str) -> SelfDelimRun:
        return SelfDelimRun(consumed, aux, "".join(out), status == "success", steps, status)

    while True:
        rule = delta.get((state, tape.get(head, "B")))
        if rule is None:
            return result("success" if consumed == len(program) else "underrun")
        if steps >= budget:
            return result("budget-exceeded")
        # output length and program head are part of the configuration
        key = (state, consumed, len(out), tuple(sorted((i - head, s) for i, s in tape.items())))
        if key in seen:
            return result("proven-looping")
        seen[key] = steps
        action, state = rule
        if action == "L":
            head -= 1
        elif action == "R":
            head += 1
        elif action == "B":
            tape.pop(head, None)
        elif action == "P":
            if consumed == len(program):
                steps += 1
                return result("overrun")
            tape[head] = program[consumed]
            consumed += 1
        elif action == "O0":
            out.append("0")
        elif action == "O1":
            out.append("1")
        else:
            tape[head] = action
        steps += 1
