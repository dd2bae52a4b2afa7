"""Single-tape Turing machines over {0, 1, B} with rules (q, s, a, q')."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Union

from ..bits import check_bits

SYMBOLS = ("0", "1", "B")
ACTIONS = ("0", "1", "B", "L", "R")


class MachineFormatError(ValueError):
    pass


class Rule(NamedTuple):
    state: str
    scanned: str
    action: str
    next: str

    def __str__(self) -> str:
        return f"{self.state} {self.scanned} {self.action} {self.next}"


@dataclass(frozen=True)
class Machine:
    rules: tuple[Rule, ...]
    actions: tuple[str, ...] = ACTIONS

    def __post_init__(self):
        seen = set()
        for r in self.rules:
            if r.scanned not in SYMBOLS:
                raise MachineFormatError(f"bad scanned symbol in rule '{r}'")
            if r.action not in self.actions:
                raise MachineFormatError(f"bad action in rule '{r}'")
            if (r.state, r.scanned) in seen:
                raise MachineFormatError(f"nondeterministic: two rules for ({r.state}, {r.scanned})")
            seen.add((r.state, r.scanned))

    @classmethod
    def of(cls, rules: Iterable) -> Machine:
        return cls(tuple(Rule(*map(str, r)) for r in rules))

    @property
    def start(self) -> str:
        return self.rules[0].state if self.rules else "q0"

    @property
    def states(self) -> list[str]:
        """States in order of first appearance (q before q' within a rule)."""
        out: dict[str, None] = {}
        for r in self.rules:
            out.setdefault(r.state)
            out.setdefault(r.next)
        return list(out)

    def table(self) -> dict[tuple[str, str], tuple[str, str]]:
        return {(r.state, r.scanned): (r.action, r.next) for r in self.rules}

    def canonical(self) -> Machine:
        """Same machine with states renamed q0, q1, ... by first appearance."""
        names = {s: f"q{i}" for i, s in enumerate(self.states)}
        return type(self)(tuple(Rule(names[r.state], r.scanned, r.action, names[r.next]) for r in self.rules),
                          self.actions)

    def to_text(self) -> str:
        return "".join(f"{r}\n" for r in self.rules)


def parse_machine(text: str, actions: tuple[str, ...] = ACTIONS) -> Machine:
    """One rule per line, ``q s a q'``; ``#`` starts a comment."""
    rules = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 4:
            raise MachineFormatError(f"line {lineno}: expected 'q s a q'', got {line!r}")
        rules.append(Rule(*fields))
    return Machine(tuple(rules), actions)


@dataclass(frozen=True)
class Halted:
    output: str
    steps: int
    status = "halted"


@dataclass(frozen=True)
class BudgetExceeded:
    steps: int
    status = "budget-exceeded"


@dataclass(frozen=True)
class ProvenLooping:
    steps: int  # step at which the repeat was confirmed
    period: int
    shift: int  # head displacement per period (0 for an exact repeat)
    status = "proven-looping"


RunOutcome = Union[Halted, BudgetExceeded, ProvenLooping]


def scanned_block(tape: dict[int, str], head: int) -> str:
    """Maximal blank-free block containing the head; empty if on a blank."""
    if head not in tape:
        return ""
    lo = hi = head
    while lo - 1 in tape:
        lo -= 1
    while hi + 1 in tape:
        hi += 1
    return "".join(tape[i] for i in range(lo, hi + 1))


def run(machine: Machine, input: str = "", budget: int = 10_000) -> RunOutcome:
    """Run from state ``machine.start`` with the head on the first input cell.

    Non-halting is claimed only when a configuration repeats up to a
    translation of the head (tape contents taken relative to the head), which
    makes the whole future a translated repeat.  Repeats are found with
    Brent's cycle search, so memory stays constant.
    """
    check_bits(input)
    delta = machine.table()
    tape = {i: b for i, b in enumerate(input)}
    head, state, steps = 0, machine.start, 0

    def signature():
        return state, len(tape), tape.get(head)

    def config():
        return state, tuple(sorted((i - head, s) for i, s in tape.items()))

    saved_sig, saved_cfg, saved_head, saved_step = None, None, 0, 0
    power = 1
    while True:
        rule = delta.get((state, tape.get(head, "B")))
        if rule is None:
            return Halted(scanned_block(tape, head), steps)
        if steps >= budget:
            return BudgetExceeded(steps)
        sig = signature()
        if sig == saved_sig and config() == saved_cfg:
            return ProvenLooping(steps, steps - saved_step, head - saved_head)
        if steps - saved_step == power or saved_sig is None:
            if saved_sig is not None:
                power *= 2
            saved_sig, saved_cfg, saved_head, saved_step = sig, config(), head, steps
        action, state = rule
        if action == "L":
            head -= 1
        elif action == "R":
            head += 1
        elif action == "B":
            tape.pop(head, None)
        else:
            tape[head] = action
        steps += 1
