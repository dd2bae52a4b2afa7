"""Coding-theorem allocation and the semimeasure-to-programs construction."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .bits import ZERO, ONE, DomainError, Dyadic, PrefixTree, check_bits, leading_one_position, number_to_string
from .codes import kraft_construct


class Quadruple(NamedTuple):
    p: str
    x: str
    S: Dyadic
    a: str | None


def _pairs(events) -> Iterator[tuple[str, str]]:
    for e in events:
        if hasattr(e, "program"):
            yield e.program, e.output
        elif isinstance(e, dict):
            yield e["p"], e["x"]
        else:
            yield tuple(e)


@dataclass
class Allocation:
    log: list[Quadruple] = field(default_factory=list)
    code: dict[str, str] = field(default_factory=dict)  # node address -> string
    tree: PrefixTree = field(default_factory=PrefixTree)
    S: dict[str, Dyadic] = field(default_factory=dict)
    position: dict[str, int] = field(default_factory=dict)  # leading one at last trigger


def allocate_stream(events: Iterable) -> Allocation:
    """Feed ``(p, x)`` halting events through the node allocator.

    Each event adds 2^-|p| to S_x.  Whenever the leading one of S_x moves
    (or S_x becomes positive), the lexicographically first free node at
    depth ``leading_one_position(S_x) + 1`` is assigned to ``x``.
    """
    st = Allocation()
    for p, x in _pairs(events):
        check_bits(p)
        check_bits(x)
        s = st.S.get(x, ZERO) + Dyadic.pow2(-len(p))
        st.S[x] = s
        pos = leading_one_position(s)
        a = None
        if st.position.get(x) != pos:
            st.position[x] = pos
            a = st.tree.allocate_first_available(pos + 1)
            st.code[a] = x
        st.log.append(Quadruple(p, x, s, a))
    return st


def decode_address(address: str, events: Iterable) -> str:
    code = allocate_stream(events).code
    if address not in code:
        raise LookupError(f"node {address or 'e'} was not allocated by this stream")
    return code[address]


@dataclass(frozen=True)
class CodeLengthRow:
    x: str
    depth: int  # depth of the last node given to x
    trigger_S: Dyadic  # S_x at that trigger
    final_S: Dyadic
    ceil_neglog: int  # ceil(-log2 final_S)

    @property
    def gap(self) -> int:
        return self.depth - self.ceil_neglog


def code_length_report(events: Iterable) -> list[CodeLengthRow]:
    st = allocate_stream(events)
    last: dict[str, Quadruple] = {}
    for q in st.log:
        if q.a is not None:
            last[q.x] = q
    return [CodeLengthRow(x, len(q.a), q.S, st.S[x], leading_one_position(st.S[x]))
            for x, q in sorted(last.items())]


# -- semimeasures -------------------------------------------------------------

class MeasureError(DomainError):
    def __init__(self, message: str, index: int):
        super().__init__(f"increment {index}: {message}")
        self.index = index


def as_dyadic(value) -> Dyadic:
    """Dyadic from a Dyadic, int, Fraction, ``"a/b"`` or a binary numeral."""
    if isinstance(value, Dyadic):
        return value
    if isinstance(value, str):
        return Dyadic.from_fraction(Fraction(value)) if "/" in value else Dyadic.from_binary(value)
    if isinstance(value, float):
        raise DomainError("give masses exactly (binary numeral or a/b), not as floats")
    return Dyadic.from_fraction(Fraction(value))


def aligned_cylinders(lo: Dyadic, hi: Dyadic) -> list[str]:
    """Greedy left-to-right cover of [lo, hi) by maximal aligned cylinders."""
    out = []
    while lo < hi:
        k = max(lo.exponent, leading_one_position(hi - lo))
        out.append(lo.fraction_bits(k))
        lo = lo + Dyadic.pow2(-k)
    return out


@dataclass
class SemimeasurePrograms:
    intervals: dict[str, list[tuple[Dyadic, Dyadic]]]
    programs: dict[str, list[str]]
    mass: dict[str, Dyadic]


def semimeasure_to_programs(increments: Iterable) -> SemimeasurePrograms:
    """Give each increment ``(x, delta)`` the next free piece of [0, 1)."""
    cursor = ZERO
    intervals: dict[str, list[tuple[Dyadic, Dyadic]]] = {}
    mass: dict[str, Dyadic] = {}
    for i, inc in enumerate(increments):
        x, delta = (inc["x"], inc["delta"]) if isinstance(inc, dict) else inc
        check_bits(x)
        try:
            d = as_dyadic(delta)
        except (DomainError, ValueError, ZeroDivisionError) as exc:
            raise MeasureError(f"{delta!r} is not a dyadic mass ({exc})", i) from None
        if not d:
            raise MeasureError("increments must be positive", i)
        if cursor + d > ONE:
            raise MeasureError(f"total mass {(cursor + d).to_binary()} exceeds 1", i)
        spans = intervals.setdefault(x, [])
        if spans and spans[-1][1] == cursor:
            spans[-1] = (spans[-1][0], cursor + d)
        else:
            spans.append((cursor, cursor + d))
        mass[x] = mass.get(x, ZERO) + d
        cursor = cursor + d
    programs = {x: [p for lo, hi in spans for p in aligned_cylinders(lo, hi)] for x, spans in intervals.items()}
    return SemimeasurePrograms(intervals, programs, mass)


# -- domination ---------------------------------------------------------------

@dataclass(frozen=True)
class DominationRow:
    x: str
    base: Dyadic  # sum over T-programs q of 2^-|q|
    lifted: Dyadic  # sum over r q of 2^-|r q|

    def holds(self, prefix_length: int) -> bool:
        return self.lifted == Dyadic.pow2(-prefix_length) * self.base


def domination_probe(lift_prefix: str, events: Iterable) -> list[DominationRow]:
    check_bits(lift_prefix)
    base: dict[str, Dyadic] = {}
    lifted: dict[str, Dyadic] = {}
    for q, x in _pairs(events):
        base[x] = base.get(x, ZERO) + Dyadic.pow2(-len(q))
        lifted[x] = lifted.get(x, ZERO) + Dyadic.pow2(-len(lift_prefix + q))
    return [DominationRow(x, base[x], lifted[x]) for x in sorted(base)]


# -- synthetic streams --------------------------------------------------------

def synthetic_events(rng: np.random.Generator, n_events: int, n_strings: int,
                     min_length: int | None = None) -> tuple[list[tuple[str, str]], dict[str, Fraction]]:
    """Prefix-free programs with random outputs, plus each output's exact mass."""
    if min_length is None:
        min_length = max(1, int(n_events).bit_length())
    lengths = (min_length + rng.geometric(0.5, size=n_events) - 1).tolist()
    programs = kraft_construct(lengths)
    targets = [number_to_string(int(k) + 1) for k in rng.integers(n_strings, size=n_events)]
    totals: dict[str, Fraction] = {}
    for p, x in zip(programs, targets):
        totals[x] = totals.get(x, Fraction(0)) + Fraction(1, 1 << len(p))
    return list(zip(programs, targets)), totals


def random_increments(rng: np.random.Generator, n: int, n_strings: int = 8,
                      max_exponent: int = 12) -> list[tuple[str, Dyadic]]:
    """Seeded dyadic increments whose total stays <= 1."""
    out, total = [], ZERO
    for _ in range(n):
        d = Dyadic(int(rng.integers(1, 8)), int(rng.integers(3, max_exponent + 1)))
        if total + d > ONE:
            break
        total = total + d
        out.append((number_to_string(int(rng.integers(n_strings)) + 1), d))
    return out


# -- JSON lines ---------------------------------------------------------------

def read_events(lines: Iterable[str]) -> list[tuple[str, str]]:
    out = []
    for n, line in enumerate(lines, start=1):
        if line.strip():
            rec = json.loads(line)
            try:
                out.append((check_bits(rec["p"]), check_bits(rec["x"])))
            except KeyError as exc:
                raise DomainError(f"event line {n}: missing field {exc}") from None
    return out


def quadruple_record(q: Quadruple) -> dict:
    return {"p": q.p, "x": q.x, "S": q.S.to_binary(), "a": q.a}


def read_quadruples(lines: Iterable[str]) -> list[Quadruple]:
    return [Quadruple(r["p"], r["x"], Dyadic.from_binary(r["S"]), r["a"])
            for r in (json.loads(l) for l in lines if l.strip())]


def read_increments(text: str) -> list[tuple[str, Dyadic]]:
    """A JSON list or JSON lines of ``{"x": bits, "delta": "0.01" | "1/4"}``."""
    text = text.strip()
    records = json.loads(text) if text.startswith("[") else [json.loads(l) for l in text.splitlines() if l.strip()]
    return [(r["x"], r["delta"]) for r in records]
