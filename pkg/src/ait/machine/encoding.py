"""Bit encoding E(T) of machines, the effective enumeration T_1, T_2, ...
and the universal machine over that enumeration.

E(T) = bar(s) bar(r) e(q1)e(s1)e(a1)e(q1') ... with s = ceil(log2(|Q| + 5))
the field width and r the rule count; ``s`` and ``r`` are written as the
strings identified with those numbers.  Inside e(.), states take codes
0..|Q|-1 by first appearance (q before q' in each rule) and the symbols
0, 1, B, L, R take the five codes after them.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterator

from ..bits import number_to_string, string_to_number
from ..codes import DecodeError, bar, pair_decode, selfdelim_decode
from .tm import ACTIONS, SYMBOLS, Machine, MachineFormatError, Rule, RunOutcome, run


class EncodingError(ValueError):
    """A bit string is not a valid machine encoding."""


class UniversalFormatError(ValueError):
    """A universal-machine program does not parse as bar(i) j."""


def field_width(n_states: int) -> int:
    return (n_states + 4).bit_length()


def header(s: int, r: int) -> str:
    return bar(number_to_string(s)) + bar(number_to_string(r))


def encode_machine(machine: Machine) -> str:
    if not machine.rules:
        raise MachineFormatError("a machine needs at least one rule to be encoded (r is written as a string)")
    states = {q: k for k, q in enumerate(machine.states)}
    nq = len(states)
    s = field_width(nq)
    body = []
    for rule in machine.rules:
        codes = (states[rule.state], nq + SYMBOLS.index(rule.scanned),
                 nq + ACTIONS.index(rule.action), states[rule.next])
        body.extend(format(c, f"0{s}b") for c in codes)
    return header(s, len(machine.rules)) + "".join(body)


def decode_machine(bits: str) -> Machine:
    """Inverse of :func:`encode_machine`; states come back as q0, q1, ..."""
    try:
        s_str, used = selfdelim_decode(bits, "E1-bar")
        r_str, used2 = selfdelim_decode(bits, "E1-bar", used)
    except DecodeError as exc:
        raise EncodingError(f"header: {exc}") from None
    s, r = string_to_number(s_str), string_to_number(r_str)
    body = bits[used + used2:]
    if s < 3:
        raise EncodingError(f"field width {s} < 3 cannot hold the five symbol codes")
    if len(body) < 4 * r * s:
        raise EncodingError(f"body truncated: {len(body)} of {4 * r * s} bits")
    if len(body) > 4 * r * s:
        raise EncodingError(f"trailing garbage: {len(body) - 4 * r * s} extra bits")
    fields = [int(body[k:k + s], 2) for k in range(0, len(body), s)]
    seen = 0
    for k in range(0, len(fields), 4):
        for f in (fields[k], fields[k + 3]):
            if f > seen:
                raise EncodingError(f"rule {k // 4 + 1}: state code {f} skips first-appearance order")
            seen = max(seen, f + 1)
    nq = seen
    if field_width(nq) != s:
        raise EncodingError(f"field width {s} != ceil(log2({nq} + 5)) = {field_width(nq)}")
    rules, pairs = [], set()
    for k in range(0, len(fields), 4):
        q, sc, ac, q2 = fields[k:k + 4]
        if not nq <= sc < nq + 3:
            raise EncodingError(f"rule {k // 4 + 1}: scanned code {sc} is not 0, 1 or B")
        if not nq <= ac < nq + 5:
            raise EncodingError(f"rule {k // 4 + 1}: action code {ac} is not 0, 1, B, L or R")
        if (q, sc) in pairs:
            raise EncodingError(f"rule {k // 4 + 1}: nondeterministic on (q{q}, {SYMBOLS[sc - nq]})")
        pairs.add((q, sc))
        rules.append(Rule(f"q{q}", SYMBOLS[sc - nq], ACTIONS[ac - nq], f"q{q2}"))
    return Machine(tuple(rules))


def is_valid_encoding(bits: str) -> bool:
    try:
        decode_machine(bits)
    except EncodingError:
        return False
    return True


# -- counting / ranking -------------------------------------------------------

def _state_range(s: int, r: int) -> range:
    """State counts compatible with field width ``s`` and ``r`` rules."""
    lo = max(1, (1 << (s - 1)) - 4)
    hi = min((1 << s) - 5, 2 * r)
    return range(lo, hi + 1)


@lru_cache(maxsize=None)
def _options(nq: int, seen: int, used: frozenset) -> tuple:
    """Valid next rules as ``(raw codes, new seen, new used)``, ascending."""
    out = []
    for q in range(min(seen, nq - 1) + 1):
        seen1 = max(seen, q + 1)
        for sym in range(3):
            if (q, sym) in used:
                continue
            used1 = used | {(q, sym)}
            for act in range(5):
                for q2 in range(min(seen1, nq - 1) + 1):
                    out.append(((q, nq + sym, nq + act, q2), max(seen1, q2 + 1), used1))
    return tuple(out)


@lru_cache(maxsize=None)
def _count(nq: int, r: int, j: int, seen: int, used: frozenset) -> int:
    if seen + 2 * (r - j) < nq:
        return 0
    if j == r:
        return int(seen == nq)
    return sum(_count(nq, r, j + 1, s1, u1) for _, s1, u1 in _options(nq, seen, used))


def layer_count(s: int, r: int) -> int:
    """Number of valid encodings with field width ``s`` and ``r`` rules."""
    return sum(_count(nq, r, 0, 0, frozenset()) for nq in _state_range(s, r))


def headers_of_length(length: int) -> list[tuple[int, int]]:
    """``(s, r)`` pairs whose encodings have exactly ``length`` bits, in
    lexicographic order of their headers."""
    out = []
    s = 3
    while 4 * s <= length:
        r = 1
        while 4 * r * s <= length:
            if len(header(s, r)) + 4 * r * s == length:
                out.append((s, r))
            r += 1
        s += 1
    return sorted(out, key=lambda sr: header(*sr))


@lru_cache(maxsize=None)
def length_count(length: int) -> int:
    return sum(layer_count(s, r) for s, r in headers_of_length(length))


MIN_LENGTH = len(header(3, 1)) + 12


def _fields(raw: tuple, s: int) -> str:
    return "".join(format(c, f"0{s}b") for c in raw)


def machine_by_index(i: int) -> Machine:
    """T_i: the machine whose encoding is the i-th valid one (i >= 1)."""
    return decode_machine(encoding_by_index(i))


def encoding_by_index(i: int) -> str:
    if i < 1:
        raise ValueError("machine indices start at 1")
    k = i - 1
    length = MIN_LENGTH
    while k >= length_count(length):
        k -= length_count(length)
        length += 1
    for s, r in headers_of_length(length):
        c = layer_count(s, r)
        if k < c:
            return header(s, r) + _unrank_body(s, r, k)
        k -= c
    raise AssertionError("layer bookkeeping out of sync")


def _unrank_body(s: int, r: int, k: int) -> str:
    states = {nq: (0, frozenset()) for nq in _state_range(s, r)}
    chosen = []
    for j in range(r):
        candidates: dict[tuple, list] = {}
        for nq, (seen, used) in states.items():
            for raw, s1, u1 in _options(nq, seen, used):
                candidates.setdefault(raw, []).append((nq, s1, u1))
        for raw in sorted(candidates):
            c = sum(_count(nq, r, j + 1, s1, u1) for nq, s1, u1 in candidates[raw])
            if k < c:
                chosen.append(raw)
                states = {nq: (s1, u1) for nq, s1, u1 in candidates[raw]}
                break
            k -= c
    return "".join(_fields(raw, s) for raw in chosen)


def index_of_machine(machine: Machine) -> int:
    return index_of_encoding(encode_machine(machine))


def index_of_encoding(bits: str) -> int:
    decode_machine(bits)  # validates
    s_str, used = selfdelim_decode(bits, "E1-bar")
    r_str, used2 = selfdelim_decode(bits, "E1-bar", used)
    s, r = string_to_number(s_str), string_to_number(r_str)
    body = bits[used + used2:]
    index = 1 + sum(length_count(n) for n in range(MIN_LENGTH, len(bits)))
    for sr in headers_of_length(len(bits)):
        if sr == (s, r):
            break
        index += layer_count(*sr)
    states = {nq: (0, frozenset()) for nq in _state_range(s, r)}
    for j in range(r):
        target = tuple(int(body[(4 * j + f) * s:(4 * j + f + 1) * s], 2) for f in range(4))
        nxt = {}
        for nq, (seen, used_pairs) in states.items():
            for raw, s1, u1 in _options(nq, seen, used_pairs):
                if raw < target:
                    index += _count(nq, r, j + 1, s1, u1)
                elif raw == target:
                    nxt[nq] = (s1, u1)
        states = nxt
    return index


def enumerate_encodings(count: int, start: int = 1) -> Iterator[tuple[int, str]]:
    for i in range(start, start + count):
        yield i, encoding_by_index(i)


def universal_run(program: str, budget: int = 10_000) -> RunOutcome:
    """U(bar(i) j) = T_i(j), with ``i`` read as the string identified with
    the machine index.  Steps are those of the simulated machine."""
    try:
        i_str, j = pair_decode(program)
    except DecodeError as exc:
        raise UniversalFormatError(f"program is not bar(i) j: {exc}") from None
    return run(machine_by_index(string_to_number(i_str)), j, budget)


def universal_program(index: int, input: str) -> str:
    return bar(number_to_string(index)) + input
