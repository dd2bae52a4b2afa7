"""Code tables and codecs.

Covers the four-way classification of codes (singular, nonsingular but not
uniquely decodable, uniquely decodable but not prefix, prefix), Kraft sums and
the tree construction of prefix codes from lengths, the self-delimiting
encodings of strings, pairing, and enumerative coding of balanced strings.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .bits import (
    CapacityError,
    DomainError,
    Dyadic,
    PrefixTree,
    ZERO,
    check_bits,
    format_bits,
    is_prefix_free,
    number_to_string,
    string_to_number,
)


class DecodeError(ValueError):
    """A stream does not start with a valid codeword."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at bit {position})")
        self.position = position


class CodeClass(str, Enum):
    SINGULAR = "singular"
    NOT_UD = "nonsingular-not-UD"
    UD_NOT_PREFIX = "uniquely-decodable-not-prefix"
    PREFIX = "prefix"


@dataclass(frozen=True)
class Code:
    alphabet: tuple[str, ...]
    table: Mapping[str, str]

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, str]) -> Code:
        for word in mapping.values():
            check_bits(word)
        return cls(tuple(mapping), dict(mapping))

    @property
    def codewords(self) -> list[str]:
        return [self.table[a] for a in self.alphabet]

    def encode(self, symbols: Iterable[str]) -> str:
        return "".join(self.table[a] for a in symbols)


@dataclass(frozen=True)
class ClassificationResult:
    klass: CodeClass
    witness: str | None = None
    parses: tuple[tuple[str, ...], tuple[str, ...]] | None = None


def parses(code: Code, stream: str) -> list[tuple[str, ...]]:
    """Every way of splitting ``stream`` into codewords of ``code``."""
    out: list[tuple[str, ...]] = []

    def walk(pos: int, acc: list[str]) -> None:
        if pos == len(stream):
            out.append(tuple(acc))
            return
        for a in code.alphabet:
            w = code.table[a]
            if w and stream.startswith(w, pos):
                acc.append(a)
                walk(pos + len(w), acc)
                acc.pop()

    walk(0, [])
    return out


def _shortest_ambiguity(code: Code) -> tuple[str, tuple[str, ...], tuple[str, ...]] | None:
    """Shortest stream with two distinct parses, or None if the code is UD.

    Dijkstra over dangling suffixes: a state is the surplus ``d`` by which
    one partial parse runs ahead of the other; the cost is the length of the
    longer side.  Reaching an empty surplus closes an ambiguity.  Finiteness
    of the suffix set makes this the Sardinas-Patterson test.
    """
    symbols = sorted(code.alphabet, key=lambda a: (code.table[a], a))
    heap: list = []
    for a in symbols:
        for b in symbols:
            wa, wb = code.table[a], code.table[b]
            if a != b and wb.startswith(wa) and len(wb) > len(wa):
                heapq.heappush(heap, (len(wb), wb[len(wa):], (b,), (a,)))
    settled: set[str] = set()
    while heap:
        cost, d, ahead, behind = heapq.heappop(heap)
        if d == "":
            return code.encode(ahead), ahead, behind
        if d in settled:
            continue
        settled.add(d)
        for c in symbols:
            w = code.table[c]
            if d.startswith(w):
                heapq.heappush(heap, (cost, d[len(w):], ahead, behind + (c,)))
            elif w.startswith(d):
                heapq.heappush(heap, (cost - len(d) + len(w), w[len(d):], behind + (c,), ahead))
    return None


def classify(code: Code) -> ClassificationResult:
    if not code.alphabet:
        raise DomainError("cannot classify an empty code")
    words = code.codewords
    if len(set(words)) != len(words):
        return ClassificationResult(CodeClass.SINGULAR)
    if "" in words:
        a = next(s for s in code.alphabet if code.table[s] == "")
        return ClassificationResult(CodeClass.NOT_UD, "", ((a,), (a, a)))
    if is_prefix_free(words):
        return ClassificationResult(CodeClass.PREFIX)
    found = _shortest_ambiguity(code)
    if found is None:
        return ClassificationResult(CodeClass.UD_NOT_PREFIX)
    stream, first, second = found
    return ClassificationResult(CodeClass.NOT_UD, stream, (first, second))


def kraft_sum(lengths: Iterable[int]) -> tuple[Dyadic, bool]:
    total = ZERO
    for n in lengths:
        if n < 0:
            raise DomainError("codeword lengths are naturals")
        total = total + Dyadic.pow2(-n)
    return total, total <= Dyadic(1)


def kraft_construct(lengths: Sequence[int]) -> list[str]:
    """Prefix codewords with the given lengths, returned in input order.

    Lengths are served in nondecreasing order (stable), each taking the
    lexicographically first free node at its depth.
    """
    if any(n < 1 for n in lengths):
        raise DomainError("constructed prefix codes need lengths >= 1")
    total, ok = kraft_sum(lengths)
    if not ok:
        raise CapacityError(f"Kraft sum {total.to_binary()} exceeds 1")
    tree = PrefixTree()
    out = [""] * len(lengths)
    for i in sorted(range(len(lengths)), key=lambda i: lengths[i]):
        out[i] = tree.allocate_first_available(lengths[i])
    return out


# -- self-delimiting encodings ------------------------------------------------

SCHEMES = ("E0", "E1-zeros", "E1-bar", "E2", "prime")
E0_CAP = 1 << 20


def bar(x: str) -> str:
    """``1^|x| 0 x``; the canonical self-delimiting form."""
    return "1" * len(x) + "0" + x


def _length_string(x: str, scheme: str) -> str:
    if not x:
        raise DomainError(f"{scheme} is undefined on the empty string (its length has no string)")
    return number_to_string(len(x))


def selfdelim_encode(x: str, scheme: str = "E1-bar", e0_cap: int = E0_CAP) -> str:
    check_bits(x)
    if scheme == "E0":
        n = string_to_number(x)
        if n > e0_cap:
            raise DomainError(f"E0 codeword of length {n + 1} exceeds cap {e0_cap}")
        return "0" * n + "1"
    if scheme == "E1-zeros":
        return "0" * len(x) + "1" + x
    if scheme == "E1-bar":
        return bar(x)
    if scheme == "E2":
        return selfdelim_encode(_length_string(x, scheme), "E1-zeros") + x
    if scheme == "prime":
        return bar(_length_string(x, scheme)) + x
    raise DomainError(f"unknown scheme {scheme!r}; choose from {', '.join(SCHEMES)}")


def _unary(stream: str, pos: int, bit: str, scheme: str) -> int:
    """Count ``bit`` repeats from ``pos`` up to the terminating other bit."""
    stop = "1" if bit == "0" else "0"
    end = stream.find(stop, pos)
    if end < 0:
        raise DecodeError(f"{scheme}: unterminated unary prefix", len(stream))
    return end - pos


def _take(stream: str, pos: int, n: int, scheme: str) -> str:
    if pos + n > len(stream):
        raise DecodeError(f"{scheme}: stream truncated, needed {n} bits", len(stream))
    return stream[pos:pos + n]


def selfdelim_decode(stream: str, scheme: str = "E1-bar", pos: int = 0) -> tuple[str, int]:
    """Decode one codeword starting at ``pos``; return ``(x, consumed)``."""
    check_bits(stream)
    start = pos
    if scheme == "E0":
        n = _unary(stream, pos, "0", scheme)
        if n == 0:
            raise DecodeError("E0: codeword 1 encodes no string", pos)
        return number_to_string(n), n + 1
    if scheme in ("E1-zeros", "E1-bar"):
        bit = "0" if scheme == "E1-zeros" else "1"
        n = _unary(stream, pos, bit, scheme)
        pos += n + 1
        return _take(stream, pos, n, scheme), pos + n - start
    if scheme in ("E2", "prime"):
        inner = "E1-zeros" if scheme == "E2" else "E1-bar"
        length_str, used = selfdelim_decode(stream, inner, pos)
        pos += used
        n = string_to_number(length_str)
        return _take(stream, pos, n, scheme), pos + n - start
    raise DomainError(f"unknown scheme {scheme!r}; choose from {', '.join(SCHEMES)}")


def selfdelim_decode_all(stream: str, schemes: Sequence[str]) -> list[str]:
    """Decode consecutive codewords, one per entry of ``schemes``; the whole
    stream must be consumed."""
    out, pos = [], 0
    for scheme in schemes:
        x, used = selfdelim_decode(stream, scheme, pos)
        out.append(x)
        pos += used
    if pos != len(stream):
        raise DecodeError("trailing bits after last codeword", pos)
    return out


def pair_encode(i: str, j: str) -> str:
    return bar(check_bits(i)) + check_bits(j)


def pair_decode(stream: str) -> tuple[str, str]:
    i, used = selfdelim_decode(stream, "E1-bar")
    return i, stream[used:]


# -- enumerative coding of fixed-weight strings --------------------------------

def balanced_rank(x: str) -> int:
    """Position of ``x`` among all strings of its length and weight, in
    lexicographic order."""
    check_bits(x)
    n, ones = len(x), x.count("1")
    rank = 0
    for i, bit in enumerate(x):
        if bit == "1":
            # every string with a 0 here (and the same prefix) comes first
            rank += math.comb(n - i - 1, ones)
            ones -= 1
    return rank


def balanced_unrank(n: int, k: int, rank: int) -> str:
    if not 0 <= k <= n:
        raise DomainError(f"weight {k} impossible for length {n}")
    if not 0 <= rank < math.comb(n, k):
        raise DomainError(f"rank {rank} outside [0, C({n},{k}))")
    out = []
    for i in range(n):
        zeros_first = math.comb(n - i - 1, k)
        if rank < zeros_first:
            out.append("0")
        else:
            rank -= zeros_first
            out.append("1")
            k -= 1
    return "".join(out)


def balanced_encode(x: str, k: int | None = None) -> str:
    """Fixed-width codeword of ``x`` given its length and weight.

    With ``k`` given, a string of another weight is a domain error.
    """
    n = len(x)
    weight = x.count("1")
    if k is not None and weight != k:
        raise DomainError(f"{format_bits(x)} has weight {weight}, expected {k}")
    width = balanced_code_length(n, weight)
    return format(balanced_rank(x), f"0{width}b") if width else ""


def balanced_decode(codeword: str, n: int, k: int) -> str:
    if len(codeword) != balanced_code_length(n, k):
        raise DecodeError(f"codeword must have {balanced_code_length(n, k)} bits", len(codeword))
    return balanced_unrank(n, k, int(codeword or "0", 2))


def balanced_code_length(n: int, k: int | None = None) -> int:
    """``ceil(log2 C(n, k))`` bits; ``k`` defaults to ``n // 2``."""
    count = math.comb(n, n // 2 if k is None else k)
    return (count - 1).bit_length()
