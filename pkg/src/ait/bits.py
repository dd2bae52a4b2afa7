"""Bit strings, their number identification, exact dyadic rationals, cylinders
and the prunable binary prefix tree.

Bit strings are plain ``str`` objects over ``"0"`` and ``"1"``; the empty
string is ``""`` (written ``e`` on the command line and in files).
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Iterator, NamedTuple

EMPTY_LITERAL = "e"


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class CapacityError(RuntimeError):
    """No free node is left at the requested depth of a prefix tree."""


def check_bits(x: str) -> str:
    if x.strip("01"):
        raise DomainError(f"not a bit string: {x!r}")
    return x


def parse_bits(text: str) -> str:
    """Parse a bit-string literal; ``e`` denotes the empty string."""
    text = text.strip()
    if text == EMPTY_LITERAL:
        return ""
    return check_bits(text)


def format_bits(x: str) -> str:
    return x if x else EMPTY_LITERAL


def string_to_number(x: str) -> int:
    """Rank of ``x`` in length-lexicographic order, starting at 1.

    >>> [string_to_number(s) for s in ["", "0", "1", "00", "11"]]
    [1, 2, 3, 4, 7]
    """
    return int("1" + check_bits(x), 2)


def number_to_string(n: int) -> str:
    if n < 1:
        raise DomainError(f"number_to_string needs n >= 1, got {n}")
    return bin(n)[3:]


def all_strings(max_length: int, min_length: int = 0) -> Iterator[str]:
    """All bit strings with length in ``[min_length, max_length]``, in
    length-lexicographic order."""
    for n in range(min_length, max_length + 1):
        for t in itertools.product("01", repeat=n):
            yield "".join(t)


def strings_of_length(n: int) -> Iterator[str]:
    return all_strings(n, n)


def is_prefix_free(words: Iterable[str]) -> bool:
    """True when no word is a prefix of another (duplicates count as prefixes)."""
    ordered = sorted(words)
    # in sorted order a prefix immediately precedes one of its extensions
    return not any(b.startswith(a) for a, b in zip(ordered, ordered[1:]))


@total_ordering
class Dyadic:
    """Exact nonnegative binary fraction ``numerator / 2**exponent``.

    Stored normalized: the numerator is odd, or zero with exponent 0.
    """

    __slots__ = ("numerator", "exponent")

    def __init__(self, numerator: int = 0, exponent: int = 0):
        if numerator < 0:
            raise DomainError("dyadic rationals here are nonnegative")
        if exponent < 0:
            numerator <<= -exponent
            exponent = 0
        if numerator == 0:
            exponent = 0
        else:
            shift = (numerator & -numerator).bit_length() - 1
            shift = min(shift, exponent)
            numerator >>= shift
            exponent -= shift
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "exponent", exponent)

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    @classmethod
    def pow2(cls, k: int) -> Dyadic:
        """``2**k`` for any integer ``k``."""
        return cls(1 << k, 0) if k >= 0 else cls(1, -k)

    @classmethod
    def from_fraction(cls, f: Fraction | int) -> Dyadic:
        f = Fraction(f)
        den = f.denominator
        if den & (den - 1):
            raise DomainError(f"{f} is not dyadic")
        return cls(f.numerator, den.bit_length() - 1)

    @classmethod
    def from_binary(cls, text: str) -> Dyadic:
        """Parse ``"0.001011"``, ``"1"``, ``"0"`` or ``"10.1"``."""
        text = text.strip()
        whole, _, frac = text.partition(".")
        check_bits(whole)
        check_bits(frac)
        if not whole and not frac:
            raise DomainError("empty binary numeral")
        return cls(int((whole or "0") + frac, 2), len(frac))

    def to_binary(self) -> str:
        """Shortest exact binary numeral, e.g. ``"0.001011"`` or ``"1"``."""
        whole = self.numerator >> self.exponent
        if self.exponent == 0:
            return bin(whole)[2:]
        frac = self.numerator & ((1 << self.exponent) - 1)
        return f"{whole:b}.{frac:0{self.exponent}b}"

    def fraction_bits(self, n: int) -> str:
        """First ``n`` bits after the binary point (truncated)."""
        scaled = (self.numerator << n) >> self.exponent
        return format(scaled & ((1 << n) - 1), f"0{n}b") if n else ""

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def __float__(self) -> float:
        return self.numerator / (1 << self.exponent)

    def _aligned(self, other: Dyadic) -> tuple[int, int, int]:
        e = max(self.exponent, other.exponent)
        return self.numerator << (e - self.exponent), other.numerator << (e - other.exponent), e

    def __add__(self, other: Dyadic) -> Dyadic:
        if not isinstance(other, Dyadic):
            return NotImplemented
        a, b, e = self._aligned(other)
        return Dyadic(a + b, e)

    def __sub__(self, other: Dyadic) -> Dyadic:
        if not isinstance(other, Dyadic):
            return NotImplemented
        a, b, e = self._aligned(other)
        return Dyadic(a - b, e)

    def __mul__(self, other: Dyadic) -> Dyadic:
        if not isinstance(other, Dyadic):
            return NotImplemented
        return Dyadic(self.numerator * other.numerator, self.exponent + other.exponent)

    def __eq__(self, other) -> bool:
        if isinstance(other, Dyadic):
            return self.numerator == other.numerator and self.exponent == other.exponent
        if isinstance(other, (int, Fraction)):
            return self.as_fraction() == other
        return NotImplemented

    def __lt__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.as_fraction() < other
        if not isinstance(other, Dyadic):
            return NotImplemented
        a, b, _ = self._aligned(other)
        return a < b

    def __hash__(self) -> int:
        return hash(self.as_fraction())

    def __bool__(self) -> bool:
        return self.numerator != 0

    def __repr__(self) -> str:
        return f"Dyadic({self.to_binary()})"


ZERO = Dyadic(0)
ONE = Dyadic(1)


def leading_one_position(alpha: Dyadic) -> int:
    """Position ``i`` of the first 1 after the binary point: the ``i`` with
    ``2**-i <= alpha < 2**(-i+1)``, i.e. ``ceil(-log2 alpha)``.

    Defined for ``0 < alpha <= 1``; ``alpha == 1`` gives 0.
    """
    if not alpha or alpha > ONE:
        raise DomainError(f"leading_one_position needs 0 < alpha <= 1, got {alpha.to_binary()}")
    return alpha.exponent - alpha.numerator.bit_length() + 1


class Cylinder(NamedTuple):
    """Half-open interval ``[lower, lower + width)`` of reals starting with ``base``."""

    base: str
    lower: Dyadic
    width: Dyadic

    @property
    def upper(self) -> Dyadic:
        return self.lower + self.width

    def contains(self, other: Cylinder) -> bool:
        return self.lower <= other.lower and other.upper <= self.upper

    def disjoint(self, other: Cylinder) -> bool:
        return self.upper <= other.lower or other.upper <= self.lower


def cylinder_of(x: str) -> Cylinder:
    check_bits(x)
    return Cylinder(x, Dyadic(int(x or "0", 2), len(x)), Dyadic.pow2(-len(x)))


class _Node:
    __slots__ = ("children", "allocated", "best")

    def __init__(self, depth: int):
        self.children: list[_Node | None] = [None, None]
        self.allocated = False
        # shallowest depth at which this subtree still has a free node
        self.best = depth


class PrefixTree:
    """Sparse binary tree of allocated codeword nodes.

    Allocating a node cuts off its whole subtree; a node is available when it
    is not allocated, has no allocated ancestor and no allocated descendant.
    """

    def __init__(self) -> None:
        self._root = _Node(0)
        self.allocated: set[str] = set()
        self.mass = ZERO

    @property
    def pruned(self) -> set[str]:
        """Roots of the subtrees removed from the tree (the allocated nodes)."""
        return set(self.allocated)

    def is_available(self, address: str) -> bool:
        node = self._root
        for bit in address:
            if node.allocated:
                return False
            node = node.children[int(bit)]
            if node is None:
                return True
        return not node.allocated and not any(node.children)

    def first_available(self, depth: int) -> str | None:
        """Address of the lexicographically first available node at ``depth``."""
        node = self._root
        if node.best > depth:
            return None
        path = []
        k = 0
        while True:
            if node.allocated:
                return None  # unreachable: best would be infinite
            if k == depth:
                return "".join(path)
            for bit in (0, 1):
                child = node.children[bit]
                if child is None:
                    return "".join(path) + str(bit) + "0" * (depth - k - 1)
                if child.best <= depth:
                    path.append(str(bit))
                    node = child
                    k += 1
                    break
            else:
                return None

    def allocate(self, address: str) -> None:
        if not self.is_available(address):
            raise CapacityError(f"node {format_bits(address)} is not available")
        nodes = [self._root]
        for k, bit in enumerate(address, start=1):
            child = nodes[-1].children[int(bit)]
            if child is None:
                child = _Node(k)
                nodes[-1].children[int(bit)] = child
            nodes.append(child)
        nodes[-1].allocated = True
        nodes[-1].best = 1 << 62
        for k in range(len(nodes) - 2, -1, -1):
            n = nodes[k]
            n.best = min(c.best if c is not None else k + 1 for c in n.children)
        self.allocated.add(address)
        self.mass = self.mass + Dyadic.pow2(-len(address))

    def allocate_first_available(self, depth: int) -> str:
        if depth < 1:
            raise DomainError("allocation depth must be >= 1")
        address = self.first_available(depth)
        if address is None:
            raise CapacityError(f"prefix tree exhausted at depth {depth}")
        self.allocate(address)
        return address
