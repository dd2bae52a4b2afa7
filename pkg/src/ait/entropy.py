"""Shannon entropy, joint/conditional entropy, mutual information, the data
processing inequality and Shannon-Fano codes.  Logarithms are base 2."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bits import DomainError, Dyadic
from .codes import Code, kraft_construct

FLOAT_TOL = 1e-12


@dataclass(frozen=True)
class Distribution:
    outcomes: tuple[str, ...]
    probabilities: tuple  # Fractions (exact mode) or floats

    def __post_init__(self):
        if len(self.outcomes) != len(self.probabilities):
            raise DomainError("outcomes and probabilities differ in length")
        if not self.outcomes:
            raise DomainError("empty distribution")
        if any(p < 0 for p in self.probabilities):
            raise DomainError("negative probability")
        total = sum(self.probabilities)
        if self.exact:
            if total != 1:
                raise DomainError(f"probabilities sum to {total}, not 1")
        elif abs(float(total) - 1.0) > FLOAT_TOL:
            raise DomainError(f"probabilities sum to {float(total)!r}, not 1")

    @property
    def exact(self) -> bool:
        return all(isinstance(p, (Fraction, int)) for p in self.probabilities)

    @classmethod
    def of(cls, probabilities: Sequence, outcomes: Sequence[str] | None = None) -> Distribution:
        if outcomes is None:
            outcomes = [str(i) for i in range(len(probabilities))]
        probs = tuple(_parse_probability(p) for p in probabilities)
        if not all(isinstance(p, Fraction) for p in probs):
            probs = tuple(float(p) for p in probs)
        return cls(tuple(outcomes), probs)

    @classmethod
    def uniform(cls, n: int) -> Distribution:
        return cls.of([Fraction(1, n)] * n)


def _parse_probability(p):
    if isinstance(p, (Fraction, int)):
        return Fraction(p)
    if isinstance(p, str):
        return Fraction(p.strip()) if "e" not in p.lower() else float(p)
    return float(p)


def load_distribution(text: str) -> Distribution:
    """JSON object ``{"outcome": prob}`` / JSON list, or two-column CSV.

    String probabilities such as ``"1/64"`` are read exactly.
    """
    text = text.strip()
    if text.startswith(("{", "[")):
        data = json.loads(text)
        if isinstance(data, dict):
            return Distribution.of(list(data.values()), list(data))
        return Distribution.of(data)
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
    if rows and rows[0][-1].strip().lower() in ("p", "prob", "probability"):
        rows = rows[1:]
    return Distribution.of([r[-1] for r in rows], [r[0].strip() if len(r) > 1 else str(i) for i, r in enumerate(rows)])


def _h(probs) -> float:
    total = 0.0
    for p in probs:
        p = float(p)
        if p > 0:
            total += p * math.log2(1.0 / p)
    return total


def entropy(d: Distribution) -> float:
    return _h(d.probabilities)


def entropy_exact(d: Distribution) -> Fraction:
    """Exact entropy of a distribution whose nonzero masses are powers of 2."""
    total = Fraction(0)
    for p in d.probabilities:
        if not isinstance(p, Fraction):
            raise DomainError("exact entropy needs rational probabilities")
        if p == 0:
            continue
        if p.numerator != 1 or p.denominator & (p.denominator - 1):
            raise DomainError(f"log2(1/{p}) is irrational; use float mode")
        total += p * (p.denominator.bit_length() - 1)
    return total


def check_joint(joint) -> np.ndarray:
    m = np.asarray(joint, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise DomainError("joint distribution must be a nonempty matrix")
    if (m < 0).any():
        raise DomainError("negative joint probability")
    if abs(m.sum() - 1.0) > 1e-9:
        raise DomainError(f"joint sums to {m.sum()!r}, not 1")
    return m


@dataclass(frozen=True)
class JointReport:
    h_xy: float
    h_x: float
    h_y: float
    h_y_given_x: float
    h_x_given_y: float
    mi: float
    mi_yx: float

    @property
    def chain_residual(self) -> float:
        return abs(self.h_xy - self.h_x - self.h_y_given_x)


def _conditional(m: np.ndarray) -> float:
    """H(columns | rows) from the definition: sum_x p(x) H(Y | X = x)."""
    total = 0.0
    for row in m:
        px = float(row.sum())
        if px > 0:
            total += px * _h(row / px)
    return total


def _mutual(m: np.ndarray) -> float:
    px, py = m.sum(axis=1), m.sum(axis=0)
    total = 0.0
    for i in range(m.shape[0]):
        for j in range(m.shape[1]):
            p = m[i, j]
            if p > 0:
                total += p * math.log2(p / (px[i] * py[j]))
    return total


def joint_conditional_mutual(joint) -> JointReport:
    m = check_joint(joint)
    return JointReport(
        h_xy=_h(m.ravel()),
        h_x=_h(m.sum(axis=1)),
        h_y=_h(m.sum(axis=0)),
        h_y_given_x=_conditional(m),
        h_x_given_y=_conditional(m.T),
        mi=_mutual(m),
        mi_yx=_mutual(m.T),
    )


def shannon_fano_lengths(d: Distribution) -> list[int]:
    lengths = []
    for p in d.probabilities:
        if p <= 0:
            raise DomainError("Shannon-Fano needs every probability > 0")
        q = Fraction(p)  # exact binary value of a float
        l = 0
        while (q.numerator << l) < q.denominator:
            l += 1
        lengths.append(l)
    return lengths


def shannon_fano(d: Distribution) -> Code:
    lengths = shannon_fano_lengths(d)
    if lengths == [0]:
        lengths = [1]  # a single certain symbol still needs one bit
    words = kraft_construct(lengths)
    return Code(d.outcomes, dict(zip(d.outcomes, words)))


def expected_length(d: Distribution, code: Code):
    return sum(p * len(code.table[a]) for a, p in zip(d.outcomes, d.probabilities))


@dataclass(frozen=True)
class MarkovTriple:
    px: np.ndarray
    py_given_x: np.ndarray
    pz_given_y: np.ndarray

    def __post_init__(self):
        check_joint(np.asarray(self.px, dtype=float)[None, :])
        for name in ("py_given_x", "pz_given_y"):
            t = np.asarray(getattr(self, name), dtype=float)
            if t.ndim != 2 or (t < 0).any() or np.abs(t.sum(axis=1) - 1).max() > 1e-9:
                raise DomainError(f"{name} must be a row-stochastic matrix")
        if len(self.px) != self.py_given_x.shape[0] or self.py_given_x.shape[1] != self.pz_given_y.shape[0]:
            raise DomainError("Markov triple shapes do not chain")


def dpi_probe(t: MarkovTriple, tol: float = 1e-9) -> tuple[float, float, bool]:
    px = np.asarray(t.px, dtype=float)
    pxy = px[:, None] * t.py_given_x
    pxz = pxy @ t.pz_given_y
    i_xy, i_xz = _mutual(pxy), _mutual(pxz)
    return i_xy, i_xz, i_xy >= i_xz - tol


def random_simplex(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform point on the probability simplex (flat Dirichlet)."""
    return rng.dirichlet(np.ones(n))


def random_joint(rng: np.random.Generator, max_size: int = 8) -> np.ndarray:
    rows, cols = rng.integers(1, max_size + 1, size=2)
    return random_simplex(rng, rows * cols).reshape(rows, cols)


def random_markov_triple(rng: np.random.Generator, max_size: int = 8) -> MarkovTriple:
    nx, ny, nz = rng.integers(1, max_size + 1, size=3)
    return MarkovTriple(
        random_simplex(rng, nx),
        np.array([random_simplex(rng, ny) for _ in range(nx)]),
        np.array([random_simplex(rng, nz) for _ in range(ny)]),
    )


def entropy_as_dyadic(d: Distribution) -> Dyadic:
    return Dyadic.from_fraction(entropy_exact(d))
