"""Dovetailed semi-computation over program space.

Every program ``p`` with ``|p| <= max_length`` is run once with budget
``min(max_phase, 2**|p|)`` (budgeted semantics) or ``max_phase``.  A program
that halts after ``t`` steps is revealed in phase ``max(|p|, t, 1)``: the
first phase ``k`` in which it is both scheduled (``|p| <= k``) and given
enough steps (``k >= t``).  Events are ordered by ``(phase, rank(p))``, so the
stream depends only on the limits, never on how the runs were scheduled.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import groupby
from typing import Iterable

import numpy as np

from .bits import ZERO, ONE, DomainError, Dyadic, all_strings, check_bits, string_to_number, strings_of_length
from .families import KINDS, ProgramRun, lift_prefix, print_program, run_family
from .machine.selfdelim import SELFDELIM_ACTIONS, selfdelim_run
from .machine.tm import Machine, Rule

WORKERS_ENV = "AIT_WORKERS"
DEFAULT_UNBUDGETED_PHASE = 1 << 12


def default_workers() -> int:
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


@dataclass(frozen=True)
class MachineMode:
    """Which machine runs the programs and under which semantics.

    ``family`` names a reference family (see :mod:`ait.families`) or ``sd``
    for an explicit self-delimiting machine given in ``machine``.
    """

    family: str = "ref-1"
    kind: str = "prefix"
    budgeted: bool = True
    aux: str = ""
    machine: Machine | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"kind must be one of {KINDS}")
        check_bits(self.aux)
        if self.family == "sd":
            if self.machine is None:
                raise DomainError("family 'sd' needs a machine")
            if self.kind != "prefix":
                raise DomainError("self-delimiting machines run in prefix mode only")

    def budget(self, p: str, max_phase: int) -> int:
        return min(max_phase, 1 << len(p)) if self.budgeted else max_phase

    def run(self, p: str, budget: int) -> ProgramRun:
        if self.family == "sd":
            r = selfdelim_run(self.machine, p, self.aux, budget)
            status = {"success": "halted", "underrun": "failed", "overrun": "failed"}.get(r.status, r.status)
            return ProgramRun(status, r.output, r.steps, r.consumed)
        return run_family(self.family, p, self.aux, budget, self.kind)

    def describe(self) -> dict:
        out = {"family": self.family, "kind": self.kind, "budgeted": self.budgeted, "aux": self.aux}
        if self.machine is not None:
            out["machine"] = self.machine.to_text()
        return out


def default_phase(mode: MachineMode, max_length: int) -> int:
    """Smallest phase after which a budgeted run has nothing left to reveal."""
    return max(1, 1 << max_length) if mode.budgeted else DEFAULT_UNBUDGETED_PHASE


# -- running ------------------------------------------------------------------

def _run_chunk(args) -> list[ProgramRun]:
    mode, programs, max_phase = args
    return [mode.run(p, mode.budget(p, max_phase)) for p in programs]


def explore(mode: MachineMode, max_length: int, max_phase: int, workers: int | None = None) -> dict[str, ProgramRun]:
    """Run every program of length <= min(max_length, max_phase) once."""
    if max_length < 0 or max_phase < 1:
        raise DomainError("limits must be >= 1 (max_length >= 0)")
    programs = list(all_strings(min(max_length, max_phase)))
    workers = workers or default_workers()
    if workers <= 1 or len(programs) < 256:
        runs = _run_chunk((mode, programs, max_phase))
    else:
        chunks = [list(c) for c in np.array_split(np.array(programs, dtype=object), workers * 4) if len(c)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = [r for part in pool.map(_run_chunk, [(mode, c, max_phase) for c in chunks]) for r in part]
    return dict(zip(programs, runs))


@dataclass(frozen=True, order=True)
class HaltEvent:
    phase: int
    rank: int
    program: str = field(compare=False)
    output: str = field(compare=False)
    steps: int = field(compare=False)


def events_from_runs(runs: dict[str, ProgramRun], max_phase: int) -> list[HaltEvent]:
    events = []
    for p, r in runs.items():
        if r.halted:
            phase = max(len(p), r.steps, 1)
            if phase <= max_phase:
                events.append(HaltEvent(phase, string_to_number(p), p, r.output, r.steps))
    return sorted(events)


def dovetail(mode: MachineMode, max_length: int, max_phase: int | None = None,
             workers: int | None = None) -> list[HaltEvent]:
    max_phase = max_phase or default_phase(mode, max_length)
    return events_from_runs(explore(mode, max_length, max_phase, workers), max_phase)


# -- halting tables -----------------------------------------------------------

@dataclass(frozen=True)
class Entry:
    status: str  # halts | fails | diverges | proven-looping | unknown | nonhalting
    steps: int | None = None
    output: str | None = None


def _entry(p: str, run: ProgramRun, mode: MachineMode, budget: int) -> Entry:
    if run.halted:
        return Entry("halts", run.steps, run.output)
    if run.status == "failed":
        return Entry("fails")
    if run.status == "proven-looping":
        return Entry("proven-looping")
    # out of steps: past the cutoff in budgeted semantics, otherwise open
    return Entry("diverges" if mode.budgeted and budget >= 1 << len(p) else "unknown")


@dataclass
class HaltingTable:
    n: int
    entries: dict[str, Entry]

    def halts(self, p: str) -> bool:
        return self.entries[p].status == "halts"

    def halting(self) -> list[str]:
        return [p for p, e in self.entries.items() if e.status == "halts"]

    def chi(self) -> str:
        """Halting bits of all programs |p| <= n ordered by their numbers."""
        return "".join("1" if self.halts(p) else "0" for p in all_strings(self.n))

    def mismatches(self, other: HaltingTable) -> list[str]:
        """Programs on which the two tables disagree about halting or its result."""
        out = []
        for p in all_strings(self.n):
            a, b = self.entries[p], other.entries[p]
            if (a.status == "halts") != (b.status == "halts") or \
                    (a.status == "halts" and (a.steps, a.output) != (b.steps, b.output)):
                out.append(p)
        return out


def halting_table(mode: MachineMode, n: int, max_phase: int | None = None,
                  workers: int | None = None) -> HaltingTable:
    """Direct table: every |p| <= n run to its budget."""
    max_phase = max_phase or default_phase(mode, n)
    runs = explore(mode, n, max(max_phase, n), workers)
    return HaltingTable(n, {p: _entry(p, r, mode, mode.budget(p, max(max_phase, n))) for p, r in runs.items()})


# -- halting probability ------------------------------------------------------

class OmegaAccumulator:
    """Exact running sum of 2^-|p| over credited programs."""

    def __init__(self, bounded: bool = True):
        self.S = ZERO
        self.credited: set[str] = set()
        self.bounded = bounded

    def credit(self, p: str) -> Dyadic:
        if p in self.credited:
            raise AssertionError(f"program {p!r} credited twice")
        self.credited.add(p)
        new = self.S + Dyadic.pow2(-len(p))
        if self.bounded and new > ONE:
            raise AssertionError("halting mass exceeds 1: the domain is not prefix-free")
        self.S = new
        return new


@dataclass
class OmegaResult:
    S: Dyadic
    table: HaltingTable
    trajectory: list[tuple[int, Dyadic]]  # (phase, S after the phase) whenever S moved
    exact: bool  # budgeted run carried to the last cutoff


def omega_lower(mode: MachineMode, max_length: int, max_phase: int | None = None,
                workers: int | None = None) -> OmegaResult:
    if mode.kind != "prefix":
        raise DomainError("halting probability is defined for prefix (self-delimiting) mode")
    max_phase = max_phase or default_phase(mode, max_length)
    runs = explore(mode, max_length, max_phase, workers)
    acc = OmegaAccumulator()
    trajectory = []
    for phase, group in groupby(events_from_runs(runs, max_phase), key=lambda e: e.phase):
        for e in group:
            acc.credit(e.program)
        trajectory.append((phase, acc.S))
    table = HaltingTable(min(max_length, max_phase),
                         {p: _entry(p, r, mode, mode.budget(p, max_phase)) for p, r in runs.items()})
    exact = mode.budgeted and max_phase >= 1 << max_length
    return OmegaResult(acc.S, table, trajectory, exact)


def omega_prefix(mode: MachineMode, max_length: int, bits: int | None = None,
                 workers: int | None = None) -> str:
    """First ``bits`` binary digits of the budgeted halting probability."""
    if not mode.budgeted:
        raise DomainError("an exact prefix needs budgeted semantics")
    return omega_lower(mode, max_length, workers=workers).S.fraction_bits(max_length if bits is None else bits)


class OmegaError(RuntimeError):
    pass


class InconclusiveError(OmegaError):
    """The safety cap ran out before the sum reached the claimed prefix."""


class WrongPrefixError(OmegaError):
    """A complete budgeted run stayed below the claimed prefix."""


@dataclass
class OmegaHaltingResult:
    table: HaltingTable
    stop_phase: int
    S_at_stop: Dyadic
    S_final: Dyadic
    inconsistent: bool
    witness: str | None  # program whose credit pushed S past the claimed prefix


def omega_to_halting(prefix: str, n: int, mode: MachineMode, max_length: int | None = None,
                     cap: int | None = None, workers: int | None = None) -> OmegaHaltingResult:
    """Recover the halting table of |p| <= n from leading bits of Ω.

    Dovetails until the running sum reaches ``0.prefix``; everything of
    length <= n not seen by then is declared non-halting.  The run is then
    continued to the cap to flag a prefix that the sum overshoots.
    """
    check_bits(prefix)
    if mode.kind != "prefix":
        raise DomainError("omega_to_halting needs prefix mode")
    if len(prefix) < n:
        raise DomainError(f"{len(prefix)} bits of Ω cannot settle programs of length {n}")
    max_length = max(n, max_length or n)
    cap = cap or default_phase(mode, max_length)
    target = Dyadic(int(prefix or "0", 2), len(prefix))
    events = dovetail(mode, max_length, cap, workers)

    S, stop, found = ZERO, None, {}
    if S >= target:
        stop = 0
    for phase, group in groupby(events, key=lambda e: e.phase):
        if stop is not None:
            break
        for e in group:
            S = S + Dyadic.pow2(-len(e.program))
            found[e.program] = e
        if S >= target:
            stop = phase
    if stop is None:
        if mode.budgeted and cap >= 1 << max_length:
            raise WrongPrefixError(f"complete run reached only {S.to_binary()} < 0.{prefix}")
        raise InconclusiveError(f"cap of {cap} phases reached with S = {S.to_binary()} < 0.{prefix}")

    S_stop = S
    limit = target + Dyadic.pow2(-len(prefix))
    total, witness = ZERO, None
    for e in events:
        total = total + Dyadic.pow2(-len(e.program))
        if witness is None and total >= limit:
            witness = e.program
    entries = {}
    for p in all_strings(n):
        e = found.get(p)
        entries[p] = Entry("halts", e.steps, e.output) if e and e.phase <= stop else Entry("nonhalting")
    return OmegaHaltingResult(HaltingTable(n, entries), stop, S_stop, total, witness is not None, witness)


# -- busy beaver --------------------------------------------------------------

@dataclass
class BusyBeaverTable:
    values: list[tuple[int, int, str | None]]  # (n, B(n), witness)
    exact: bool

    def B(self, n: int) -> int:
        return self.values[n][1]


def _bb_rows(table: HaltingTable) -> list[tuple[int, int, str | None]]:
    rows, best, witness = [], 0, None
    for k in range(table.n + 1):
        for p in strings_of_length(k):
            e = table.entries[p]
            if e.status == "halts" and (witness is None or e.steps > best):
                best, witness = e.steps, p
        rows.append((k, best, witness))
    return rows


def busy_beaver(mode: MachineMode, n: int, max_phase: int | None = None,
                workers: int | None = None) -> BusyBeaverTable:
    table = halting_table(mode, n, max_phase, workers)
    exact = mode.budgeted and (max_phase is None or max_phase >= 1 << n)
    return BusyBeaverTable(_bb_rows(table), exact)


def bb_from_omega(prefix: str, n: int, mode: MachineMode, max_length: int | None = None,
                  workers: int | None = None) -> tuple[int, str | None]:
    result = omega_to_halting(prefix, n, mode, max_length, workers=workers)
    _, b, witness = _bb_rows(result.table)[-1]
    return b, witness


# -- complexity ---------------------------------------------------------------

@dataclass(frozen=True)
class ComplexityEstimate:
    target: str
    value: int | None
    witness: str | None
    phase: int | None  # phase of discovery; None for the print fallback
    source: str  # search | print-fallback | none


def complexity_table(mode: MachineMode, max_length: int, max_phase: int | None = None,
                     workers: int | None = None) -> dict[str, ComplexityEstimate]:
    """Shortest discovered program for every output seen."""
    best: dict[str, ComplexityEstimate] = {}
    for e in dovetail(mode, max_length, max_phase, workers):
        cur = best.get(e.output)
        if cur is None or len(e.program) < cur.value:
            best[e.output] = ComplexityEstimate(e.output, len(e.program), e.program, e.phase, "search")
    return best


def fallback_estimate(x: str, mode: MachineMode) -> ComplexityEstimate:
    try:
        p = print_program(mode.family, x, mode.kind)
    except ValueError:
        return ComplexityEstimate(x, None, None, None, "none")
    return ComplexityEstimate(x, len(p), p, None, "print-fallback")


def lookup_estimate(x: str, mode: MachineMode, table: dict[str, ComplexityEstimate]) -> ComplexityEstimate:
    found, fallback = table.get(x), fallback_estimate(x, mode)
    if found is None:
        return fallback
    if fallback.value is not None and fallback.value < found.value:
        return fallback
    return found


def complexity_upper(x: str, mode: MachineMode, max_length: int, max_phase: int | None = None,
                     workers: int | None = None) -> ComplexityEstimate:
    check_bits(x)
    return lookup_estimate(x, mode, complexity_table(mode, max_length, max_phase, workers))


def verify_estimate(est: ComplexityEstimate, mode: MachineMode, budget: int = 1 << 20) -> bool:
    if est.witness is None:
        return est.value is None
    run = mode.run(est.witness, min(budget, mode.budget(est.witness, budget)))
    return run.halted and run.output == est.target and len(est.witness) == est.value


def print_overhead(family: str, kind: str, max_n: int = 8) -> int:
    """Largest ``|print program| - |x|`` over all ``|x| <= max_n``."""
    return max(len(print_program(family, x, kind)) - len(x) for x in all_strings(max_n))


# -- census -------------------------------------------------------------------

@dataclass
class Census:
    n: int
    c: int
    omega_prime: list[int]  # halting programs of each length 0..n
    omega_n: int
    incompressible: int  # strings of length n with estimated complexity >= n - c
    bound: int
    exact: bool

    @property
    def holds(self) -> bool:
        return self.incompressible >= self.bound


def incompressibility_bound(n: int, c: int) -> int:
    """2^n - (number of programs shorter than n - c); 2^n when n <= c."""
    return (1 << n) - ((1 << max(n - c, 0)) - 1)


@dataclass
class CensusData:
    """Shared snapshot: prefix halting table and plain complexity table."""

    mode: MachineMode
    table: HaltingTable
    plain: dict[str, ComplexityEstimate]
    plain_mode: MachineMode

    @classmethod
    def collect(cls, mode: MachineMode, n: int, workers: int | None = None) -> CensusData:
        prefix_mode = replace(mode, kind="prefix")
        plain_mode = replace(mode, kind="plain")
        return cls(prefix_mode, halting_table(prefix_mode, n, workers=workers),
                   complexity_table(plain_mode, n, workers=workers), plain_mode)

    def census(self, n: int, c: int) -> Census:
        if n > self.table.n:
            raise DomainError(f"snapshot covers n <= {self.table.n}")
        counts = [sum(self.table.halts(p) for p in strings_of_length(k)) for k in range(n + 1)]
        threshold = n - c
        incompressible = sum(lookup_estimate(x, self.plain_mode, self.plain).value >= threshold
                             for x in strings_of_length(n))
        return Census(n, c, counts, sum(counts), incompressible, incompressibility_bound(n, c), self.mode.budgeted)


def census(mode: MachineMode, n: int, c: int, workers: int | None = None) -> Census:
    return CensusData.collect(mode, n, workers).census(n, c)


# -- invariance ---------------------------------------------------------------

@dataclass
class GapReport:
    family_a: str
    family_b: str
    rows: list[tuple[str, int, int]]  # (x, estimate under A, estimate under B)

    @property
    def gap(self) -> int:
        return max((abs(a - b) for _, a, b in self.rows), default=0)


def invariance_gap(family_a: str, family_b: str, strings: Iterable[str], kind: str = "plain",
                   max_length: int = 10, max_phase: int | None = None, budgeted: bool = True,
                   workers: int | None = None) -> GapReport:
    modes = [MachineMode(f, kind, budgeted) for f in (family_a, family_b)]
    tables = [complexity_table(m, max_length, max_phase, workers) for m in modes]
    rows = [(x, lookup_estimate(x, modes[0], tables[0]).value, lookup_estimate(x, modes[1], tables[1]).value)
            for x in strings]
    return GapReport(family_a, family_b, rows)


@dataclass
class LiftReport:
    prefix: str
    checked: int
    mismatches: list[str]

    @property
    def shift(self) -> int:
        return len(self.prefix)


def lifting_check(host: str, guest: str, kind: str = "prefix", max_length: int = 8) -> LiftReport:
    """Run every halting guest program through the host's simulator prefix
    and compare status, output and step count."""
    r = lift_prefix(host, guest)
    mismatches, checked = [], 0
    for q in all_strings(max_length):
        budget = 1 << len(q)
        a = run_family(guest, q, budget=budget, kind=kind)
        if not a.halted:
            continue
        checked += 1
        b = run_family(host, r + q, budget=budget, kind=kind)
        if (b.status, b.output, b.steps) != (a.status, a.output, a.steps):
            mismatches.append(q)
    return LiftReport(r, checked, mismatches)


# -- seeded self-delimiting machines -----------------------------------------

def random_selfdelim_machine(rng: np.random.Generator, n_states: int = 3, density: float = 0.8) -> Machine:
    """Random three-tape machine; each (state, symbol) pair gets a rule with
    probability ``density``.  State 0 always has a rule on blank."""
    rules = []
    for q in range(n_states):
        for s in ("B", "0", "1"):
            if (q, s) == (0, "B") or rng.random() < density:
                a = SELFDELIM_ACTIONS[rng.integers(len(SELFDELIM_ACTIONS))]
                rules.append(Rule(f"q{q}", s, a, f"q{rng.integers(n_states)}"))
    return Machine(tuple(rules), SELFDELIM_ACTIONS)
