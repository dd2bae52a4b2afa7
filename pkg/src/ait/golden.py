"""Regression suite over the published worked examples.

Cases live in ``data/golden.json``: each names a check, its input and the
expected value.  A check recomputes the value from the input, so editing
either side of a case makes that case fail.
"""
from __future__ import annotations

import contextlib
import io
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .bits import Dyadic, PrefixTree, leading_one_position, number_to_string, string_to_number
from .codes import Code, classify, kraft_construct, kraft_sum, parses
from .coding import allocate_stream, code_length_report, decode_address, quadruple_record
from .dovetail import CensusData, MachineMode
from .entropy import Distribution, entropy_exact, expected_length, shannon_fano, shannon_fano_lengths
from .machine.selfdelim import parse_selfdelim_machine, selfdelim_run


def data_path(name: str) -> Path:
    return Path(str(resources.files("ait") / "data" / name))


def _dist(probs) -> Distribution:
    return Distribution.of(probs)


def _classify(inp):
    code = Code.from_mapping(inp["code"])
    res = classify(code)
    out = {"class": res.klass.value}
    if res.witness is not None:
        # a witness counts only if both parses really encode to it
        out["witness_valid"] = res.parses[0] != res.parses[1] and all(
            code.encode(p) == res.witness for p in res.parses)
    return out


def _cli(inp):
    from .cli import main
    argv = [a.replace("$DATA/", str(data_path("")) + "/") for a in inp["argv"]]
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        status = main(argv)
    return {"exit": status, "result": json.loads(buf.getvalue())["result"]}


def _stabilized(inp):
    log = allocate_stream(inp["events"]).log
    return all(q.a is None for q in log[inp["after"]:] if q.x == inp["x"])


def _census_c0(inp):
    data = CensusData.collect(MachineMode(), inp["n_max"])
    return all(data.census(n, 0).incompressible >= 1 for n in range(inp["n_max"] + 1))


def _first_available(inp):
    tree = PrefixTree()
    for a in inp["allocated"]:
        tree.allocate(a)
    return tree.first_available(inp["depth"])


def _code_length(inp):
    row = next(r for r in code_length_report(inp["events"]) if r.x == inp["x"])
    return {"depth": row.depth, "ceil_neglog": row.ceil_neglog, "gap": row.gap}


def _selfdelim(inp):
    r = selfdelim_run(parse_selfdelim_machine(inp["machine"]), inp["program"])
    return {"status": r.status, "success": r.success}


CHECKS = {
    "string_to_number": lambda i: string_to_number(i["x"]),
    "number_to_string": lambda i: number_to_string(i["n"]),
    "leading_one_position": lambda i: leading_one_position(Dyadic.from_binary(i["alpha"])),
    "first_available": _first_available,
    "classify": _classify,
    "parses": lambda i: sorted(list(p) for p in parses(Code.from_mapping(i["code"]), i["stream"])),
    "kraft_sum": lambda i: dict(zip(("sum", "satisfiable"), (lambda s: (s[0].to_binary(), s[1]))(kraft_sum(i["lengths"])))),
    "kraft_construct": lambda i: kraft_construct(i["lengths"]),
    "entropy": lambda i: str(entropy_exact(_dist(i["probabilities"]))),
    "shannon_fano": lambda i: {"lengths": shannon_fano_lengths(_dist(i["probabilities"])),
                               "expected_length": str(expected_length(_dist(i["probabilities"]),
                                                                      shannon_fano(_dist(i["probabilities"]))))},
    "selfdelim_run": _selfdelim,
    "census_c0": _census_c0,
    "allocate": lambda i: [quadruple_record(q) for q in allocate_stream(i["events"]).log],
    "decode_address": lambda i: decode_address(i["address"], i["events"]),
    "code_length": _code_length,
    "stabilized": _stabilized,
    "cli": _cli,
}


def _matches(actual, expected) -> bool:
    """Equality, except that an expected dict only constrains its own keys."""
    if isinstance(expected, dict) and isinstance(actual, dict):
        return all(k in actual and _matches(actual[k], v) for k, v in expected.items())
    return actual == expected


@dataclass(frozen=True)
class CaseResult:
    id: str
    passed: bool
    detail: str


def run_golden(fixture: str | Path | None = None) -> list[CaseResult]:
    path = Path(fixture) if fixture else data_path("golden.json")
    cases = json.loads(path.read_text())["cases"]
    out = []
    for case in cases:
        try:
            actual = CHECKS[case["check"]](case["input"])
            ok = _matches(actual, case["expected"])
            detail = "" if ok else f"expected {case['expected']!r}, got {actual!r}"
        except Exception as exc:  # a crashing case is a failing case
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CaseResult(case["id"], ok, detail))
    return out
