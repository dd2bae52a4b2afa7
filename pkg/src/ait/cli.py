"""Command-line entry point: ``ait <group> <command> [options]``.

Every command prints a report (json by default) and exits 0 on success, 1 on
invalid input or a failed check, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import coding, dovetail as dt
from .bits import DomainError, all_strings, parse_bits
from .codes import (SCHEMES, Code, DecodeError, classify, kraft_construct, kraft_sum, selfdelim_decode,
                    selfdelim_encode)
from .entropy import (dpi_probe, entropy, entropy_exact, expected_length, joint_conditional_mutual,
                      load_distribution, random_markov_triple, shannon_fano)
from .families import FAMILIES
from .golden import data_path, run_golden
from .machine import (EncodingError, MachineFormatError, UniversalFormatError, decode_machine, encode_machine,
                      encoding_by_index, index_of_encoding, index_of_machine, parse_machine,
                      parse_selfdelim_machine, run, selfdelim_run)
from .report import build_report, dumps, rows_csv, rows_jsonl, rows_table

USER_ERRORS = (DomainError, DecodeError, EncodingError, MachineFormatError, UniversalFormatError,
               dt.OmegaError, LookupError, OSError, json.JSONDecodeError, ValueError, ZeroDivisionError)


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    """A command ran but its verdict is negative (golden mismatches)."""

    def __init__(self, result, rows=None):
        super().__init__("check failed")
        self.result, self.rows = result, rows


def _bits(text: str) -> str:
    try:
        return parse_bits(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _lengths(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()] if text.strip() else []
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def _natural(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def _read(path: str) -> str:
    """File contents; '-' is stdin, and bare names of bundled data files work from anywhere."""
    if path == "-":
        return sys.stdin.read()
    p = Path(path)
    if not p.exists() and p.name == path and data_path(path).exists():
        p = data_path(path)
    return p.read_text()


def _mode(args, kind: str | None = None) -> dt.MachineMode:
    machine = None
    family = args.family
    if getattr(args, "machine", None):
        machine, family = parse_selfdelim_machine(_read(args.machine)), "sd"
    return dt.MachineMode(family, kind or getattr(args, "kind", "prefix"), args.mode == "budgeted",
                          getattr(args, "aux", ""), machine)


EXAMPLE_TABLES = {"E1": "A:10,B:10,C:11,D:0", "E2": "A:10,B:110,C:1,D:0",
                  "E3": "A:0,B:01,C:011,D:111", "E4": "A:0,B:10,C:110,D:111"}


def _code_from(args) -> Code:
    text = _read(args.code) if args.code else args.table
    if text is None:
        raise UsageError("give --code FILE or --table A:0,B:10")
    text = EXAMPLE_TABLES.get(text.strip(), text).strip()
    if not text.startswith("{") and any(":" not in item for item in text.split(",") if item.strip()):
        raise UsageError(f"--table wants symbol:codeword pairs or one of {', '.join(EXAMPLE_TABLES)}")
    if text.startswith("{"):
        return Code.from_mapping(json.loads(text))
    pairs = [item.split(":", 1) for item in text.split(",") if item.strip()]
    return Code.from_mapping({k.strip(): parse_bits(v.strip()) for k, v in pairs})


# -- command handlers: each returns (result, rows or None) -------------------

def cmd_codes_classify(args):
    code = _code_from(args)
    res = classify(code)
    return {"class": res.klass.value, "witness": res.witness,
            "parses": [list(p) for p in res.parses] if res.parses else None,
            "kraft_sum": kraft_sum(len(w) for w in code.codewords)[0]}, None


def cmd_codes_kraft(args):
    total, ok = kraft_sum(args.lengths)
    return {"lengths": args.lengths, "sum": total, "satisfiable": ok}, None


def cmd_codes_construct(args):
    words = kraft_construct(args.lengths)
    return {"codewords": words}, [{"length": l, "codeword": w} for l, w in zip(args.lengths, words)]


def cmd_codes_encode(args):
    out = selfdelim_encode(args.x, args.scheme)
    return {"scheme": args.scheme, "x": args.x, "encoded": out, "length": len(out)}, None


def cmd_codes_decode(args):
    if args.schemes:
        schemes, parts, pos = args.schemes.split(","), [], 0
        for scheme in schemes:
            x, used = selfdelim_decode(args.stream, scheme, pos)
            parts.append(x)
            pos += used
        return {"schemes": schemes, "parts": parts, "consumed": pos, "rest": args.stream[pos:]}, None
    x, used = selfdelim_decode(args.stream, args.scheme)
    return {"scheme": args.scheme, "x": x, "consumed": used, "rest": args.stream[used:]}, None


def cmd_entropy_compute(args):
    if args.joint:
        rep = joint_conditional_mutual(np.array(json.loads(_read(args.joint)), dtype=float))
        return {"joint": rep}, None
    d = load_distribution(_read(args.dist))
    result = {"outcomes": list(d.outcomes), "entropy": entropy(d)}
    try:
        result["entropy_exact"] = str(entropy_exact(d))
    except DomainError:
        result["entropy_exact"] = None
    return result, None


def cmd_entropy_sf_code(args):
    d = load_distribution(_read(args.dist))
    code = shannon_fano(d)
    rows = [{"outcome": a, "probability": str(p), "codeword": code.table[a], "length": len(code.table[a])}
            for a, p in zip(d.outcomes, d.probabilities)]
    el = expected_length(d, code)
    return {"code": code.table, "expected_length": str(el) if d.exact else el, "entropy": entropy(d)}, rows


def cmd_entropy_dpi(args):
    rng = np.random.default_rng(args.seed)
    worst = float("inf")
    failures = 0
    for _ in range(args.trials):
        i_xy, i_xz, ok = dpi_probe(random_markov_triple(rng))
        worst = min(worst, i_xy - i_xz)
        failures += not ok
    return {"trials": args.trials, "failures": failures, "min_margin": worst}, None


def _load_machine(args):
    text = _read(args.machine)
    return parse_selfdelim_machine(text) if args.selfdelim else parse_machine(text)


def cmd_machine_run(args):
    if args.selfdelim:
        r = selfdelim_run(_load_machine(args), args.program, args.aux, args.budget)
        return r, None
    outcome = run(_load_machine(args), args.input, args.budget)
    return {"status": outcome.status, **outcome.__dict__}, None


def cmd_machine_encode(args):
    m = parse_machine(_read(args.machine))
    bits = encode_machine(m)
    return {"encoding": bits, "length": len(bits), "index": index_of_machine(m)}, None


def cmd_machine_index(args):
    if args.encoding is not None:
        return {"encoding": args.encoding, "index": index_of_encoding(args.encoding),
                "machine": decode_machine(args.encoding).to_text()}, None
    bits = encoding_by_index(args.i)
    return {"index": args.i, "encoding": bits, "machine": decode_machine(bits).to_text()}, None


def cmd_machine_enumerate(args):
    rows = []
    for i in range(args.start, args.start + args.count):
        bits = encoding_by_index(i)
        rows.append({"index": i, "length": len(bits), "encoding": bits,
                     "rules": decode_machine(bits).to_text().strip().replace("\n", "; ")})
    return {"machines": rows}, rows


def cmd_omega_compute(args):
    mode = _mode(args, "prefix")
    res = dt.omega_lower(mode, args.max_len, args.max_phase, args.workers)
    label = "exact" if res.exact else "lower-bound"
    return {"mode": mode.describe(), "max_len": args.max_len, "omega": res.S, "label": label,
            "prefix": res.S.fraction_bits(args.max_len),
            "trajectory": [{"phase": k, "S": s} for k, s in res.trajectory],
            "halting_programs": res.table.halting()}, [{"phase": k, "S": s} for k, s in res.trajectory]


def cmd_omega_halting(args):
    mode = _mode(args, "prefix")
    res = dt.omega_to_halting(args.prefix, args.n, mode, args.max_len, args.max_phase, args.workers)
    rows = [{"program": p, "status": e.status, "steps": e.steps, "output": e.output}
            for p, e in res.table.entries.items()]
    return {"stop_phase": res.stop_phase, "S_at_stop": res.S_at_stop, "S_final": res.S_final,
            "inconsistent": res.inconsistent, "witness": res.witness, "chi": res.table.chi(),
            "table": rows}, rows


def cmd_chi_table(args):
    mode = _mode(args, "prefix")
    table = dt.halting_table(mode, args.n, args.max_phase, args.workers)
    rows = [{"program": p, "status": e.status, "steps": e.steps, "output": e.output}
            for p, e in table.entries.items()]
    return {"n": args.n, "chi": table.chi(), "bits": len(table.chi()), "table": rows}, rows


def cmd_complexity_estimate(args):
    mode = _mode(args)
    est = dt.complexity_upper(args.target, mode, args.max_len, args.max_phase, args.workers)
    result = {"estimate": est, "label": "upper-bound", "verified": dt.verify_estimate(est, mode)}
    if mode.family != "sd":
        try:
            result["print_overhead"] = dt.print_overhead(mode.family, mode.kind, max(len(args.target), 1))
        except ValueError:
            pass
    return result, None


def cmd_complexity_gap(args):
    strings = list(all_strings(args.strings_len))
    rep = dt.invariance_gap(args.family_a, args.family_b, strings, args.kind, args.max_len, args.max_phase,
                            args.mode == "budgeted", args.workers)
    rows = [{"x": x, "a": a, "b": b, "diff": a - b} for x, a, b in rep.rows]
    result = {"family_a": rep.family_a, "family_b": rep.family_b, "gap": rep.gap, "rows": rows}
    try:
        lift = dt.lifting_check(args.family_b, args.family_a, args.kind, min(args.max_len, 10))
        result["lifting"] = {"prefix": lift.prefix, "shift": lift.shift, "checked": lift.checked,
                             "mismatches": lift.mismatches}
    except ValueError:
        result["lifting"] = None
    return result, rows


def cmd_busy_beaver(args):
    mode = _mode(args, "prefix")
    table = dt.busy_beaver(mode, args.n, args.max_phase, args.workers)
    rows = [{"n": k, "B": b, "witness": w} for k, b, w in table.values]
    result = {"label": "exact" if table.exact else "lower-bound", "values": rows}
    if args.from_omega:
        prefix = dt.omega_prefix(mode, args.n, workers=args.workers)
        b, w = dt.bb_from_omega(prefix, args.n, mode, workers=args.workers)
        result["from_omega"] = {"prefix": prefix, "B": b, "witness": w, "agrees": b == table.B(args.n)}
    return result, rows


def cmd_census(args):
    mode = _mode(args, "prefix")
    data = dt.CensusData.collect(mode, args.n, args.workers)
    pairs = ([(n, c) for n in range(args.n + 1) for c in range(args.c + 1)] if args.grid
             else [(args.n, args.c)])
    rows = []
    for n, c in pairs:
        cs = data.census(n, c)
        rows.append({"n": n, "c": c, "omega_prime_n": cs.omega_prime[-1], "omega_n": cs.omega_n,
                     "incompressible": cs.incompressible, "bound": cs.bound, "holds": cs.holds})
    last = data.census(args.n, args.c)
    result = {"census": last, "rows": rows, "label": "exact" if mode.budgeted else "bounds",
              "all_hold": all(r["holds"] for r in rows)}
    return result, rows


def _events(args):
    if args.events:
        return coding.read_events(_read(args.events).splitlines())
    mode = _mode(args, "prefix")
    return [(e.program, e.output) for e in dt.dovetail(mode, args.max_len, args.max_phase, args.workers)]


def cmd_coding_allocate(args):
    st = coding.allocate_stream(_events(args))
    rows = [coding.quadruple_record(q) for q in st.log]
    return {"quadruples": rows, "code": st.code, "mass": st.tree.mass,
            "lengths": coding.code_length_report([(q.p, q.x) for q in st.log])}, rows


def cmd_coding_decode(args):
    return {"address": args.addr, "x": coding.decode_address(args.addr, _events(args))}, None


def cmd_coding_from_semimeasure(args):
    res = coding.semimeasure_to_programs(coding.read_increments(_read(args.file)))
    rows = [{"x": x, "program": p} for x in res.programs for p in res.programs[x]]
    return {"programs": res.programs, "mass": res.mass,
            "intervals": {x: [[lo, hi] for lo, hi in v] for x, v in res.intervals.items()}}, rows


def cmd_coding_domination(args):
    events = _events(args)
    rows = coding.domination_probe(args.prefix, events)
    return {"prefix": args.prefix, "rows": rows,
            "holds": all(r.holds(len(args.prefix)) for r in rows)}, None


def cmd_golden(args):
    results = run_golden(args.fixture)
    rows = [{"id": r.id, "passed": r.passed, "detail": r.detail} for r in results]
    summary = {"cases": len(rows), "passed": sum(r.passed for r in results),
               "failed": sum(not r.passed for r in results), "results": rows}
    if summary["failed"]:
        raise CheckFailed(summary, rows)
    return summary, rows


# -- parser -------------------------------------------------------------------

def _machine_opts(p, kind=False, aux=False):
    p.add_argument("--family", choices=FAMILIES, default="ref-1", help="reference machine family")
    p.add_argument("--machine", help="self-delimiting machine file (overrides --family)")
    p.add_argument("--mode", choices=("budgeted", "unbounded"), default="budgeted",
                   help="budgeted: programs past 2^|p| steps diverge")
    p.add_argument("--max-phase", type=_positive, default=None, help="last dovetail phase")
    if kind:
        p.add_argument("--kind", choices=("plain", "prefix"), default="prefix")
    if aux:
        p.add_argument("--aux", type=_bits, default="", help="auxiliary string on the work tape")


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "jsonl", "csv", "table"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=_positive, default=None,
                        help=f"worker processes (default from ${dt.WORKERS_ENV} or 1)")
    common.add_argument("--config", help="JSON file of option defaults; flags override")

    parser = argparse.ArgumentParser(prog="ait", description="Executable algorithmic information theory.")
    groups = parser.add_subparsers(dest="group", metavar="COMMAND", required=True)
    leaves: dict[str, argparse.ArgumentParser] = {}

    def leaf(sub, name, handler, help):
        p = sub.add_parser(name, parents=[common], help=help, description=help)
        p.set_defaults(handler=handler)
        leaves[handler.__name__] = p
        return p

    def group(name, help):
        g = groups.add_parser(name, help=help, description=help)
        return g.add_subparsers(dest="command", metavar="SUBCOMMAND", required=True)

    g = group("codes", "code tables, Kraft sums, self-delimiting codecs")
    p = leaf(g, "classify", cmd_codes_classify, "classify a code table")
    p.add_argument("--code", help="JSON file {symbol: codeword}")
    p.add_argument("--table", help="inline table, e.g. A:0,B:10,C:110,D:111")
    p = leaf(g, "kraft", cmd_codes_kraft, "exact Kraft sum of codeword lengths")
    p.add_argument("--lengths", type=_lengths, required=True)
    p = leaf(g, "construct", cmd_codes_construct, "prefix code with the given lengths")
    p.add_argument("--lengths", type=_lengths, required=True)
    p = leaf(g, "encode", cmd_codes_encode, "self-delimiting encoding of a string")
    p.add_argument("x", type=_bits, help="bits; 'e' for the empty string")
    p.add_argument("--scheme", choices=SCHEMES, default="E1-bar")
    p = leaf(g, "decode", cmd_codes_decode, "decode a self-delimiting codeword")
    p.add_argument("stream", type=_bits)
    p.add_argument("--scheme", choices=SCHEMES, default="E1-bar")
    p.add_argument("--schemes", help="comma-separated schemes to decode in sequence")

    g = group("entropy", "entropy, Shannon-Fano codes, data processing")
    p = leaf(g, "compute", cmd_entropy_compute, "entropy of a distribution or joint table")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--dist", help="JSON {outcome: p} / list, or CSV")
    src.add_argument("--joint", help="JSON matrix of joint probabilities")
    p = leaf(g, "sf-code", cmd_entropy_sf_code, "Shannon-Fano code of a distribution")
    p.add_argument("--dist", required=True)
    p = leaf(g, "dpi", cmd_entropy_dpi, "data-processing probe over random Markov chains")
    p.add_argument("--trials", type=_positive, default=1000)

    g = group("machine", "Turing machines, encodings, enumeration")
    p = leaf(g, "run", cmd_machine_run, "run a machine file")
    p.add_argument("--machine", required=True, help="rule file, one 'q s a q2' per line")
    p.add_argument("--input", type=_bits, default="")
    p.add_argument("--selfdelim", action="store_true", help="three-tape self-delimiting machine")
    p.add_argument("--program", type=_bits, default="")
    p.add_argument("--aux", type=_bits, default="")
    p.add_argument("--budget", type=_positive, default=10_000)
    p = leaf(g, "encode", cmd_machine_encode, "bit encoding and index of a machine")
    p.add_argument("--machine", required=True)
    p = leaf(g, "index", cmd_machine_index, "index of an encoding, or encoding of an index")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--encoding", type=_bits)
    src.add_argument("--i", type=_positive)
    p = leaf(g, "enumerate", cmd_machine_enumerate, "list consecutive machines")
    p.add_argument("--count", type=_positive, default=10)
    p.add_argument("--start", type=_positive, default=1)

    g = group("omega", "halting probability")
    p = leaf(g, "compute", cmd_omega_compute, "dovetailed lower bound (exact when budgeted)")
    p.add_argument("--max-len", type=_natural, required=True)
    _machine_opts(p)
    p = leaf(g, "halting", cmd_omega_halting, "halting table from leading bits of omega")
    p.add_argument("--prefix", type=_bits, required=True)
    p.add_argument("--n", type=_natural, required=True)
    p.add_argument("--max-len", type=_natural, default=None)
    _machine_opts(p)

    g = group("chi", "halting sequence")
    p = leaf(g, "table", cmd_chi_table, "halting table of every program up to length n")
    p.add_argument("--n", type=_natural, required=True)
    _machine_opts(p)

    g = group("complexity", "complexity upper bounds")
    p = leaf(g, "estimate", cmd_complexity_estimate, "shortest discovered program for a target")
    p.add_argument("--target", type=_bits, required=True)
    p.add_argument("--max-len", type=_natural, default=12)
    _machine_opts(p, kind=True, aux=True)
    p = leaf(g, "gap", cmd_complexity_gap, "estimate differences between two families")
    p.add_argument("--family-a", choices=FAMILIES, default="ref-1")
    p.add_argument("--family-b", choices=FAMILIES, default="ref-u")
    p.add_argument("--strings-len", type=_natural, default=6, help="compare every string up to this length")
    p.add_argument("--max-len", type=_natural, default=10)
    p.add_argument("--kind", choices=("plain", "prefix"), default="plain")
    p.add_argument("--mode", choices=("budgeted", "unbounded"), default="budgeted")
    p.add_argument("--max-phase", type=_positive, default=None)

    p = leaf(groups, "busy-beaver", cmd_busy_beaver, "longest halting run time per program length")
    p.add_argument("--n", type=_natural, required=True)
    p.add_argument("--from-omega", action="store_true", help="also recover B(n) from the omega prefix")
    _machine_opts(p)

    p = leaf(groups, "census", cmd_census, "halting counts and incompressible strings")
    p.add_argument("--n", type=_natural, required=True)
    p.add_argument("--c", type=_natural, default=0)
    p.add_argument("--grid", action="store_true", help="every n' <= n and c' <= c")
    _machine_opts(p)

    g = group("coding", "coding-theorem allocator and semimeasures")
    for name, handler, help in (("allocate", cmd_coding_allocate, "allocate codewords for a halting-event stream"),
                                ("decode", cmd_coding_decode, "string allocated to a node"),
                                ("domination", cmd_coding_domination, "lifted-mass identity check")):
        p = leaf(g, name, handler, help)
        p.add_argument("--events", help="JSON lines {\"p\": bits, \"x\": bits}; default: dovetail run")
        p.add_argument("--max-len", type=_natural, default=10)
        _machine_opts(p)
        if name == "decode":
            p.add_argument("--addr", type=_bits, required=True)
        if name == "domination":
            p.add_argument("--prefix", type=_bits, default="")
    p = leaf(g, "from-semimeasure", cmd_coding_from_semimeasure, "programs for a dyadic semimeasure")
    p.add_argument("file", help="JSON list or lines of {\"x\": bits, \"delta\": \"0.01\" | \"1/4\"}")

    p = leaf(groups, "golden", cmd_golden, "run the worked-example regression suite")
    p.add_argument("--fixture", help="alternative fixture file")
    return parser, leaves


def _emit(args, result, rows) -> str:
    if args.format == "json":
        config = {k: v for k, v in vars(args).items() if k not in ("handler", "config")}
        config["workers"] = None  # results never depend on it
        return dumps(build_report(f"{args.group} {getattr(args, 'command', '') or ''}".strip(), config, result))
    if rows is None:
        raise UsageError(f"--format {args.format} needs a tabular result; use json")
    return {"jsonl": rows_jsonl, "csv": rows_csv, "table": rows_table}[args.format](rows)


def _config_path(argv: list[str]) -> str | None:
    for k, a in enumerate(argv):
        if a == "--config" and k + 1 < len(argv):
            return argv[k + 1]
        if a.startswith("--config="):
            return a.split("=", 1)[1]
    return None


def _apply_config(leaves: dict, defaults: dict) -> None:
    """Config values become defaults; a required flag so supplied is optional."""
    defaults = {k.replace("-", "_"): v for k, v in defaults.items()}
    for p in leaves.values():
        for action in p._actions:
            if action.dest in defaults:
                value = defaults[action.dest]
                if isinstance(value, str) and action.type is not None:
                    value = action.type(value)
                action.default, action.required = value, False


def main(argv: list[str] | None = None) -> int:
    parser, leaves = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    config = _config_path(argv)
    if config:
        try:
            _apply_config(leaves, json.loads(Path(config).read_text()))
        except (OSError, json.JSONDecodeError, argparse.ArgumentTypeError, ValueError) as exc:
            print(f"ait: bad config: {exc}", file=sys.stderr)
            return 1
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.workers is None:
        args.workers = dt.default_workers()
    try:
        result, rows = args.handler(args)
        status = 0
    except CheckFailed as exc:
        result, rows, status = exc.result, exc.rows, 1
    except UsageError as exc:
        print(f"ait: {exc}", file=sys.stderr)
        return 2
    except USER_ERRORS as exc:
        print(f"ait: error: {exc}", file=sys.stderr)
        return 1
    try:
        sys.stdout.write(_emit(args, result, rows))
    except UsageError as exc:
        print(f"ait: {exc}", file=sys.stderr)
        return 2
    return status


if __name__ == "__main__":
    sys.exit(main())
