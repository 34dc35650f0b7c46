"""Command line interface.

Every option falls back to an environment variable ``QEM_<OPTION>`` (for
example ``QEM_SHOTS``, ``QEM_SEED``, ``QEM_SCHEME``) before its built-in
default. Exit status: 0 success, 2 parse or configuration error, 3 runtime
error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import logic
from .errors import ConfigurationError, EigenmarkError, ParseError
from .harness import (
    ExperimentConfig,
    entail_command,
    histogram_render,
    iter_sweep,
    records_for_scenario,
    records_from_csv,
    records_from_json,
    records_to_csv,
    records_to_json,
    run_simulation,
)
from .metrics import build_report
from .oracle import AnswerSet, compile_formula, dump_circuit, entailment_probe_circuit, violation_oracle
from .schemes import EIGENMARKING, SchemeId, run_scheme
from .statevector import RNG_ALGORITHM

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


def _env(name, default):
    return os.environ.get(f"QEM_{name.upper()}", default)


def _env_int(name, default):
    value = _env(name, default)
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"QEM_{name.upper()}={value!r} is not an integer") from None


def _text_arg(value: str | None) -> str | None:
    """``@path`` reads the file; anything else is literal text."""
    if value and value.startswith("@"):
        return Path(value[1:]).read_text()
    return value


def _split(value: str | None) -> list[str]:
    if not value:
        return []
    return [v.strip() for v in value.split(",") if v.strip()]


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _add_common(p, *names):
    if "scheme" in names:
        p.add_argument("--scheme", default=None, help="grover, conventional, subtle or simpler")
    if "n" in names:
        p.add_argument("--n", type=int, default=None, help="input qubits")
    if "shots" in names:
        p.add_argument("--shots", type=int, default=None, help="shots per run (default 1024)")
    if "repeats" in names:
        p.add_argument("--repeats", type=int, default=None)
    if "seed" in names:
        p.add_argument("--seed", type=int, default=None, help="base seed (default 0)")
    if "kb" in names:
        p.add_argument("--kb", default=None, help="sentences separated by ';' (or @file)")
    if "query" in names:
        p.add_argument("--query", default=None, help="formula (or @file)")
    if "vars" in names:
        p.add_argument("--vars", default=None, help="comma-separated variable order/universe")
    p.add_argument("--format", choices=["csv", "json", "text"], default=None)
    p.add_argument("--out", default=None, help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eigenmark", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run every answer subset for one or more schemes")
    _add_common(p, "scheme", "n", "shots", "repeats", "seed")
    p.add_argument("--scenarios", default=None, help="comma-separated scenario ids (answer bitmasks)")
    p.add_argument("--answers", default=None,
                   help="restrict to one answer set, comma-separated bitstrings ('' for none)")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--report", default=None, help="also write the metrics report (JSON) here")

    p = sub.add_parser("simulate", help="one scheme, one answer set")
    _add_common(p, "scheme", "n", "shots", "repeats", "seed")
    p.add_argument("--answers", default="", help="comma-separated bitstrings")
    p.add_argument("--exact", action="store_true", help="print exact probabilities instead of sampling")

    p = sub.add_parser("entail", help="check whether a knowledge base entails a query")
    _add_common(p, "scheme", "shots", "seed", "kb", "query", "vars")
    p.add_argument("--method", choices=["classical", "probe", "search"], default=None)

    p = sub.add_parser("truthtable", help="truth table of a query (and knowledge base)")
    _add_common(p, "kb", "query", "vars")

    p = sub.add_parser("oracle", help="dump the compiled oracle circuit")
    _add_common(p, "kb", "query", "vars")
    p.add_argument("--probe", action="store_true", help="dump the direct model-checking circuit")

    p = sub.add_parser("metrics", help="recompute metrics from a sweep CSV or JSON file")
    p.add_argument("input", help="records file written by 'sweep'")
    p.add_argument("--format", choices=["csv", "json", "text"], default=None)
    p.add_argument("--out", default=None)
    return parser


def _fmt(args, default):
    return args.format or _env("format", default)


def _schemes(args, default: str) -> list[SchemeId]:
    return [SchemeId.parse(s) for s in _split(args.scheme or _env("scheme", default))]


def _cmd_sweep(args):
    n = args.n if args.n is not None else _env_int("n", 2)
    scenarios = None
    if args.scenarios:
        scenarios = [int(s) for s in _split(args.scenarios)]
    if args.answers is not None:
        scenarios = [AnswerSet.from_bitstrings(n, _split(args.answers)).mask]
    cfg = ExperimentConfig(
        schemes=_schemes(args, ",".join(s.value for s in EIGENMARKING)),
        n=n,
        shots=args.shots if args.shots is not None else _env_int("shots", 1024),
        repeats=args.repeats if args.repeats is not None else _env_int("repeats", 40),
        base_seed=args.seed if args.seed is not None else _env_int("seed", 0),
        scenarios=scenarios,
        workers=args.workers if args.workers is not None else _env_int("workers", 1),
    )
    records = list(iter_sweep(cfg))
    report = build_report(r.to_result() for r in records)
    fmt = _fmt(args, "csv")
    if fmt == "csv":
        text = records_to_csv(records)
    elif fmt == "json":
        text = records_to_json(records, cfg, report)
    else:
        parts = [report.to_text()]
        for s in cfg.schemes:
            for sid in cfg.scenario_ids():
                parts.append(histogram_render(records_for_scenario(records, s, sid)))
        text = "\n".join(parts)
    _emit(text, args.out or _env("out", None))
    if args.report:
        Path(args.report).write_text(report.to_json() + "\n")


def _cmd_simulate(args):
    scheme = _schemes(args, "simpler")[0]
    n = args.n if args.n is not None else _env_int("n", 2)
    answers = AnswerSet.from_bitstrings(n, _split(args.answers))
    fmt = _fmt(args, "text")
    if args.exact:
        run = run_scheme(scheme, n, answers)
        probs = run.label_probabilities()
        if fmt == "json":
            text = json.dumps({"scheme": scheme.value, "n": n, "answers": answers.bitstrings(),
                               "probabilities": probs}, indent=1) + "\n"
        else:
            sep = "," if fmt == "csv" else " "
            lines = ["bitstring,probability"] if fmt == "csv" else []
            lines += [f"{k}{sep}{v:.12g}" for k, v in sorted(probs.items())]
            text = "\n".join(lines) + "\n"
        _emit(text, args.out)
        return
    records = run_simulation(
        scheme, n, answers,
        shots=args.shots if args.shots is not None else _env_int("shots", 1024),
        seed=args.seed if args.seed is not None else _env_int("seed", 0),
        repeats=args.repeats if args.repeats is not None else _env_int("repeats", 1),
    )
    if fmt == "csv":
        text = records_to_csv(records)
    elif fmt == "json":
        text = records_to_json(records)
    else:
        text = histogram_render(records)
    _emit(text, args.out)


def _require(value, flag):
    if not value:
        raise ConfigurationError(f"{flag} is required")
    return value


def _cmd_entail(args):
    kb = _require(_text_arg(args.kb or _env("kb", None)), "--kb")
    query = _require(_text_arg(args.query or _env("query", None)), "--query")
    verdict = entail_command(
        kb, query,
        method=args.method or _env("method", "classical"),
        scheme=args.scheme or _env("scheme", None),
        shots=args.shots if args.shots is not None else _env_int("shots", 1024),
        seed=args.seed if args.seed is not None else _env_int("seed", 0),
        variables=_split(args.vars) or None,
    )
    fmt = _fmt(args, "text")
    text = json.dumps(verdict.as_dict(), indent=1) + "\n" if fmt == "json" else verdict.to_text()
    _emit(text, args.out)


def _cmd_truthtable(args):
    query = logic.parse(_require(_text_arg(args.query), "--query"))
    columns = {"query": query}
    kb = None
    if args.kb:
        kb = logic.parse_kb(_text_arg(args.kb))
        columns = {"kb": kb.formula(), "query": query,
                   "!kb|query": logic.Or(logic.Not(kb.formula()), query)}
    universe = _split(args.vars) or logic.free_variables(*(x for x in (kb, query) if x is not None))
    tables = {name: logic.truth_table(f, universe) for name, f in columns.items()}
    fmt = _fmt(args, "text")
    if fmt == "json":
        text = json.dumps({"variables": universe,
                           "columns": {k: v.astype(int).tolist() for k, v in tables.items()}},
                          indent=1) + "\n"
    else:
        sep = "," if fmt == "csv" else " "
        tf = (lambda b: str(int(b))) if fmt == "csv" else (lambda b: "T" if b else "F")
        rows = [sep.join(universe + list(tables))]
        for i in range(1 << len(universe)):
            bits = [tf((i >> k) & 1) for k in range(len(universe))]
            rows.append(sep.join(bits + [tf(t[i]) for t in tables.values()]))
        text = "\n".join(rows) + "\n"
    _emit(text, args.out)


def _cmd_oracle(args):
    query = logic.parse(_require(_text_arg(args.query), "--query"))
    variables = _split(args.vars) or None
    if args.kb:
        kb = logic.parse_kb(_text_arg(args.kb))
        if args.probe:
            circuit = entailment_probe_circuit(kb, query, variables)
        else:
            circuit = violation_oracle(kb, query, variables).circuit
    else:
        if args.probe:
            raise ConfigurationError("--probe needs --kb")
        circuit = compile_formula(query, variables).circuit
    _emit(dump_circuit(circuit), args.out)


def _cmd_metrics(args):
    text = Path(args.input).read_text()
    if text.lstrip().startswith(("{", "[")):
        records = records_from_json(text)
    else:
        records = records_from_csv(text)
    report = build_report(r.to_result() for r in records)
    fmt = _fmt(args, "json")
    out = {"json": lambda: report.to_json() + "\n", "csv": report.to_csv, "text": report.to_text}[fmt]()
    _emit(out, args.out)


COMMANDS = {
    "sweep": _cmd_sweep, "simulate": _cmd_simulate, "entail": _cmd_entail,
    "truthtable": _cmd_truthtable, "oracle": _cmd_oracle, "metrics": _cmd_metrics,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger(__name__).debug("rng %s", RNG_ALGORITHM)
    try:
        COMMANDS[args.command](args)
    except (ParseError, ConfigurationError) as exc:
        print(f"eigenmark: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EigenmarkError, OSError, ValueError) as exc:
        print(f"eigenmark: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
