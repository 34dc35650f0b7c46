"""Experiment orchestration: scenario sweeps, entailment checks, output files.

Per-run seeds are ``(base_seed + H) mod 2**63`` where ``H`` is the first eight
bytes (big endian) of ``sha256("<scheme>:<n>:<scenario_id>:<repeat>")``. A
single scenario can therefore be re-run alone and reproduce the histogram it
had inside a full sweep.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from . import logic
from .errors import ConfigurationError, EigenmarkError
from .metrics import MetricsReport, ScenarioResult, build_report, marking_from_counts, state_classes
from .oracle import AnswerSet, CompiledPhaseOracle, entailment_probe_circuit, violation_oracle
from .schemes import EIGENMARKING, SchemeId, measure_run, run_scheme
from .statevector import RNG_ALGORITHM, apply_circuit, marginal_probabilities, new_ground_state, sample_counts

log = logging.getLogger(__name__)

CSV_COLUMNS = ["scheme", "n", "scenario_id", "answers", "repeat", "seed", "bitstring", "count"]
SEED_MODULUS = 1 << 63


def derive_seed(base_seed: int, scheme: SchemeId | str, n: int, scenario_id: int, repeat: int) -> int:
    key = f"{SchemeId.parse(scheme).value}:{n}:{scenario_id}:{repeat}".encode()
    digest = int.from_bytes(hashlib.sha256(key).digest()[:8], "big")
    return (int(base_seed) + digest) % SEED_MODULUS


@dataclass
class ExperimentConfig:
    schemes: list[SchemeId] = field(default_factory=lambda: list(EIGENMARKING))
    n: int = 2
    shots: int = 1024
    repeats: int = 40
    base_seed: int = 0
    scenarios: list[int] | None = None
    workers: int = 1

    def __post_init__(self):
        self.schemes = [SchemeId.parse(s) for s in self.schemes]
        if not self.schemes:
            raise ConfigurationError("at least one scheme is required")
        if self.n < 1:
            raise ConfigurationError("n must be at least 1")
        if self.n > 4:
            raise ConfigurationError("sweeps enumerate every answer subset; n above 4 is not supported")
        if self.shots < 1:
            raise ConfigurationError("shots must be at least 1")
        if self.repeats < 1:
            raise ConfigurationError("repeats must be at least 1")
        if self.workers < 1:
            raise ConfigurationError("workers must be at least 1")
        total = 1 << (1 << self.n)
        if self.scenarios is not None:
            bad = [s for s in self.scenarios if not 0 <= s < total]
            if bad:
                raise ConfigurationError(f"scenario ids {bad} out of range 0..{total - 1}")
            self.scenarios = sorted(set(self.scenarios))

    def scenario_ids(self) -> list[int]:
        if self.scenarios is not None:
            return list(self.scenarios)
        return list(range(1 << (1 << self.n)))

    def as_dict(self) -> dict:
        return {"schemes": [s.value for s in self.schemes], "n": self.n, "shots": self.shots,
                "repeats": self.repeats, "base_seed": self.base_seed,
                "scenarios": self.scenarios, "rng": RNG_ALGORITHM}


@dataclass
class RunRecord:
    scheme: SchemeId
    n: int
    scenario_id: int
    repeat: int
    seed: int
    histogram: dict[str, int]

    def __post_init__(self):
        self.scheme = SchemeId.parse(self.scheme)

    @property
    def answers(self) -> AnswerSet:
        return AnswerSet.from_mask(self.n, self.scenario_id)

    @property
    def shots(self) -> int:
        return sum(self.histogram.values())

    @property
    def key(self):
        return (list(SchemeId).index(self.scheme), self.scenario_id, self.repeat)

    def to_result(self) -> ScenarioResult:
        return ScenarioResult(self.scheme, self.answers, self.repeat, self.histogram, self.seed)

    def as_dict(self) -> dict:
        return {"scheme": self.scheme.value, "n": self.n, "scenario_id": self.scenario_id,
                "answers": self.answers.bitstrings(), "repeat": self.repeat, "seed": self.seed,
                "histogram": dict(sorted(self.histogram.items()))}

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(d["scheme"], int(d["n"]), int(d["scenario_id"]), int(d["repeat"]),
                   int(d["seed"]), {k: int(v) for k, v in d["histogram"].items()})


def run_scenario(scheme: SchemeId | str, n: int, scenario_id: int, repeats: Sequence[int],
                 shots: int, base_seed: int) -> list[RunRecord]:
    """Simulate one scenario once and sample it for each repeat."""
    scheme = SchemeId.parse(scheme)
    run = run_scheme(scheme, n, AnswerSet.from_mask(n, scenario_id))
    out = []
    for r in repeats:
        seed = derive_seed(base_seed, scheme, n, scenario_id, r)
        out.append(RunRecord(scheme, n, scenario_id, r, seed, measure_run(run, shots, seed)))
    return out


def _scenario_task(args):
    return run_scenario(*args)


def iter_sweep(config: ExperimentConfig) -> Iterator[RunRecord]:
    """Yield records in canonical (scheme, scenario_id, repeat) order."""
    tasks = [(s, config.n, sid, range(config.repeats), config.shots, config.base_seed)
             for s in config.schemes for sid in config.scenario_ids()]
    if config.workers == 1:
        for t in tasks:
            yield from _scenario_task(t)
        return
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        for batch in pool.map(_scenario_task, tasks):
            yield from batch


def sweep(config: ExperimentConfig) -> tuple[list[RunRecord], MetricsReport]:
    records = list(iter_sweep(config))
    log.info("sweep produced %d records", len(records))
    return records, build_report(r.to_result() for r in records)


# -------------------------------------------------------------------------------- files

def records_to_csv(records: Iterable[RunRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in records:
        answers = " ".join(rec.answers.bitstrings())
        for label in sorted(rec.histogram):
            w.writerow([rec.scheme.value, rec.n, rec.scenario_id, answers, rec.repeat,
                        rec.seed, label, rec.histogram[label]])
    return buf.getvalue()


def records_from_csv(text: str) -> list[RunRecord]:
    reader = csv.DictReader(io.StringIO(text))
    missing = set(CSV_COLUMNS) - set(reader.fieldnames or ())
    if missing:
        raise ConfigurationError(f"CSV lacks columns {sorted(missing)}")
    grouped: dict[tuple, RunRecord] = {}
    for row in reader:
        key = (row["scheme"], int(row["n"]), int(row["scenario_id"]), int(row["repeat"]))
        rec = grouped.get(key)
        if rec is None:
            rec = grouped[key] = RunRecord(row["scheme"], key[1], key[2], key[3], int(row["seed"]), {})
        rec.histogram[row["bitstring"]] = int(row["count"])
    return sorted(grouped.values(), key=lambda r: r.key)


def records_to_json(records: Iterable[RunRecord], config: ExperimentConfig | None = None,
                    report: MetricsReport | None = None) -> str:
    doc = {"records": [r.as_dict() for r in records]}
    if config is not None:
        doc["config"] = config.as_dict()
    if report is not None:
        doc["metrics"] = report.as_dict()
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def records_from_json(text: str) -> list[RunRecord]:
    doc = json.loads(text)
    items = doc["records"] if isinstance(doc, dict) else doc
    return [RunRecord.from_dict(d) for d in items]


# ---------------------------------------------------------------------------- rendering

def histogram_render(records: Sequence[RunRecord]) -> str:
    """Per-state max/median/min counts across repeats of one scenario.

    States never observed in any repeat are omitted; the others count as zero
    in repeats where they did not occur.
    """
    if not records:
        raise ConfigurationError("no records to render")
    first = records[0]
    if any((r.scheme, r.n, r.scenario_id) != (first.scheme, first.n, first.scenario_id)
           for r in records):
        raise ConfigurationError("histogram_render needs records from a single scenario")
    labels = sorted({lab for r in records for lab in r.histogram})
    winners = len(first.answers)
    answers = ",".join(first.answers.bitstrings()) or "none"
    lines = [f"{first.scheme.value} n={first.n} scenario {first.scenario_id}: "
             f"{winners} winner(s) [{answers}], {len(records)} repeat(s)",
             f"{'state':<10}{'max':>8}{'median':>9}{'min':>8}"]
    for lab in labels:
        vals = [r.histogram.get(lab, 0) for r in records]
        med = statistics.median(vals)
        med_s = f"{med:.1f}" if med != int(med) else str(int(med))
        lines.append(f"{lab:<10}{max(vals):>8}{med_s:>9}{min(vals):>8}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------- entailment

@dataclass
class EntailVerdict:
    method: str
    entailed: bool
    variables: list[str]
    violations: list[dict[str, bool]]
    evidence: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"method": self.method, "entailed": self.entailed, "variables": self.variables,
                "violations": [_assignment_text(v, self.variables) for v in self.violations],
                "evidence": self.evidence}

    def to_text(self) -> str:
        head = "entailed" if self.entailed else "NOT entailed"
        lines = [f"{self.method}: {head} (variables {', '.join(self.variables)})"]
        for v in self.violations:
            lines.append("  violation: " + _assignment_text(v, self.variables))
        for k, v in self.evidence.items():
            if isinstance(v, dict):
                lines.append(f"  {k}:")
                lines.extend(f"    {kk} {vv}" for kk, vv in v.items())
            else:
                lines.append(f"  {k}: {v}")
        return "\n".join(lines) + "\n"


def _assignment_text(a: dict[str, bool], variables: Sequence[str]) -> str:
    return " ".join(f"{v}={'T' if a[v] else 'F'}" for v in variables)


def entail_command(kb_text: str, query_text: str, method: str = "classical",
                   scheme: SchemeId | str | None = None, shots: int = 1024, seed: int = 0,
                   variables: Sequence[str] | None = None) -> EntailVerdict:
    kb = logic.parse_kb(kb_text)
    query = logic.parse(query_text)
    universe = list(variables) if variables else logic.free_variables(kb, query)
    missing = [v for v in logic.free_variables(kb, query) if v not in universe]
    if missing:
        raise ConfigurationError(f"variable list lacks {missing}")

    if method == "classical":
        res = logic.entails(kb, query, universe)
        return EntailVerdict("classical", res.entailed, universe, res.violations)

    if method == "probe":
        return _probe(kb, query, universe, shots, seed)

    if method == "search":
        return _search(kb, query, universe, SchemeId.parse(scheme or SchemeId.SIMPLER), shots, seed)

    raise ConfigurationError(f"unknown method {method!r}; choose classical, probe or search")


def _probe(kb, query, universe, shots, seed) -> EntailVerdict:
    circuit = entailment_probe_circuit(kb, query, universe)
    n = len(universe)
    state = apply_circuit(new_ground_state(circuit.num_qubits), circuit)
    # measured register: y then inputs, y as the leading digit
    probs = marginal_probabilities(state, list(range(n + 1)))
    counts = sample_counts(probs, shots, seed)
    hist = {}
    violations = []
    for i, c in enumerate(counts):
        if not c:
            continue
        xval, y = i & ((1 << n) - 1), i >> n
        label = str(y) + format(xval, f"0{n}b")
        hist[label] = int(c)
        if y == 0:
            violations.append(logic.assignment_from_index(xval, universe))
    evidence = {"qubits": circuit.num_qubits, "shots": shots, "seed": seed,
                "rng": RNG_ALGORITHM, "label": "y " + " ".join(reversed(universe)),
                "histogram": dict(sorted(hist.items()))}
    return EntailVerdict("probe", not violations, universe, violations, evidence)


def _search(kb, query, universe, scheme: SchemeId, shots, seed) -> EntailVerdict:
    if scheme is SchemeId.GROVER:
        raise ConfigurationError("search uses an Eigenmarking scheme (conventional, subtle, simpler)")
    compiled = violation_oracle(kb, query, universe)
    oracle = CompiledPhaseOracle(compiled, scheme.oracle_theta)
    n = compiled.n
    run = run_scheme(scheme, n, oracle)
    hist = measure_run(run, shots, seed)
    classes = state_classes(scheme, n)
    counts = [hist.get(lab, 0) for lab in classes.labels]
    m_factor = marking_from_counts(scheme, n, counts)

    # target-tagged y=1 states, most frequent first; each candidate is checked classically
    candidates = sorted(
        (i for i in range(len(counts)) if counts[i] and classes.target[i] and classes.y[i]),
        key=lambda i: (-counts[i], classes.labels[i]),
    )
    f = logic.And(kb.formula(), logic.Not(query))
    confirmed = []
    ranked = {}
    for i in candidates:
        a = logic.assignment_from_index(int(classes.x[i]), universe)
        ok = logic.evaluate(f, a)
        ranked[classes.labels[i]] = f"{counts[i]} ({'violation' if ok else 'not a violation'})"
        if ok and a not in confirmed:
            confirmed.append(a)
    rep = [counts[i] for i in range(len(counts)) if classes.representative[i]]
    tgt = [counts[i] for i in range(len(counts)) if classes.target[i]]
    evidence = {
        "scheme": scheme.value, "qubits": run.final_state.num_qubits,
        "work_qubits": compiled.work_count, "shots": shots, "seed": seed, "rng": RNG_ALGORITHM,
        "marking_factor": round(m_factor, 6),
        "representative_dominates": max(rep) > max(tgt),
        "candidates": ranked,
    }
    return EntailVerdict(f"search/{scheme.value}", not confirmed, universe, confirmed, evidence)


def run_simulation(scheme: SchemeId | str, n: int, answers: AnswerSet, shots: int, seed: int,
                   repeats: int = 1) -> list[RunRecord]:
    """One scheme, one answer set, ``repeats`` seeded samples (the ``simulate`` command)."""
    if repeats < 1:
        raise ConfigurationError("repeats must be at least 1")
    return run_scenario(scheme, n, answers.mask, range(repeats), shots, seed)


def records_for_scenario(records: Iterable[RunRecord], scheme, scenario_id: int) -> list[RunRecord]:
    scheme = SchemeId.parse(scheme)
    return [r for r in records if r.scheme is scheme and r.scenario_id == scenario_id]


__all__ = [
    "EigenmarkError", "ExperimentConfig", "RunRecord", "EntailVerdict", "derive_seed", "sweep",
    "iter_sweep", "run_scenario", "run_simulation", "records_to_csv", "records_from_csv",
    "records_to_json", "records_from_json", "histogram_render", "entail_command",
]
