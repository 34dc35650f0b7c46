"""Winning margin, marking factor and distinguishability from shot histograms.

Every metric works on a count vector indexed by scheme-register basis index;
zero-count states therefore take part in max/min comparisons. Passing exact
probabilities instead of counts gives the noise-free value of each metric.

State classes per scheme:

* target tag: conventional ``t1t0 = 01``; subtle ``t = 0``; simpler
  ``ty = 01``; grover has no tag, every ``y = 1`` state counts.
* answer state: target-tagged, input x in the answer set, and ``y = 1``.
* no-answer representative: conventional ``t1t0 = 10``; subtle ``t = 1``;
  simpler ``t y x_msq = 111``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import statistics
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import MetricError
from .oracle import AnswerSet
from .schemes import SchemeId, scheme_layout

LARGE = "Large"


class MarginUndefined(MetricError):
    """W has no value for this scenario (no answers, or nothing to compare against)."""


@dataclass(eq=False)
class StateClasses:
    x: np.ndarray
    y: np.ndarray
    target: np.ndarray
    representative: np.ndarray
    labels: tuple[str, ...]
    lookup: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.lookup = {lab: i for i, lab in enumerate(self.labels)}

    def index_of(self, label: str) -> int:
        return self.lookup[label]

    def answer_mask(self, answers: AnswerSet) -> np.ndarray:
        hit = np.isin(self.x, sorted(answers.answers))
        return self.target & hit & (self.y == 1)


@lru_cache(maxsize=None)
def state_classes(scheme: SchemeId | str, n: int) -> StateClasses:
    scheme = SchemeId.parse(scheme)
    layout = scheme_layout(scheme, n)
    idx = np.arange(1 << layout.num_qubits)

    def bit(role):
        return (idx >> layout[role]) & 1

    xv = np.zeros_like(idx)
    for k in range(n):
        xv |= bit(f"x{k}") << k
    y = bit("y")
    if scheme is SchemeId.GROVER:
        target = y == 1
        rep = np.zeros_like(target)
    elif scheme is SchemeId.CONVENTIONAL:
        target = (bit("t1") == 0) & (bit("t0") == 1)
        rep = (bit("t1") == 1) & (bit("t0") == 0)
    elif scheme is SchemeId.SUBTLE:
        target = bit("t") == 0
        rep = bit("t") == 1
    else:
        target = (bit("t") == 0) & (y == 1)
        rep = (bit("t") == 1) & (y == 1) & (bit(f"x{n - 1}") == 1)
    labels = tuple(layout.label(i) for i in idx)
    return StateClasses(xv, y, target, rep, labels)


def histogram_to_counts(scheme, n: int, histogram: Mapping[str, int]) -> np.ndarray:
    classes = state_classes(scheme, n)
    counts = np.zeros(len(classes.labels), dtype=np.int64)
    for label, c in histogram.items():
        try:
            counts[classes.index_of(label)] += int(c)
        except KeyError:
            raise MetricError(f"label {label!r} is not a {SchemeId.parse(scheme).value} "
                              f"state for n={n}") from None
    return counts


@dataclass
class ScenarioResult:
    scheme: SchemeId
    answers: AnswerSet
    repeat_index: int
    histogram: dict[str, int]
    seed: int | None = None

    def __post_init__(self):
        self.scheme = SchemeId.parse(self.scheme)

    @property
    def n(self) -> int:
        return self.answers.n

    @property
    def scenario_id(self) -> int:
        return self.answers.mask

    def counts(self) -> np.ndarray:
        return histogram_to_counts(self.scheme, self.n, self.histogram)


def expected_counts(probs, shots: int = 1, atol: float = 1e-12) -> np.ndarray:
    """Noise-free counts ``shots * p``; probabilities below ``atol`` become exact zeros."""
    p = np.asarray(probs, dtype=np.float64)
    return np.where(p < atol, 0.0, p) * shots


# ------------------------------------------------------------------------ core metrics

def margin_from_counts(scheme, answers: AnswerSet, counts, mode: str = "global") -> float:
    """(min answer count - max comparison count) / max comparison count."""
    if mode not in ("global", "local"):
        raise ValueError(f"mode must be 'global' or 'local', got {mode!r}")
    if not answers.answers:
        raise MarginUndefined("no answers: winning margin undefined")
    classes = state_classes(scheme, answers.n)
    counts = np.asarray(counts, dtype=np.float64)
    a_mask = classes.answer_mask(answers)
    b_mask = ~a_mask
    if mode == "local":
        b_mask &= classes.target
    if not b_mask.any():
        raise MarginUndefined(f"{mode} comparison set is empty")
    min_a = counts[a_mask].min()
    max_b = counts[b_mask].max()
    if max_b == 0:
        return math.inf
    return float((min_a - max_b) / max_b)


def marking_from_counts(scheme, n: int, counts) -> float:
    classes = state_classes(scheme, n)
    if not classes.representative.any():
        raise MetricError(f"{SchemeId.parse(scheme).value} has no no-answer representatives")
    counts = np.asarray(counts, dtype=np.float64)
    c_t = counts[classes.target].max()
    c_n = counts[classes.representative].max()
    return marking_factor_value(c_t, c_n)


def marking_factor_value(c_t: float, c_n: float) -> float:
    if c_t + c_n <= 0:
        raise MetricError("degenerate histogram: target and representative counts are all zero")
    return float((c_t - c_n) / (c_t + c_n))


def winning_margin(result: ScenarioResult, mode: str = "global") -> float:
    """Relative winning margin; ``math.inf`` stands for the "Large" entries."""
    return margin_from_counts(result.scheme, result.answers, result.counts(), mode)


def marking_factor(result: ScenarioResult) -> float:
    return marking_from_counts(result.scheme, result.n, result.counts())


def distinguishability_from_pools(m_by_size: Mapping[int, Iterable[float]]) -> float:
    pools = {i: list(v) for i, v in m_by_size.items() if len(list(v))}
    if not pools.get(0):
        raise MetricError("distinguishability needs a no-answer scenario")
    some = [v for i, vals in pools.items() if i > 0 for v in vals]
    if not some:
        raise MetricError("distinguishability needs a scenario with at least one answer")
    return float(min(some) - max(pools[0]))


def distinguishability(results: Iterable[ScenarioResult]) -> float:
    """min over i>0 of min(M_i) minus max(M_0), pooling scenarios by answer count."""
    pools: dict[int, list[float]] = defaultdict(list)
    schemes = set()
    for r in results:
        schemes.add(r.scheme)
        pools[len(r.answers)].append(marking_factor(r))
    if len(schemes) > 1:
        raise MetricError("distinguishability mixes schemes")
    return distinguishability_from_pools(pools)


# --------------------------------------------------------------------------- aggregation

@dataclass(frozen=True)
class Stats:
    """[min, mean, max](std) over margins; infinities are counted apart."""

    min: float
    mean: float
    max: float
    std: float
    count: int
    infinite: int = 0

    def as_dict(self) -> dict:
        return {"min": _fmt(self.min), "mean": _fmt(self.mean), "max": _fmt(self.max),
                "std": _fmt(self.std), "count": self.count, "infinite": self.infinite}

    @classmethod
    def from_dict(cls, d: Mapping) -> "Stats":
        return cls(_unfmt(d["min"]), _unfmt(d["mean"]), _unfmt(d["max"]), _unfmt(d["std"]),
                   int(d["count"]), int(d.get("infinite", 0)))

    def __str__(self):
        def f(v):
            return LARGE if math.isinf(v) else f"{v:.2f}"
        return f"[{f(self.min)}, {f(self.mean)}, {f(self.max)}]({f(self.std)})"


def aggregate(values: Sequence[float]) -> Stats:
    """Summarize margins; std is the sample standard deviation.

    Infinite values make max and std "Large"; the mean covers finite values
    only, unless there are none, in which case every entry is "Large".
    """
    values = list(values)
    if not values:
        raise MetricError("cannot aggregate an empty list of margins")
    finite = [v for v in values if not math.isinf(v)]
    n_inf = len(values) - len(finite)
    if not finite:
        return Stats(math.inf, math.inf, math.inf, math.inf, len(values), n_inf)
    std = statistics.stdev(finite) if len(finite) > 1 else 0.0
    if n_inf:
        return Stats(min(finite), statistics.fmean(finite), math.inf, math.inf, len(values), n_inf)
    return Stats(min(finite), statistics.fmean(finite), max(finite), std, len(values), 0)


def _fmt(v: float):
    return LARGE if isinstance(v, float) and math.isinf(v) else v


def _unfmt(v) -> float:
    return math.inf if v == LARGE else float(v)


# ------------------------------------------------------------------------------ reports

@dataclass
class SchemeMetrics:
    scheme: SchemeId
    global_w: Stats | None
    local_w: Stats | None
    d: float | None
    rows: list[tuple[str, str, int, int, float]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "scheme": self.scheme.value,
            "global_W": self.global_w.as_dict() if self.global_w else None,
            "local_W": self.local_w.as_dict() if self.local_w else None,
            "D": self.d,
            "notes": list(self.notes),
        }


@dataclass
class MetricsReport:
    schemes: dict[str, SchemeMetrics]
    header: str = ("W stats pool every (scenario, repeat) pair with a defined margin; "
                   "infinite margins are reported as Large.")

    def as_dict(self) -> dict:
        return {"header": self.header,
                "rows": [m.as_dict() for m in self.schemes.values()]}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["scheme", "metric", "mode", "scenario_id", "repeat", "value"])
        for m in self.schemes.values():
            for row in m.rows:
                w.writerow([m.scheme.value, row[0], row[1], row[2], row[3], _fmt(row[4])])
            if m.d is not None:
                w.writerow([m.scheme.value, "D", "", "", "", m.d])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [self.header, f"{'scheme':<14}{'global W':<34}{'local W':<34}D"]
        for m in self.schemes.values():
            g = str(m.global_w) if m.global_w else "n/a"
            loc = str(m.local_w) if m.local_w else "n/a"
            d = f"{m.d:.3f}" if m.d is not None else "n/a"
            lines.append(f"{m.scheme.value:<14}{g:<34}{loc:<34}{d}")
        return "\n".join(lines) + "\n"


def scheme_metrics(results: Sequence[ScenarioResult]) -> SchemeMetrics:
    if not results:
        raise MetricError("no results to summarize")
    scheme = results[0].scheme
    margins = {"global": [], "local": []}
    rows = []
    excluded = defaultdict(int)
    pools: dict[int, list[float]] = defaultdict(list)
    has_rep = state_classes(scheme, results[0].n).representative.any()
    for r in results:
        if r.scheme is not scheme:
            raise MetricError("scheme_metrics got results from several schemes")
        counts = r.counts()
        for mode in ("global", "local"):
            try:
                w = margin_from_counts(scheme, r.answers, counts, mode)
            except MarginUndefined:
                excluded[mode] += 1
                continue
            margins[mode].append(w)
            rows.append(("W", mode, r.scenario_id, r.repeat_index, w))
        if has_rep:
            try:
                m = marking_from_counts(scheme, r.n, counts)
            except MetricError:
                excluded["M"] += 1
                continue
            pools[len(r.answers)].append(m)
            rows.append(("M", "", r.scenario_id, r.repeat_index, m))
    notes = [f"{k} excluded for {v} run(s) where it is undefined" for k, v in sorted(excluded.items())]
    try:
        d = distinguishability_from_pools(pools) if has_rep else None
    except MetricError as exc:
        d = None
        notes.append(f"D not computed: {exc}")
    return SchemeMetrics(
        scheme,
        aggregate(margins["global"]) if margins["global"] else None,
        aggregate(margins["local"]) if margins["local"] else None,
        d, rows, notes,
    )


def build_report(results: Iterable[ScenarioResult]) -> MetricsReport:
    by_scheme: dict[SchemeId, list[ScenarioResult]] = defaultdict(list)
    for r in results:
        by_scheme[r.scheme].append(r)
    ordered = sorted(by_scheme, key=lambda s: list(SchemeId).index(s))
    return MetricsReport({s.value: scheme_metrics(by_scheme[s]) for s in ordered})
