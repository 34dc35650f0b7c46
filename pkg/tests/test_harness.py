import hashlib
import json
import statistics

import pytest

from eigenmark.errors import ConfigurationError, ParseError
from eigenmark.harness import (
    CSV_COLUMNS,
    ExperimentConfig,
    RunRecord,
    derive_seed,
    entail_command,
    histogram_render,
    iter_sweep,
    records_from_csv,
    records_from_json,
    records_to_csv,
    records_to_json,
    run_scenario,
    run_simulation,
    sweep,
)
from eigenmark.oracle import AnswerSet
from eigenmark.schemes import SchemeId

KB = "A=>B; B=>C"


def small_config(**kw):
    base = dict(schemes=["simpler"], n=2, shots=256, repeats=2, base_seed=5)
    base.update(kw)
    return ExperimentConfig(**base)


class TestSeeds:
    def test_documented_formula(self):
        digest = hashlib.sha256(b"simpler:2:7:3").digest()[:8]
        assert derive_seed(11, "simpler", 2, 7, 3) == (11 + int.from_bytes(digest, "big")) % 2**63

    def test_distinct_per_triple(self):
        seeds = {derive_seed(0, s, 2, sid, r) for s in ("subtle", "simpler")
                 for sid in range(16) for r in range(40)}
        assert len(seeds) == 2 * 16 * 40

    def test_partial_rerun_matches_sweep(self):
        records = list(iter_sweep(small_config(repeats=3)))
        again = run_scenario("simpler", 2, 9, [2], 256, 5)[0]
        match = [r for r in records if r.scenario_id == 9 and r.repeat == 2][0]
        assert again == match


class TestConfig:
    @pytest.mark.parametrize("kw", [dict(shots=0), dict(repeats=0), dict(n=0), dict(n=5),
                                    dict(schemes=[]), dict(workers=0), dict(scenarios=[16])])
    def test_rejects(self, kw):
        with pytest.raises(ConfigurationError):
            small_config(**kw)

    def test_defaults(self):
        cfg = ExperimentConfig()
        assert (cfg.shots, cfg.repeats, cfg.n) == (1024, 40, 2)
        assert cfg.scenario_ids() == list(range(16))
        assert cfg.schemes == [SchemeId.CONVENTIONAL, SchemeId.SUBTLE, SchemeId.SIMPLER]


class TestSweep:
    def test_record_completeness(self):
        records = list(iter_sweep(small_config(repeats=40, shots=64)))
        assert len(records) == 640
        keys = [(r.scenario_id, r.repeat) for r in records]
        assert keys == sorted(set(keys))
        assert all(sum(r.histogram.values()) == 64 for r in records)

    def test_no_answer_filter_gives_m0_only(self):
        records, report = sweep(small_config(scenarios=[0]))
        m = report.schemes["simpler"]
        assert m.d is None and m.global_w is None and m.local_w is None
        assert [row[0] for row in m.rows] == ["M", "M"]

    def test_byte_identical_reruns(self):
        cfg = small_config(repeats=1)
        assert records_to_csv(iter_sweep(cfg)) == records_to_csv(iter_sweep(cfg))

    def test_workers_do_not_change_output(self):
        one = records_to_csv(iter_sweep(small_config(schemes=["subtle", "simpler"])))
        two = records_to_csv(iter_sweep(small_config(schemes=["subtle", "simpler"], workers=2)))
        assert one == two

    def test_seed_changes_output(self):
        a = records_to_csv(iter_sweep(small_config()))
        b = records_to_csv(iter_sweep(small_config(base_seed=6)))
        assert a != b


class TestFiles:
    def test_csv_columns(self):
        text = records_to_csv(iter_sweep(small_config(scenarios=[3], repeats=1)))
        header, first = text.splitlines()[:2]
        assert header.split(",") == CSV_COLUMNS
        assert first.startswith("simpler,2,3,00 01,0,")

    def test_csv_round_trip(self):
        records = list(iter_sweep(small_config()))
        assert records_from_csv(records_to_csv(records)) == records

    def test_json_round_trip(self):
        cfg = small_config()
        records, report = sweep(cfg)
        text = records_to_json(records, cfg, report)
        assert records_from_json(text) == records
        assert json.loads(text)["config"]["repeats"] == 2

    def test_csv_missing_column(self):
        with pytest.raises(ConfigurationError):
            records_from_csv("scheme,n\nsimpler,2\n")


class TestRender:
    def test_single_record(self):
        rec = RunRecord("simpler", 2, 8, 0, 1, {"0111": 400, "1110": 380})
        lines = histogram_render([rec]).splitlines()
        assert "1 winner(s) [11]" in lines[0]
        assert lines[2].split() == ["0111", "400", "400", "400"]

    def test_absent_states_omitted(self):
        recs = [RunRecord("simpler", 2, 1, r, r, {"0100": 10 + r, "1100": 5}) for r in range(3)]
        text = histogram_render(recs)
        assert "0000" not in text
        assert text.splitlines()[2].split() == ["0100", "12", "11", "10"]

    def test_missing_in_some_repeats_counts_zero(self):
        recs = [RunRecord("simpler", 2, 1, 0, 0, {"0100": 4}),
                RunRecord("simpler", 2, 1, 1, 1, {"0100": 6, "1100": 2})]
        row = [line for line in histogram_render(recs).splitlines() if line.startswith("1100")][0]
        assert row.split() == ["1100", "2", "1", "0"]

    def test_mixed_scenarios_rejected(self):
        recs = [RunRecord("simpler", 2, 1, 0, 0, {"0100": 4}),
                RunRecord("simpler", 2, 2, 0, 0, {"0101": 4})]
        with pytest.raises(ConfigurationError):
            histogram_render(recs)

    @pytest.mark.parametrize("answer", ["00", "01", "10", "11"])
    def test_one_winner_target_has_top_median(self, answer):
        a = AnswerSet.from_bitstrings(2, [answer])
        recs = run_simulation("simpler", 2, a, shots=1024, seed=3, repeats=40)
        labels = {lab for r in recs for lab in r.histogram}
        med = {lab: statistics.median(r.histogram.get(lab, 0) for r in recs) for lab in labels}
        target = "01" + answer
        # the target ties exactly with other states; allow sampling noise on the medians
        assert med[target] >= max(med.values()) - 12


class TestEntail:
    def test_beta1_entailed(self):
        v = entail_command(KB, "A=>C")
        assert v.entailed and v.violations == []

    def test_beta2_four_rows(self):
        v = entail_command(KB, "A=>!C", variables=list("ABCDE"))
        assert not v.entailed and len(v.violations) == 4
        assert all(a["A"] and a["B"] and a["C"] for a in v.violations)

    def test_beta2_own_variables(self):
        v = entail_command(KB, "A=>!C")
        assert v.violations == [dict(A=True, B=True, C=True)]

    def test_probe_beta3_sees_y_zero(self):
        v = entail_command(KB, "D=>E", method="probe", shots=1024, seed=1)
        assert not v.entailed
        assert any(k.startswith("0") for k in v.evidence["histogram"])
        assert all(a["D"] and not a["E"] for a in v.violations)

    def test_probe_beta1_no_violation(self):
        v = entail_command(KB, "A=>C", method="probe", shots=1024, seed=1)
        assert v.entailed
        assert all(k.startswith("1") for k in v.evidence["histogram"])

    @pytest.mark.parametrize("scheme", ["conventional", "subtle", "simpler"])
    def test_search_beta2_finds_violation(self, scheme):
        v = entail_command(KB, "A=>!C", method="search", scheme=scheme, shots=2048, seed=2)
        assert not v.entailed
        assert v.violations == [dict(A=True, B=True, C=True)]

    def test_search_beta1_no_confirmed_candidate(self):
        v = entail_command(KB, "A=>C", method="search", shots=1024, seed=2)
        assert v.entailed
        assert all(c.endswith("(not a violation)") for c in v.evidence["candidates"].values())

    def test_search_rejects_grover(self):
        with pytest.raises(ConfigurationError):
            entail_command(KB, "A=>C", method="search", scheme="grover")

    def test_unknown_method(self):
        with pytest.raises(ConfigurationError):
            entail_command(KB, "A=>C", method="oracle")

    def test_parse_error_position(self):
        with pytest.raises(ParseError) as info:
            entail_command("A => (B", "A")
        assert info.value.position == 7

    def test_text_output(self):
        text = entail_command(KB, "A=>!C").to_text()
        assert text.splitlines()[0].startswith("classical: NOT entailed")
        assert "violation: A=T B=T C=T" in text
