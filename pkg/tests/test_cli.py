import json
import subprocess
import sys

import pytest

from eigenmark.cli import main
from eigenmark.harness import records_from_csv

KB = "A=>B; B=>C"


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


class TestSweep:
    def test_csv_to_file_and_report(self, tmp_path, capsys):
        out, rep = tmp_path / "s.csv", tmp_path / "r.json"
        code, _, _ = run(["sweep", "--scheme", "simpler", "--repeats", "2", "--shots", "128",
                          "--out", str(out), "--report", str(rep)], capsys)
        assert code == 0
        assert len(records_from_csv(out.read_text())) == 32
        assert json.loads(rep.read_text())["rows"][0]["scheme"] == "simpler"

    def test_answers_filter(self, capsys):
        code, out, _ = run(["sweep", "--scheme", "subtle", "--answers", "01", "--repeats", "1",
                            "--shots", "32"], capsys)
        assert code == 0
        assert {line.split(",")[2] for line in out.splitlines()[1:]} == {"2"}

    def test_text_format(self, capsys):
        code, out, _ = run(["sweep", "--scheme", "simpler", "--scenarios", "0,8", "--repeats", "2",
                            "--shots", "64", "--format", "text"], capsys)
        assert code == 0
        assert "winner(s)" in out and out.startswith("W stats")

    def test_env_override(self, capsys, monkeypatch):
        monkeypatch.setenv("QEM_SHOTS", "16")
        monkeypatch.setenv("QEM_SCHEME", "conventional")
        code, out, _ = run(["sweep", "--repeats", "1", "--scenarios", "1"], capsys)
        assert code == 0
        rows = out.splitlines()[1:]
        assert sum(int(r.split(",")[-1]) for r in rows) == 16
        assert rows[0].startswith("conventional,")

    def test_flag_beats_env(self, capsys, monkeypatch):
        monkeypatch.setenv("QEM_SHOTS", "16")
        _, out, _ = run(["sweep", "--scheme", "simpler", "--repeats", "1", "--scenarios", "1",
                         "--shots", "8"], capsys)
        assert sum(int(r.split(",")[-1]) for r in out.splitlines()[1:]) == 8

    def test_bad_env_value(self, capsys, monkeypatch):
        monkeypatch.setenv("QEM_SHOTS", "many")
        code, _, err = run(["sweep", "--scheme", "simpler"], capsys)
        assert code == 2 and "QEM_SHOTS" in err

    def test_bad_scheme(self, capsys):
        code, _, _ = run(["sweep", "--scheme", "quantum"], capsys)
        assert code == 2


class TestSimulate:
    def test_grover_histogram(self, capsys):
        code, out, _ = run(["simulate", "--scheme", "grover", "--answers", "10"], capsys)
        assert code == 0
        assert out.splitlines()[2].split() == ["101", "1024", "1024", "1024"]

    def test_exact_csv(self, capsys):
        code, out, _ = run(["simulate", "--answers", "11", "--exact", "--format", "csv"], capsys)
        probs = dict(line.split(",") for line in out.splitlines()[1:])
        assert code == 0
        assert float(probs["0111"]) == pytest.approx(25 / 64)

    def test_bad_answer_length(self, capsys):
        code, _, _ = run(["simulate", "--answers", "101"], capsys)
        assert code == 2


class TestEntail:
    def test_classical(self, capsys):
        code, out, _ = run(["entail", "--kb", KB, "--query", "A=>C"], capsys)
        assert code == 0 and out.startswith("classical: entailed")

    def test_vars_json(self, capsys):
        code, out, _ = run(["entail", "--kb", KB, "--query", "A=>!C", "--vars", "A,B,C,D,E",
                            "--format", "json"], capsys)
        doc = json.loads(out)
        assert code == 0 and len(doc["violations"]) == 4

    def test_kb_from_file(self, tmp_path, capsys):
        f = tmp_path / "kb.txt"
        f.write_text("# alpha\nA => B\nB => C\n")
        code, out, _ = run(["entail", "--kb", f"@{f}", "--query", "A=>C", "--method", "probe"], capsys)
        assert code == 0 and "probe: entailed" in out

    def test_parse_error_exit(self, capsys):
        code, _, err = run(["entail", "--kb", "A =>", "--query", "A"], capsys)
        assert code == 2 and "position 4" in err

    def test_missing_query(self, capsys):
        code, _, _ = run(["entail", "--kb", KB], capsys)
        assert code == 2

    def test_missing_file_is_runtime(self, capsys, tmp_path):
        code, _, _ = run(["entail", "--kb", f"@{tmp_path / 'nope'}", "--query", "A"], capsys)
        assert code == 3


class TestOtherCommands:
    def test_truthtable(self, capsys):
        code, out, _ = run(["truthtable", "--query", "A&B", "--format", "csv"], capsys)
        assert code == 0
        assert out.splitlines() == ["A,B,query", "0,0,0", "1,0,0", "0,1,0", "1,1,1"]

    def test_truthtable_with_kb(self, capsys):
        code, out, _ = run(["truthtable", "--kb", KB, "--query", "A=>C"], capsys)
        rows = out.splitlines()
        assert code == 0 and rows[0].split() == ["A", "B", "C", "kb", "query", "!kb|query"]
        assert all(r.split()[-1] == "T" for r in rows[1:])

    def test_oracle_dump(self, capsys):
        code, out, _ = run(["oracle", "--kb", KB, "--query", "A=>!C"], capsys)
        assert code == 0 and out.startswith("# qubits:")

    def test_probe_without_kb(self, capsys):
        code, _, _ = run(["oracle", "--query", "A", "--probe"], capsys)
        assert code == 2

    def test_metrics_recompute(self, tmp_path, capsys):
        path = tmp_path / "s.csv"
        run(["sweep", "--scheme", "simpler", "--repeats", "2", "--shots", "128", "--out", str(path)],
            capsys)
        code, out, _ = run(["metrics", str(path), "--format", "text"], capsys)
        assert code == 0 and "simpler" in out

    def test_metrics_bad_file(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("scheme,n\nsimpler,2\n")
        code, _, _ = run(["metrics", str(path)], capsys)
        assert code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "eigenmark", "entail", "--kb", KB, "--query", "A=>C"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("classical: entailed")
