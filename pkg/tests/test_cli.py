"""Command-line behavior: exit codes, output formats, determinism."""
import json

import jsonschema
import pytest

from qpakit import zoo
from qpakit.cli import CHECK_SCHEMA, RUN_SCHEMA, MATRIX_SCHEMA, main
from qpakit.io import load_qpa, save_dfa, save_qpa
from qpakit.model import DfaSpec


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    paths = {}
    for name, spec in zoo.fixture_specs().items():
        path = root / f"{name}.json"
        save_qpa(spec, path)
        paths[name] = str(path)
    garbage = root / "garbage.json"
    garbage.write_text("not json at all", encoding="utf-8")
    paths["garbage"] = str(garbage)
    dfa = DfaSpec(
        states=frozenset({"q0", "q1"}), sigma=frozenset({"0", "1"}),
        q0="q0", finals=frozenset({"q1"}),
        trans={("q0", "0"): "q0", ("q0", "1"): "q1",
               ("q1", "0"): "q0", ("q1", "1"): "q1"},
    )
    dfa_path = root / "dfa.json"
    save_dfa(dfa, dfa_path)
    paths["dfa"] = str(dfa_path)
    partial = root / "partial_dfa.json"
    partial.write_text(json.dumps({
        "states": ["s0"], "alphabet": ["0", "1"], "initial": "s0",
        "finals": [], "transitions": [{"from": "s0", "input": "0", "to": "s0"}],
    }), encoding="utf-8")
    paths["partial_dfa"] = str(partial)
    paths["root"] = str(root)
    return paths


class TestCheck:
    def test_well_formed_exits_zero(self, files, capsys):
        assert main(["check", files["l2"]]) == 0
        assert "well-formed" in capsys.readouterr().out

    def test_violations_exit_two(self, files, capsys):
        assert main(["check", files["nonunitary"]]) == 2
        out = capsys.readouterr().out
        assert "RVN" in out and "FAIL" in out

    def test_garbage_exits_three(self, files, capsys):
        assert main(["check", files["garbage"]]) == 3

    def test_json_output_validates(self, files, capsys):
        assert main(["check", files["l1"], "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        jsonschema.validate(doc, CHECK_SCHEMA)
        assert doc["passed"] is True

    def test_simplified_flag(self, files, capsys):
        assert main(["check", files["l2"], "--simplified", "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["suite"] == "simplified"


class TestRun:
    def test_accept_exits_zero(self, files, capsys):
        assert main(["run", files["l1"], "01"]) == 0
        assert "accepted" in capsys.readouterr().out

    def test_reject_exits_one(self, files, capsys):
        assert main(["run", files["l1"], "10"]) == 1

    def test_threshold_two_thirds(self, files, capsys):
        assert main(["run", files["l3"], "abc", "--threshold", "0.6"]) == 0
        out = capsys.readouterr().out
        assert "0.666666666667" in out

    def test_inconclusive_exits_two(self, files, capsys):
        assert main(["run", files["l3"], "ab", "--threshold", "0.9"]) == 2

    def test_illegal_word_exits_three(self, files, capsys):
        assert main(["run", files["l2"], "aXb"]) == 3

    def test_not_well_formed_without_force(self, files, capsys):
        assert main(["run", files["nonunitary"], "1"]) == 3

    def test_json_output_validates(self, files, capsys):
        assert main(["run", files["l5"], "ab", "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        jsonschema.validate(doc, RUN_SCHEMA)
        assert doc["p_accept"] == pytest.approx(4 / 7)

    def test_trace_lines(self, files, capsys):
        assert main(["run", files["l2"], "ab", "--trace"]) == 0
        out = capsys.readouterr().out
        assert "step 1" in out

    def test_trace_json_carries_superpositions(self, files, capsys):
        assert main(["run", files["l5"], "abc", "--trace", "--json"]) == 1
        doc = json.loads(capsys.readouterr().out)
        jsonschema.validate(doc, RUN_SCHEMA)
        first = doc["trace"][0]["superposition"]
        assert all(set(e) == {"state", "head", "stack", "re", "im"} for e in first)


class TestBatch:
    def test_rows_in_input_order(self, files, tmp_path, capsys):
        words = tmp_path / "words.txt"
        words.write_text("ab\nabc\naab\n", encoding="utf-8")
        out_csv = tmp_path / "out.csv"
        assert main(["batch", files["l5"], str(words), "--csv-out", str(out_csv)]) == 0
        lines = out_csv.read_text(encoding="utf-8").strip().splitlines()
        assert lines[0] == "word,p_accept,p_reject,p_nonhalt,steps,halted,decision"
        rows = [line.split(",") for line in lines[1:]]
        assert [r[0] for r in rows] == ["ab", "abc", "aab"]
        assert float(rows[0][1]) == pytest.approx(4 / 7)
        assert float(rows[1][1]) == pytest.approx(3 / 7)
        assert float(rows[2][1]) == pytest.approx(3 / 7)

    def test_exhaustive_words_all_halt(self, files, tmp_path, capsys):
        from conftest import words_up_to
        words = tmp_path / "all6.txt"
        words.write_text("".join(w + "\n" for w in words_up_to("ab", 6)), encoding="utf-8")
        out_csv = tmp_path / "all6.csv"
        assert main(["batch", files["l2"], str(words), "--csv-out", str(out_csv)]) == 0
        lines = out_csv.read_text(encoding="utf-8").strip().splitlines()
        assert len(lines) == 1 + 127
        assert all(line.split(",")[5] == "True" for line in lines[1:])

    def test_empty_words_file(self, files, tmp_path, capsys):
        words = tmp_path / "empty.txt"
        words.write_text("", encoding="utf-8")
        out_csv = tmp_path / "empty.csv"
        assert main(["batch", files["l2"], str(words), "--csv-out", str(out_csv)]) == 0
        assert out_csv.read_text(encoding="utf-8").strip() == \
            "word,p_accept,p_reject,p_nonhalt,steps,halted,decision"

    def test_missing_words_file(self, files, capsys):
        assert main(["batch", files["l2"], "/nonexistent/words.txt"]) == 3

    def test_rerun_is_byte_identical(self, files, tmp_path, capsys):
        words = tmp_path / "w.txt"
        words.write_text("ab\nba\n", encoding="utf-8")
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert main(["batch", files["l2"], str(words), "--csv-out", str(a)]) == 0
        assert main(["batch", files["l2"], str(words), "--csv-out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestCompileDfa:
    def test_compiles_and_verifies(self, files, tmp_path, capsys):
        out = tmp_path / "rpa.json"
        assert main(["compile-dfa", files["dfa"], str(out)]) == 0
        rpa = load_qpa(out)
        assert len(rpa.states) == 4

    def test_partial_dfa_exits_three(self, files, tmp_path, capsys):
        out = tmp_path / "rpa.json"
        assert main(["compile-dfa", files["partial_dfa"], str(out)]) == 3


class TestMatrix:
    def test_verify_pass(self, files, capsys):
        assert main(["matrix", files["l2"], "--word", "ab", "--radius", "4", "--verify"]) == 0

    def test_verify_fail_row_deviation(self, files, capsys):
        assert main(["matrix", files["nonunitary"], "--word", "1",
                     "--radius", "3", "--verify"]) == 2
        assert "1.000e+00" in capsys.readouterr().out

    def test_dump_json(self, files, tmp_path, capsys):
        out = tmp_path / "m.json"
        assert main(["matrix", files["l1"], "--word", "1", "--radius", "2",
                     "--dump", str(out)]) == 0
        doc = json.loads(out.read_text(encoding="utf-8"))
        assert doc["dim"] > 0 and doc["triplets"]

    def test_dump_text_grid(self, files, capsys):
        assert main(["matrix", files["nonunitary"], "--word", "1", "--radius", "1",
                     "--dump", "-"]) == 0
        out = capsys.readouterr().out
        assert "1.0000" in out

    def test_json_mode_validates(self, files, capsys):
        assert main(["matrix", files["l2"], "--word", "ab", "--radius", "2",
                     "--verify", "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        jsonschema.validate(doc, MATRIX_SCHEMA)

    def test_window_cap_exits_three(self, files, capsys):
        assert main(["matrix", files["l2"], "--word", "ab", "--radius", "40",
                     "--verify"]) == 3

    def test_rerun_json_identical(self, files, capsys):
        assert main(["matrix", files["l2"], "--word", "ab", "--radius", "3",
                     "--verify", "--json"]) == 0
        first = capsys.readouterr().out
        assert main(["matrix", files["l2"], "--word", "ab", "--radius", "3",
                     "--verify", "--json"]) == 0
        assert capsys.readouterr().out == first


class TestZooCommands:
    def test_list(self, capsys):
        assert main(["zoo", "list"]) == 0
        out = capsys.readouterr().out
        for name in ("l1", "l2", "l3", "l5", "nonunitary"):
            assert name in out

    def test_export_and_reload(self, tmp_path, capsys):
        out = tmp_path / "l3.json"
        assert main(["zoo", "export", "l3", str(out)]) == 0
        spec = load_qpa(out)
        assert spec.name == "l3"

    def test_export_unknown(self, capsys):
        assert main(["zoo", "export", "l9"]) == 3


class TestEnvironmentOverrides:
    def test_env_tolerance_loosens(self, files, tmp_path, capsys, monkeypatch):
        # a slightly lossy table passes under a loose env tolerance
        import math
        from conftest import make_spec, ADV
        amp = math.sqrt(1.0 - 1e-6)
        spec = make_spec(
            sigma={"a"}, t={"1"}, states={"q"}, q0="q", q_acc=(), q_rej=(),
            entries=[("q", s, tau, "q", ADV, (tau,), amp)
                     for s in ("#", "$", "a") for tau in ("Z0", "1")],
        )
        path = tmp_path / "lossy.json"
        save_qpa(spec, path)
        assert main(["check", str(path)]) == 2
        capsys.readouterr()
        monkeypatch.setenv("QPAKIT_TOLERANCE", "1e-3")
        assert main(["check", str(path)]) == 0
        # explicit flag beats the environment
        assert main(["check", str(path), "--tolerance", "1e-9"]) == 2

    def test_env_json_output(self, files, capsys, monkeypatch):
        monkeypatch.setenv("QPAKIT_OUTPUT", "json")
        assert main(["run", files["l1"], "1"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["decision"] == "accepted"
