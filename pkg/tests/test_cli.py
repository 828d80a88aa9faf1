import json
import subprocess
import sys

import pytest

from pronorm.cli import dispatch, main

AMB33 = {"factors": [{"p": 3, "n": 3}]}
B_GENS = [{"v": [0, 0, 0], "s": [1, 0, 2]}, {"v": [0, 0, 0], "s": [1, 2, 0]}]
W01 = {"v": [1, 2, 0], "s": [0, 1, 2]}
IDM = {"p": 3, "d": 2, "entries": [1, 0, 0, 1]}


def mat(*entries):
    return {"p": 3, "d": 2, "entries": list(entries)}


def run(tmp_path, command, job, *flags):
    src = tmp_path / "job.json"
    src.write_text(json.dumps(job))
    out = tmp_path / "report.json"
    code = main([command, str(src), "--quiet", "--json", str(out), *flags])
    return code, json.loads(out.read_text())


class TestDecide:
    def test_bv_minus(self, tmp_path):
        code, rep = run(tmp_path, "decide", {"ambient": AMB33, "subgroup": B_GENS + [W01]})
        assert code == 0 and rep["verdict"] == "Pronormal"
        assert rep["diagnostics"][0]["primitive"] and rep["diagnostics"][0]["contains_transposition"]

    def test_complement(self, tmp_path):
        code, rep = run(tmp_path, "decide", {"ambient": AMB33, "subgroup": B_GENS})
        assert code == 1 and rep["verdict"] == "NotPronormal"
        assert rep["reasons"][0]["criterion"] == "sum-zero-containment"
        assert rep["input"]["subgroup"] == B_GENS

    def test_not_applicable(self, tmp_path):
        code, rep = run(tmp_path, "decide", {"ambient": AMB33, "subgroup": [B_GENS[0]]})
        assert code == 2 and rep["verdict"] == "NotApplicable"

    def test_product_elements(self, tmp_path):
        amb = {"factors": [{"p": 3, "n": 2}, {"p": 3, "n": 3}]}
        e2 = {"v": [0, 0], "s": [0, 1]}
        e3 = {"v": [0, 0, 0], "s": [0, 1, 2]}
        gens = [[{"v": [0, 0], "s": [1, 0]}, e3]] + [[e2, g] for g in B_GENS]
        code, rep = run(tmp_path, "decide", {"ambient": amb, "subgroup": gens})
        assert code == 1
        assert [r["criterion"] for r in rep["reasons"]] == ["coprime-degree", "sum-zero-containment"]

    def test_proper_k(self, tmp_path):
        job = {"ambient": AMB33, "subgroup": B_GENS, "K": B_GENS + [W01]}
        code, rep = run(tmp_path, "decide", job)
        assert code == 0 and rep["reasons"][0]["criterion"] == "proper-overgroup"

    def test_builtin_without_criterion(self, tmp_path):
        code, rep = run(tmp_path, "decide", {"ambient": {"builtin": "sym4"}, "subgroup": [[1, 0, 3, 2]]})
        assert code == 2 and rep["verdict"] == "NotApplicable"


class TestOracle:
    def test_sym4_witness(self, tmp_path):
        code, rep = run(tmp_path, "oracle", {"ambient": {"builtin": "sym4"}, "subgroup": [[1, 0, 3, 2]]})
        assert code == 1 and rep["witness"] == [0, 2, 1, 3]

    def test_alt5_sylow(self, tmp_path):
        job = {"ambient": {"builtin": "alt5"}, "subgroup": [[1, 0, 3, 2, 4], [2, 3, 0, 1, 4]]}
        code, rep = run(tmp_path, "oracle", job)
        assert code == 0

    def test_crosscheck(self, tmp_path):
        code, rep = run(tmp_path, "crosscheck", {"ambient": AMB33, "subgroup": B_GENS})
        assert code == 0 and rep["agree"] is True
        assert rep["decide"]["verdict"] == rep["oracle"]["verdict"] == "NotPronormal"


class TestOtherCommands:
    def test_classify(self, tmp_path):
        assert run(tmp_path, "classify", {"factors": [{"n": 3, "q": 3}]})[0] == 1
        assert run(tmp_path, "classify", {"factors": [[5, 3], [17, 3]]})[0] == 0
        code, rep = run(tmp_path, "classify", {"factors": [[2, 9]]})
        assert code == 0 and rep["factors"][0]["q_mod_8"] == 1

    def test_enumerate(self, tmp_path):
        code, rep = run(tmp_path, "enumerate", {"ambient": {"builtin": "sym4"}})
        assert code == 0 and rep["count"] == 2 and rep["base_order"] == 8

    def test_reduce(self, tmp_path):
        code, rep = run(tmp_path, "reduce", {"ambient": AMB33, "subgroup": B_GENS + [W01]})
        assert code == 0
        assert rep["orders"]["T"] == 1 and rep["orders"]["H_star"] == 54

    def test_example1_subgroup(self, tmp_path):
        q8 = {"base": [mat(0, 1, 2, 0), IDM, IDM], "s": [0, 1, 2]}
        q8b = {"base": [mat(1, 1, 1, 2), IDM, IDM], "s": [0, 1, 2]}
        tops = [{"base": [IDM] * 3, "s": [1, 0, 2]}, {"base": [IDM] * 3, "s": [1, 2, 0]}]
        code, rep = run(tmp_path, "example1", {"subgroup": [q8, q8b] + tops})
        assert code == 1 and rep["verdict"] == "NotPronormal"


class TestErrors:
    def test_bad_json(self, tmp_path):
        src = tmp_path / "bad.json"
        src.write_text("{not json")
        assert main(["decide", str(src), "--quiet"]) == 2

    def test_unknown_builtin(self, tmp_path):
        code, rep = run(tmp_path, "oracle", {"ambient": {"builtin": "monster"}, "subgroup": []})
        assert code == 2 and rep["error"] == "ParseError"

    def test_shape_mismatch(self, tmp_path):
        code, rep = run(tmp_path, "decide", {"ambient": AMB33, "subgroup": [{"v": [0, 0], "s": [1, 0]}]})
        assert code == 2 and rep["error"] == "ParseError"

    def test_missing_subgroup(self, tmp_path):
        assert run(tmp_path, "decide", {"ambient": AMB33})[0] == 2

    def test_budget(self, tmp_path):
        code, rep = run(tmp_path, "oracle", {"ambient": AMB33, "subgroup": B_GENS}, "--budget", "10")
        assert code == 2 and rep["error"] == "BudgetExceeded"

    def test_bad_prime_power(self, tmp_path):
        code, rep = run(tmp_path, "classify", {"factors": [[3, 15]]})
        assert code == 2 and rep["error"] == "BadPrimePower"


def test_reports_are_byte_identical(tmp_path):
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"ambient": AMB33, "subgroup": B_GENS}))
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        main(["crosscheck", str(job), "--quiet", "--json", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_timings_only_on_request(tmp_path):
    _, plain = run(tmp_path, "classify", {"factors": [[3, 3]]})
    _, timed = run(tmp_path, "classify", {"factors": [[3, 3]]}, "--timings")
    assert "timings" not in plain and "total_seconds" in timed["timings"]


def test_dispatch_directly():
    report, code = dispatch("decide", {"ambient": AMB33, "subgroup": B_GENS + [W01]})
    assert code == 0 and report["command"] == "decide"


def test_stdin_and_module_entry():
    job = json.dumps({"ambient": AMB33, "subgroup": B_GENS})
    proc = subprocess.run([sys.executable, "-m", "pronorm", "decide", "--json", "-", "--quiet"],
                          input=job, capture_output=True, text=True, timeout=120)
    assert proc.returncode == 1
    assert json.loads(proc.stdout)["verdict"] == "NotPronormal"


def test_human_summary(tmp_path, capsys):
    src = tmp_path / "job.json"
    src.write_text(json.dumps({"ambient": AMB33, "subgroup": B_GENS}))
    main(["decide", str(src)])
    out = capsys.readouterr().out
    assert "verdict: NotPronormal" in out and "sum-zero-containment" in out
