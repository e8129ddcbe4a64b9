from __future__ import annotations

import json
import shutil
import subprocess
import sys

import pytest

from dgldpc.cli import CSV_HEADER, EXIT_INPUT, EXIT_OK, EXIT_SOLVER, main
from dgldpc.specfile import SpecError, ensemble_from_document, ensemble_to_document, load_ensemble
from dgldpc.spectral import ConvergenceError, solve_point

from _fixtures import SPECS


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _spec(name):
    return str(SPECS / f"{name}.json")


class TestCurve:
    def test_csv_to_stdout(self, capsys):
        code, out, _ = _run(capsys, "curve", _spec("tanner_hamming_rep2"), "--points", "5")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 6
        assert all(len(l.split(",")) == 7 for l in lines[1:])

    def test_csv_to_file_with_summary(self, capsys, tmp_path):
        path = tmp_path / "curve.csv"
        code, out, _ = _run(capsys, "curve", _spec("ldpc_3_6"), "--points", "8", "--out", str(path))
        assert code == EXIT_OK
        summary = json.loads(out)
        assert summary["points"] == 8
        assert summary["alpha_star"] == pytest.approx(0.022733, abs=5e-7)
        assert summary["symmetry"]["all_cn_symmetric"]
        text = path.read_bytes()
        assert text.startswith(CSV_HEADER.encode() + b"\n")
        assert b"\r" not in text

    def test_seventeen_significant_digits(self, capsys):
        _, out, _ = _run(capsys, "curve", _spec("tanner_hamming_rep2"), "--grid", "0.3")
        alpha, g = out.splitlines()[1].split(",")[:2]
        assert float(g) == solve_point(load_ensemble(_spec("tanner_hamming_rep2")), 0.3).G
        assert alpha == "0.29999999999999999"

    def test_deterministic(self, capsys):
        a = _run(capsys, "curve", _spec("dgldpc_ensemble2"), "--points", "6")[1]
        b = _run(capsys, "curve", _spec("dgldpc_ensemble2"), "--points", "6")[1]
        assert a == b

    def test_round_trip_spec_gives_identical_csv(self, capsys, tmp_path):
        e = load_ensemble(_spec("dgldpc_ensemble1"))
        doc = ensemble_to_document(e)
        path = tmp_path / "rt.json"
        path.write_text(json.dumps(doc))
        back = ensemble_from_document(doc)
        assert (back.vn_enums, back.cn_enums, back.rate) == (e.vn_enums, e.cn_enums, e.rate)
        a = _run(capsys, "curve", _spec("dgldpc_ensemble1"), "--points", "6")[1]
        b = _run(capsys, "curve", str(path), "--points", "6")[1]
        assert a == b

    def test_stopping_kind(self, capsys):
        code, out, _ = _run(capsys, "curve", _spec("tanner_hamming_rep2"), "--kind", "ss-map", "--points", "3")
        assert code == EXIT_OK and len(out.splitlines()) == 4

    def test_out_of_domain_grid(self, capsys, tmp_path):
        path = tmp_path / "x.csv"
        code, out, err = _run(capsys, "curve", _spec("tanner_hamming_rep2"), "--grid", "0.5,1.5", "--out", str(path))
        assert code == EXIT_INPUT and "alpha" in err
        assert not path.exists() and out == ""

    def test_solver_failure_exit_code(self, capsys, monkeypatch):
        def boom(*a, **k):
            raise ConvergenceError("forced", 0.25)

        monkeypatch.setattr("dgldpc.cli.growth_curve", boom)
        code, _, err = _run(capsys, "curve", _spec("tanner_hamming_rep2"))
        assert code == EXIT_SOLVER and "alpha=0.25" in err


class TestInputErrors:
    def test_malformed_json(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        out_csv = tmp_path / "o.csv"
        code, out, err = _run(capsys, "curve", str(path), "--out", str(out_csv))
        assert code == EXIT_INPUT and "malformed" in err
        assert not out_csv.exists()

    def test_schema_violation(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"variable_nodes": [], "check_nodes": []}))
        code, _, err = _run(capsys, "alpha-star", str(path))
        assert code == EXIT_INPUT and "schema" in err

    def test_missing_file(self, capsys):
        assert _run(capsys, "alpha-star", "/nonexistent/x.json")[0] == EXIT_INPUT

    def test_fraction_tolerance(self, tmp_path):
        doc = json.loads((SPECS / "dgldpc_ensemble1.json").read_text())
        doc["variable_nodes"][0]["lambda"] += 5e-10
        assert load_ensemble_doc(doc, tmp_path).rate == pytest.approx(0.5, abs=1e-5)
        doc["variable_nodes"][0]["lambda"] += 1e-6
        with pytest.raises(SpecError, match="sum"):
            load_ensemble_doc(doc, tmp_path)

    def test_bad_code_content(self, capsys):
        code, _, err = _run(capsys, "enumerate", "--code", '{"kind": "spc_antisystematic", "length": 4}')
        assert code == EXIT_INPUT and "odd" in err

    def test_bad_spectral_tol(self, capsys, monkeypatch):
        monkeypatch.setenv("SPECTRAL_TOL", "abc")
        assert _run(capsys, "alpha-star", _spec("ldpc_3_6"))[0] == EXIT_INPUT


def load_ensemble_doc(doc, tmp_path):
    path = tmp_path / "doc.json"
    path.write_text(json.dumps(doc))
    return load_ensemble(path)


class TestAlphaStar:
    def test_exact_and_approx(self, capsys):
        code, out, _ = _run(capsys, "alpha-star", _spec("ldpc_3_6"), "--approx")
        rep = json.loads(out)
        assert code == EXIT_OK
        assert rep["exact"] == pytest.approx(0.022733, abs=5e-7)
        assert rep["approx"] == pytest.approx(0.021746, abs=5e-7)
        assert rep["approx_shortcut"] == "regular-ldpc"

    def test_bad_growth(self, capsys):
        rep = json.loads(_run(capsys, "alpha-star", _spec("bad_growth_tanner"), "--approx")[1])
        assert rep["exact"] == 0.0 and rep["classification"] == "bad"
        assert rep["approx"] is None

    def test_spectral_tol_env(self, capsys, monkeypatch):
        ref = json.loads(_run(capsys, "alpha-star", _spec("check_hybrid"))[1])["exact"]
        monkeypatch.setenv("SPECTRAL_TOL", "1e-6")
        loose = json.loads(_run(capsys, "alpha-star", _spec("check_hybrid"))[1])["exact"]
        assert loose == pytest.approx(ref, abs=1e-6)


class TestEnumerate:
    def test_inline_code(self, capsys):
        code, out, _ = _run(capsys, "enumerate", "--code", '{"kind": "generator", "rows": ["1000110", "0100101", "0010011", "0001111"]}')
        rep = json.loads(out)
        assert code == EXIT_OK
        assert rep["wef"] == [1, 0, 0, 7, 7, 0, 0, 1]
        assert rep["ssef_bd"] == [1, 0, 0, 35, 35, 21, 7, 1]
        assert rep["ssef_map"] == [1, 0, 0, 7, 7, 21, 7, 1]

    def test_spec(self, capsys):
        rep = json.loads(_run(capsys, "enumerate", _spec("dgldpc_ensemble2"))[1])
        assert len(rep["variable_nodes"]) == 4 and len(rep["check_nodes"]) == 2
        assert all(v["io_ssef_map"] is not None for v in rep["variable_nodes"])

    def test_wef_only_code_rejected(self, capsys):
        assert _run(capsys, "enumerate", "--code", '{"kind": "wef", "coeffs": [1, 0, 1]}')[0] == EXIT_INPUT

    def test_needs_input(self, capsys):
        assert _run(capsys, "enumerate")[0] == EXIT_INPUT


class TestOracle:
    def test_rows(self, capsys):
        rep = json.loads(_run(capsys, "oracle", _spec("ldpc_3_6"), "--n", "16,32", "--alpha", "0.25")[1])
        assert [r["n"] for r in rep["rows"]] == [16, 32]
        assert rep["rows"][1]["abs_error"] < rep["rows"][0]["abs_error"]

    def test_alpha_zero(self, capsys):
        rep = json.loads(_run(capsys, "oracle", _spec("ldpc_3_6"), "--n", "8", "--alpha", "0")[1])
        assert rep["rows"][0]["exponent"] == 0.0 and rep["G_limit"] is None

    def test_inadmissible_n(self, capsys):
        code, _, err = _run(capsys, "oracle", _spec("tanner_hamming_rep2"), "--n", "5", "--alpha", "0.2")
        assert code == EXIT_INPUT and "multiples of 7" in err


@pytest.mark.skipif(shutil.which("dgldpc") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["dgldpc", "alpha-star", _spec("tanner_hamming_rep2")], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["exact"] == pytest.approx(0.1864998, abs=5e-8)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "dgldpc.cli", "curve", _spec("ldpc_3_6"), "--points", "2"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith(CSV_HEADER)
