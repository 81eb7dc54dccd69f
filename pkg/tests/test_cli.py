import io
import json
import shutil
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from qfgraphs.cli import main, parse_range


def run(*argv):
    out = io.StringIO()
    try:
        code = main(list(argv), out)
    except SystemExit as e:  # argparse usage errors
        code = e.code
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv, "--json")
    return code, json.loads(text)


@pytest.fixture(scope="module")
def schema():
    text = resources.files("qfgraphs").joinpath("report_schema.json").read_text()
    return json.loads(text)


# --- classify ----------------------------------------------------------------

def test_classify_examples(capsys):
    code, text = run("classify", "-q", "q=5", "-f", "diag(1,1,1,1)")
    assert code == 0 and text.splitlines()[0] == "hyperbolic, 2*H"
    code, text = run("classify", "-q", "q=2", "-f", "bin(1,1)")
    assert code == 0 and text.startswith("anisotropic")
    code, text = run("classify", "-q", "q=2", "-f", "diag(1)")
    assert code == 1 and "DegenerateForm" in capsys.readouterr().err


def test_classify_json():
    code, doc = run_json("classify", "-q", "q=9", "-f", "H + diag(1,-lambda)")
    assert code == 0
    assert doc["form"]["dim"] == 4 and doc["form"]["witt_index"] == 1


# --- predict / verify ----------------------------------------------------------

def test_predict_examples(schema):
    code, doc = run_json("predict", "-q", "q=3", "-f", "H", "-a", "1")
    jsonschema.validate(doc, schema)
    assert code == 0
    assert doc["predicted"]["connected"] is False and doc["predicted"]["diameter"] == "inf"
    assert "bruteforce" not in doc and "match" not in doc

    code, doc = run_json("predict", "-q", "q=5", "-f", "diag(1,1,1,1)", "-a", "1")
    jsonschema.validate(doc, schema)
    assert doc["predicted"]["triangles"]["total"] == 250000

    code, doc = run_json("predict", "-q", "q=2", "-f", "H+bin(1,1)", "-a", "1")
    jsonschema.validate(doc, schema)
    assert doc["predicted"]["four_cycles"] == 900


def test_predict_interval_and_clauses(schema):
    code, doc = run_json("predict", "-q", "q=9", "-f", "H", "-a", "1")
    jsonschema.validate(doc, schema)
    assert doc["predicted"]["diameter"] == {"lo": 3, "hi": 4}
    assert doc["predicted"]["clauses"]["diameter"] == "diameter.dim2.hyperbolic"


def test_verify_examples(schema, capsys):
    code, doc = run_json("verify", "-q", "q=5", "-f", "H", "-a", "1")
    jsonschema.validate(doc, schema)
    assert code == 0 and all(v is not False for v in doc["match"].values())
    assert doc["bruteforce"]["diameter"] == 4

    code, doc = run_json("verify", "-q", "q=4", "-f", "H", "-a", "1")
    jsonschema.validate(doc, schema)
    assert code == 0
    assert doc["bruteforce"]["connected"] is False and doc["bruteforce"]["components"] == 4
    assert doc["match"]["connected"] is True

    code, _ = run("verify", "-q", "q=13", "-f", "diag(1,1,1,1,1)", "-a", "1", "--max-vertices", "100")
    assert code == 2 and "CapExceeded" in capsys.readouterr().err


def test_verify_not_covered_four_cycles(schema):
    code, doc = run_json("verify", "-q", "q=5", "-f", "diag(1,1,1)", "-a", "1")
    jsonschema.validate(doc, schema)
    assert code == 0
    assert doc["predicted"]["four_cycles"] == "not-covered" and doc["match"]["four_cycles"] is None


def test_verify_text_report():
    code, text = run("verify", "-q", "q=5", "-f", "H", "-a", "1", "--no-timing")
    assert code == 0
    assert "MISMATCH" not in text and "components: 1" in text
    assert "time." not in text


def test_reports_are_deterministic_without_timing():
    argv = ("verify", "-q", "q=7", "-f", "H + diag(1,3)", "-a", "lambda", "--no-timing", "--json")
    assert run(*argv) == run(*argv)
    code, doc = run_json("verify", "-q", "q=7", "-f", "H", "-a", "1")
    assert set(doc["timing"]) == {"predict", "bruteforce"}


def test_mismatch_exit_code(monkeypatch):
    from qfgraphs import cli
    from qfgraphs.predict import Prediction

    monkeypatch.setattr(cli, "predict_girth", lambda q, a: Prediction(5, "girth.fake"))
    code, text = run("verify", "-q", "q=5", "-f", "H", "-a", "1", "--no-timing")
    assert code == 3 and "MISMATCH" in text


def test_usage_and_parse_errors(capsys):
    assert run("predict", "-q", "q=6", "-f", "H")[0] == 1
    assert run("predict", "-q", "q=5", "-f", "H(")[0] == 1
    assert run("frobnicate")[0] == 1
    assert run("sweep", "-f", "H", "--fields", "5-9")[0] == 1
    capsys.readouterr()


# --- sweep -----------------------------------------------------------------------

def test_sweep_small_hyperbolic_range():
    code, doc = run_json("sweep", "-f", "H", "--fields", "5..13", "-a", "1", "--mode", "diameter")
    assert code == 0
    rows = [(r["f"], r["oracle"]) for r in doc["rows"]]
    # GF(8) already reaches diameter 3
    assert rows == [(5, 4), (7, 4), (8, 3), (9, 4), (11, 3), (13, 3)]
    assert all(r["predicted"] == {"lo": 3, "hi": 4} and r["match"] for r in doc["rows"])


def test_sweep_disconnected_rows():
    code, text = run("sweep", "-f", "H", "--fields", "2..4", "-a", "1")
    assert code == 0
    body = text.splitlines()[1:]
    assert len(body) == 3 and all(line.endswith("disconnected") for line in body)


def test_sweep_empty_range():
    code, text = run("sweep", "-f", "H", "--fields", "14..15")
    assert code == 0 and len(text.splitlines()) == 1
    code, doc = run_json("sweep", "-f", "H", "--fields", "14..15")
    assert code == 0 and doc["rows"] == []
    assert parse_range("14..15") == []


def test_sweep_records_cap_per_row():
    code, doc = run_json("sweep", "-f", "diag(1,1,1)", "--fields", "3..13", "--max-vertices", "400")
    assert code == 0
    errors = {r["f"]: r.get("error") for r in doc["rows"]}
    assert errors[7] is None and errors[11].startswith("CapExceeded")


def test_sweep_all_a_and_all_mode():
    code, doc = run_json("sweep", "-f", "H", "--fields", "7..7", "--all-a")
    assert code == 0 and [r["a"] for r in doc["rows"]] == list(range(1, 7))
    assert {r["oracle"] for r in doc["rows"]} == {4}
    code, doc = run_json("sweep", "-f", "diag(1,1,1)", "--fields", "3..5", "--mode", "all")
    by_f = {r["f"]: r for r in doc["rows"]}
    assert code == 0 and by_f[3]["match"] and by_f[5]["match"]
    # odd-dimensional diagonal forms are degenerate in characteristic 2
    assert by_f[4]["error"] == "DegenerateForm"


# --- export ----------------------------------------------------------------------

def test_export_examples(tmp_path, capsys):
    code, text = run("export", "-q", "q=2", "-f", "H", "-a", "1", "--format", "edges")
    assert code == 0 and text.splitlines() == ["0 3", "1 2"]
    code, text = run("export", "-q", "q=2", "-f", "bin(1,1)", "-a", "1", "--format", "dot")
    assert code == 0 and text.count(" -- ") == 6  # K4
    code, _ = run("export", "-q", "q=9", "-f", "3*H", "-a", "1", "--format", "dot")
    assert code == 2 and "CapExceeded" in capsys.readouterr().err


def test_export_is_byte_identical(tmp_path):
    paths = [tmp_path / "a.dot", tmp_path / "b.dot"]
    for p in paths:
        assert run("export", "-q", "q=5", "-f", "diag(1,1,1)", "-a", "2", "--format", "dot",
                   "-o", str(p))[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_console_script():
    exe = shutil.which("qfgraph")
    cmd = [exe] if exe else [sys.executable, "-m", "qfgraphs.cli"]
    res = subprocess.run(cmd + ["predict", "-q", "q=5", "-f", "H", "--json", "--no-timing"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["predicted"]["four_cycles"] == 25
