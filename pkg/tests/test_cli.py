import io
import json
import subprocess
import sys

import pytest

from successodds import cli

DATA = "group,value\nA,1\nA,2\nA,3\nA,4\nB,2\nB,3\nB,4\nB,5\n"
DICE = "\n".join(
    ["die,face"]
    + [f"D1,{v}" for v in (1, 4, 5, 6, 7, 7)]
    + [f"D2,{v}" for v in (3, 3, 4, 5, 6, 9)]
    + [f"D3,{v}" for v in (1, 2, 2, 8, 8, 9)]
) + "\n"


def invoke(argv, capsys=None):
    out = io.BytesIO()
    err = io.StringIO()
    ns = cli.build_parser().parse_args(argv)
    code = cli.run(cli.config_from_args(ns), out, err)
    return code, out.getvalue().decode("utf-8"), err.getvalue()


@pytest.fixture
def csv_file(tmp_path):
    def make(text, name="data.csv"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return make


def test_paper_coarsening_json():
    code, out, _ = invoke(["paper", "--table", "5", "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    rows = doc["table5"]
    assert [r["p_zero"] for r in rows] == [0.0, 0.16, 0.24, 0.64]
    assert all(r["theta"] == 0.68 for r in rows)
    assert rows[3]["lambda_wr"] == "inf"
    assert rows[0]["lambda_wr"] == 2.125 and rows[2]["lambda_wr"] == 2.8


def test_paper_treatments_markdown():
    code, out, _ = invoke(["paper", "--table", "2", "--format", "markdown"])
    assert code == 0
    assert "| B, A | 0.810 | 0.595 | 1.469 | inf |" in out
    assert "| C, B | 0.180 | 0.900 | 9.000 | 81.000 |" in out
    assert "| C, A | 0.090 | 0.955 | 21.222 | inf |" in out


def test_paper_text_symbols():
    code, out, _ = invoke(["paper", "--table", "2"])
    assert code == 0 and "∞" in out


def test_paper_all_runs():
    code, out, _ = invoke(["paper", "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert {"table1", "table2", "table5", "table8", "dice", "strata"} <= set(doc)
    assert doc["dice"]["tournament"]["cycles"] == [["D1", "D2", "D3"]]


def test_binary(tmp_path):
    svg = tmp_path / "bars.svg"
    code, out, _ = invoke(["binary", "--qa", "0.821", "--qb", "0.6", "--format", "json", "--svg", str(svg)])
    assert code == 0
    e = json.loads(out)["effects"]
    assert abs(e["lambda_wr"] - 3.06) < 0.005
    assert abs(e["lambda_so"] - 1.57) < 0.005
    text = svg.read_text()
    assert text.startswith("<?xml") and "0.821" in text and "0.600" in text and "0.179" in text


def test_binary_last_rate_pair():
    code, out, _ = invoke(["binary", "--qa", "0.95", "--qb", "0.7", "--format", "json"])
    e = json.loads(out)["effects"]
    assert abs(e["lambda_wr"] - 8.14) < 0.05 and abs(e["lambda_so"] - 1.67) < 0.05


def test_effects_identical_groups(csv_file):
    path = csv_file("group,value\nA,1\nA,1\nB,1\nB,1\n")
    code, out, _ = invoke(["effects", "--input", path, "--format", "json"])
    assert code == 0
    e = json.loads(out)["effects"]
    assert e["theta"] == 0.5 and e["lambda_so"] == 1.0 and e["lambda_wr"] == "undef"
    code, out, _ = invoke(["effects", "--input", path])
    assert "–" in out


def test_effects_columns_and_groups(csv_file):
    path = csv_file(DICE)
    code, out, _ = invoke(["effects", "--input", path, "--group-col", "die", "--value-col", "face",
                           "--groups", "D3", "D1", "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["groups"] == ["D3", "D1"]
    assert doc["effects"]["p_plus"] == pytest.approx(20 / 36)


def test_effects_dist(tmp_path):
    p = tmp_path / "d.json"
    p.write_text(json.dumps({
        "scale": "numeric(0)",
        "distributions": [
            {"label": "A", "support": [1, 2, 3], "probs": ["0.1", "0.9", "0"]},
            {"label": "B", "support": [1, 2, 3], "probs": ["0", "0.9", "0.1"]},
        ],
    }))
    code, out, _ = invoke(["effects", "--dist", str(p), "--groups", "B", "A", "--format", "json"])
    assert code == 0
    e = json.loads(out)["effects"]
    assert e["lambda_wr"] == "inf" and e["theta"] == pytest.approx(0.595)


def test_json_roundtrip_and_keys(csv_file):
    path = csv_file(DATA)
    code, out, _ = invoke(["test", "--input", path, "--format", "json", "--reps", "500"])
    assert code == 0
    doc = json.loads(out)
    assert json.loads(json.dumps(doc)) == doc
    assert doc["command"] == "test"
    assert doc["test"]["p_value"] == pytest.approx(0.307056, abs=1e-5)
    assert doc["intervals"]["lambda_wr"]["reps"] == 500
    assert 0 < doc["intervals"]["theta"]["lower"] < doc["intervals"]["theta"]["upper"] < 1


def test_deterministic_json(csv_file):
    path = csv_file(DICE)
    base = ["--input", path, "--group-col", "die", "--value-col", "face", "--format", "json"]
    runs = [invoke(["test", *base, "--groups", "D1", "D2", "--seed", "11", "--reps", "300"])[1] for _ in range(2)]
    assert runs[0] == runs[1]
    other = invoke(["test", *base, "--groups", "D1", "D2", "--seed", "12", "--reps", "300"])[1]
    assert other != runs[0]
    pw = [invoke(["pairwise", *base])[1] for _ in range(2)]
    assert pw[0] == pw[1]


def test_pairwise_text(csv_file):
    path = csv_file(DICE)
    code, out, _ = invoke(["pairwise", "--input", path, "--group-col", "die", "--value-col", "face"])
    assert code == 0
    assert "D1 → D2 → D3 → D1" in out


def test_stratified(csv_file):
    rows = ["stratum,arm,value"]
    for s, x, y in (("1", "D1", "D2"), ("2", "D2", "D3"), ("3", "D3", "D1")):
        faces = {"D1": (1, 4, 5, 6, 7, 7), "D2": (3, 3, 4, 5, 6, 9), "D3": (1, 2, 2, 8, 8, 9)}
        rows += [f"{s},A,{v}" for v in faces[x]] + [f"{s},B,{v}" for v in faces[y]]
    path = csv_file("\n".join(rows) + "\n")
    code, out, _ = invoke(["stratified", "--input", path, "--group-col", "arm", "--stratum-col", "stratum",
                           "--format", "json"])
    assert code == 0
    s = json.loads(out)["summary"]
    assert s["pooled"]["theta"] == 0.5 and s["pooled"]["lambda_wr"] == 1.0
    assert abs(s["mean_lambda_wr"] - 1.341) < 0.005


def test_exit_usage():
    code, _, err = invoke(["effects"])
    assert code == 2 and err.startswith("E_USAGE")
    code, _, err = invoke(["test", "--input", "x.csv", "--reps", "10"])
    assert code == 2 and "reps" in err


def test_exit_usage_from_argparse():
    r = subprocess.run([sys.executable, "-m", "successodds", "paper", "--table", "3"],
                       capture_output=True, text=True)
    assert r.returncode == 2 and "E_USAGE" in r.stderr


def test_exit_precision_error(csv_file):
    path = csv_file("group,value\nA,1.25\nB,2\n")
    code, out, err = invoke(["effects", "--input", path])
    assert code == 3 and out == ""
    assert err.startswith("E_SCALE") and "decimal precision exceeded, row 2" in err


def test_exit_parse_error(csv_file):
    path = csv_file("group,value\nA,1\nB,abc\n")
    code, out, err = invoke(["effects", "--input", path])
    assert code == 3 and out == ""
    assert err.startswith("E_PARSE") and "row 3" in err


def test_exit_scale_error(tmp_path):
    p = tmp_path / "d.json"
    p.write_text(json.dumps({"scale": "numeric(0)", "distributions": [
        {"label": "A", "support": [1, 2], "probs": ["0.6", "0.6"]}]}))
    code, _, err = invoke(["pairwise", "--dist", str(p)])
    assert code == 3 and err.startswith("E_")


def test_exit_degenerate(csv_file):
    path = csv_file("group,value\nA,1\nA,2\nB,5\nB,6\n")
    code, out, err = invoke(["test", "--input", path, "--format", "json", "--reps", "200"])
    assert code == 4
    doc = json.loads(out)
    assert doc["test"]["degenerate"] is True and doc["test"]["p_value"] is None
    assert "E_DEGENERATE" in err


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "successodds", "binary", "--qa", "0.9", "--qb", "0.5"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "9.000" in r.stdout
