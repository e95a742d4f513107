import json
from pathlib import Path

import numpy as np

from moeastat.cli import main
from moeastat.data import parse_indicator_csv

FIXTURE = Path(__file__).parent / "fixtures" / "grouping_indicators.csv"


def write_inputs(tmp_path):
    rng = np.random.default_rng(1)
    lines = ["algorithm,problem,k,run,f1,f2"]
    for a, shift in (("A", 0.0), ("B", 0.3)):
        for run in range(4):
            t = np.sort(rng.random(5))
            for x, y in zip(t, 1 - t):
                lines.append(f"{a},F1,2,{run},{float(x + shift)!r},{float(y + shift)!r}")
    (tmp_path / "approx.csv").write_text("\n".join(lines) + "\n")
    (tmp_path / "front.csv").write_text("f1,f2\n" + "".join(f"{float(x)!r},{float(1 - x)!r}\n" for x in np.linspace(0, 1, 11)))
    config = {"references": [{"problem": "F1", "k": 2, "front": "front.csv", "hv_reference_point": [2, 2]}],
              "indicators": ["HV", "D2"], "permutations": 99}
    (tmp_path / "config.json").write_text(json.dumps(config))


def test_indicators_then_analyze(tmp_path):
    write_inputs(tmp_path)
    out = tmp_path / "ind.csv"
    assert main(["indicators", str(tmp_path / "approx.csv"), "--config", str(tmp_path / "config.json"),
                 "--out", str(out)]) == 0
    ds = parse_indicator_csv(out)
    assert len(ds) == 16 and ds.indicators() == ["HV", "D2"]
    assert main(["analyze", str(out), "--config", str(tmp_path / "config.json"),
                 "--out-dir", str(tmp_path / "res")]) == 0
    report = json.loads((tmp_path / "res" / "report.json").read_text())
    assert report["config"]["permutations"] == 99
    assert (tmp_path / "res" / "groupings.md").exists()


def test_render_reproduces_figures(tmp_path):
    out = tmp_path / "res"
    assert main(["analyze", str(FIXTURE), "--permutations", "99", "--out-dir", str(out)]) == 0
    before = {p.name: p.read_bytes() for p in (out / "figures").iterdir()}
    assert before
    assert main(["render", str(out / "report.json"), "--out-dir", str(tmp_path / "again")]) == 0
    after = {p.name: p.read_bytes() for p in (tmp_path / "again" / "figures").iterdir()}
    assert after == before


def test_no_figures(tmp_path):
    assert main(["analyze", str(FIXTURE), "--permutations", "9", "--no-figures", "--out-dir", str(tmp_path)]) == 0
    assert not (tmp_path / "figures").exists()


def test_errors_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("algorithm,problem,k,run,indicator,value\nA,F1,3,0,HV,nan\n")
    assert main(["analyze", str(bad), "--out-dir", str(tmp_path / "o")]) == 2
    assert "line 2" in capsys.readouterr().err
    assert main(["indicators", str(tmp_path / "missing.csv")]) == 2


def test_missing_reference_exit_code(tmp_path, capsys):
    write_inputs(tmp_path)
    assert main(["indicators", str(tmp_path / "approx.csv"), "--out", str(tmp_path / "x.csv")]) == 2
    assert "reference" in capsys.readouterr().err
