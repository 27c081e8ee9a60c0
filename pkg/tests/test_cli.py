import csv
import io
import json
from fractions import Fraction
from pathlib import Path

import pytest

from mdlvq.cli import run
from mdlvq.io import SWEEP_HEADER, read_labeling, read_sweep
from mdlvq.labeling import labeling_cost_matrix
from mdlvq.sublattice import build_system
from mdlvq.lattice import make_lattice
from oracles import bitmask_assignment

GOLDEN = Path(__file__).parent / "golden"
WORKED = ["--kind", "Zn", "--L", "2", "--xi1", "2+i", "--xi2", "3", "--gamma1", "9", "--gamma2", "5"]


def _run(args):
    buf = io.StringIO()
    code = run(args, stdout=buf)
    return code, buf.getvalue()


def test_design_worked_example(tmp_path):
    code, out = _run(["design", *WORKED, "--beta", "0.05", "--samples", "20000", "--out", str(tmp_path)])
    assert code == 0 and out.startswith("cost 1248")
    assert (tmp_path / "labeling.csv").read_text() == (GOLDEN / "worked_labeling.csv").read_text()
    assert (tmp_path / "system.json").read_text() == (GOLDEN / "worked_system.json").read_text()
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["labeling_cost"] == "1248" or Fraction(rep["labeling_cost"]) == 1248
    assert rep["measurement"]["N1"] == 5 and rep["measurement"]["N2"] == 9
    assert len(read_labeling(tmp_path / "labeling.csv")["points"]) == 45


def test_design_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        d.mkdir()
        assert _run(["design", *WORKED, "--R0", "5", "--samples", "5000", "--seed", "3", "--out", str(d)])[0] == 0
    for name in ("labeling.csv", "system.json", "report.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_design_trivial_system(tmp_path):
    code, _ = _run(["design", "--kind", "Zn", "--L", "2", "--xi1", "1", "--xi2", "1", "--gamma1", "1", "--gamma2", "1",
                    "--beta", "0.1", "--samples", "5000", "--out", str(tmp_path)])
    assert code == 0
    m = json.loads((tmp_path / "report.json").read_text())["measurement"]
    assert m["d0"] == m["d1"] == m["d2"]


def test_design_line_system_matches_oracle(tmp_path):
    code, out = _run(["design", "--kind", "Zn", "--L", "1", "--xi1", "3", "--xi2", "5", "--gamma1", "1", "--gamma2", "1",
                      "--beta", "0.05", "--samples", "2000", "--out", str(tmp_path)])
    assert code == 0
    C, scale = labeling_cost_matrix(build_system(make_lattice("Zn", 1), 3, 5), 1, 1)
    costs = read_labeling(tmp_path / "labeling.csv")["cost"]
    assert sum(costs) == bitmask_assignment(C) * scale == 144


def test_design_from_loss_probabilities(tmp_path):
    code, _ = _run(["design", "--kind", "Zn", "--L", "2", "--xi1", "2+i", "--xi2", "3", "--p1", "0.05", "--p2", "0.1",
                    "--R0", "5", "--samples", "2000", "--out", str(tmp_path)])
    assert code == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert float(Fraction(rep["gamma1"]) / Fraction(rep["gamma2"])) == pytest.approx(0.95 * 0.1 / (0.9 * 0.05), rel=1e-3)


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"kind": "Zn", "L": 1, "xi1": 3, "xi2": 5, "gamma1": 1, "gamma2": 1, "beta": 0.1, "samples": 1000}))
    code, out = _run(["design", "--config", str(cfg), "--gamma1", "9", "--gamma2", "5", "--out", str(tmp_path)])
    assert code == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["spec"]["gamma1"] == 9 and rep["spec"]["xi1"] == "3"
    cfg.write_text(json.dumps({"kind": "Zn", "colour": 1}))
    assert _run(["design", "--config", str(cfg), "--out", str(tmp_path)])[0] == 1


@pytest.mark.parametrize(
    "args,code",
    [
        (["design", "--kind", "Zn", "--L", "2", "--xi1", "1+i", "--xi2", "3", "--gamma1", "1", "--gamma2", "1", "--beta", "1"], 2),
        (["design", *WORKED, "--p1", "0.1", "--p2", "0.1", "--beta", "1"], 1),
        (["design", *WORKED], 1),
        (["design", *WORKED, "--beta", "-1"], 1),
        (["design", "--kind", "Zn", "--L", "2", "--xi1", "2+q", "--xi2", "3", "--gamma1", "1", "--gamma2", "1", "--beta", "1"], 1),
        (["bogus"], 1),
        (["verify", "--suite", "cld2", "--M", "0"], 1),
    ],
)
def test_exit_codes(tmp_path, args, code):
    assert _run([*args, "--out", str(tmp_path)] if args[0] == "design" else args)[0] == code


def test_sweep_gamma(tmp_path):
    code, _ = _run(["sweep", *WORKED, "--R0", "5", "--samples", "20000", "--sweep", "gamma", "--gammas", "1:2,1:1,2:1",
                    "--out", str(tmp_path)])
    assert code == 0
    text = (tmp_path / "rd_curve.csv").read_text()
    assert text.splitlines()[0] == ",".join(SWEEP_HEADER)
    rows = read_sweep(text)
    assert [r["gamma1"] / r["gamma2"] for r in rows] == [0.5, 1.0, 2.0]
    # more weight on side 1 lowers d1 and raises d2
    assert rows[0]["d1"] > rows[1]["d1"] > rows[2]["d1"]
    assert rows[0]["d2"] < rows[1]["d2"] < rows[2]["d2"]
    assert all(r["gap_db"] > 0 for r in rows)


def test_sweep_rate(tmp_path):
    code, _ = _run(["sweep", *WORKED, "--R0", "5", "--samples", "5000", "--sweep", "rate", "--rates", "4,5",
                    "--out", str(tmp_path)])
    assert code == 0
    rows = read_sweep(tmp_path / "rd_curve.csv")
    assert [r["R0_analytic"] for r in rows] == pytest.approx([4.0, 5.0])
    assert rows[1]["d0"] < rows[0]["d0"]


def test_catalog_golden(tmp_path):
    code, out = _run(["catalog", "--kind", "Zn", "--L", "2", "--limit", "50"])
    assert code == 0 and out == (GOLDEN / "catalog_z2_50.csv").read_text()
    clean = [int(r["N"]) for r in csv.DictReader(io.StringIO(out)) if r["clean"] == "true"]
    assert clean == [1, 5, 9, 13, 17, 25, 29, 37, 41, 45, 49]


def test_verify_commands():
    code, out = _run(["verify", "--suite", "cld2", "--M", "2"])
    assert code == 0 and "no clean sublattice" in out
    code, out = _run(["verify", "--suite", "cld2", "--M", "5"])
    assert code == 0 and "clean sublattice found" in out
    code, out = _run(["verify", "--suite", "properties", "--max-ns", "30"])
    assert code == 0 and "FAIL" not in out
