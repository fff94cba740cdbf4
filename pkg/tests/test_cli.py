import json

import pytest

from redkp import LatticeParams, new_state, rat
from redkp.cli import main
from conftest import random_state


@pytest.fixture
def classic_file(tmp_path, classic_state):
    path = tmp_path / "classic.json"
    path.write_text(classic_state.dumps())
    return str(path)


def run_cli(*argv):
    return main(list(argv))


# -- evolve ---------------------------------------------------------------------


def test_evolve_roundtrip_bit_exact(tmp_path, classic_file):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    out3 = tmp_path / "c.json"
    assert run_cli("evolve", classic_file, "--to", "3", "-o", str(out1)) == 0
    assert run_cli("evolve", str(out1), "--to", "6", "-o", str(out2)) == 0
    assert run_cli("evolve", classic_file, "--to", "6", "-o", str(out3)) == 0
    direct = json.loads(out3.read_text())
    via = json.loads(out2.read_text())
    assert direct == via  # two-hop equals one-hop, bit for bit


def test_evolve_errors(tmp_path):
    bad = tmp_path / "deg.json"
    st = new_state(LatticeParams(1, 1, 2), {0: [2, 3]}, {0: [1, 6]})
    bad.write_text(st.dumps())
    assert run_cli("evolve", str(bad), "--to", "1") == 3  # degenerate closure
    missing = tmp_path / "missing.json"
    assert run_cli("evolve", str(missing), "--to", "1") == 2
    garbage = tmp_path / "garbage.json"
    garbage.write_text("{not json")
    assert run_cli("evolve", str(garbage), "--to", "1") == 2


# -- charpoly ---------------------------------------------------------------------


def test_charpoly_output(tmp_path, classic_file):
    out = tmp_path / "curve.json"
    assert run_cli("charpoly", classic_file, "-o", str(out)) == 0
    doc = json.loads(out.read_text())
    assert doc["deg_x"] == 2 and doc["deg_y"] == 2
    terms = {(r["dx"], r["dy"]): r["c"] for r in doc["poly"]}
    assert terms[(2, 0)] == "1"
    assert terms[(0, 1)] == "-11"
    assert terms[(0, 0)] == "30"
    sp = doc["special_points"]
    assert sp["A"] == [["0", "6"]]
    assert sp["B"] == [["0", "5"]]
    assert sorted(sp["Q"]) == [["15", "0"], ["2", "0"]]
    assert sp["P"] == {"present": False}
    # records arrive sorted by (dx, dy)
    keys = [(r["dx"], r["dy"]) for r in doc["poly"]]
    assert keys == sorted(keys)


def test_charpoly_p_branch_present(tmp_path):
    st = random_state(1, 1, 3, seed=4)
    path = tmp_path / "s.json"
    path.write_text(st.dumps())
    out = tmp_path / "c.json"
    assert run_cli("charpoly", str(path), "-o", str(out)) == 0
    doc = json.loads(out.read_text())
    assert doc["special_points"]["P"] == {
        "present": True,
        "x_pole_order": 2,
        "y_pole_order": 3,
    }


# -- yform -------------------------------------------------------------------------


def test_yform_output(tmp_path, classic_file):
    out = tmp_path / "y.json"
    assert run_cli("yform", classic_file, "-o", str(out)) == 0
    doc = json.loads(out.read_text())
    n, width = 2, 2
    assert len(doc["bands"]) == n * (width + 1)
    row0 = {rec["k"]: rec["a"] for rec in doc["bands"] if rec["i"] == 1}
    assert row0[width] == "1"
    for key in ("S_star", "R_star", "L_star", "Y"):
        mat = doc[key]
        assert len(mat) == width and all(len(r) == width for r in mat)


# -- verify ------------------------------------------------------------------------


def test_verify_deterministic_under_seed(tmp_path, classic_file):
    out1 = tmp_path / "r1.json"
    out2 = tmp_path / "r2.json"
    assert run_cli("verify", classic_file, "--seed", "7", "-o", str(out1)) == 0
    assert run_cli("verify", classic_file, "--seed", "7", "-o", str(out2)) == 0
    assert out1.read_text() == out2.read_text()


def test_verify_gcd_gating_reports_skipped(tmp_path, classic_file):
    out = tmp_path / "r.json"
    assert run_cli("verify", classic_file, "-o", str(out)) == 0
    doc = json.loads(out.read_text())
    by_name = {s["name"]: s for s in doc["suites"]}
    assert by_name["infinity_asymptotics"]["status"] == "skipped"
    assert "gcd" in by_name["infinity_asymptotics"]["reason"]
    assert doc["passed"] is True
    statuses = {s["status"] for s in doc["suites"]}
    assert statuses <= {"pass", "skipped"}


def test_verify_enumerates_all_suites(tmp_path, classic_file):
    out = tmp_path / "r.json"
    run_cli("verify", classic_file, "-o", str(out))
    doc = json.loads(out.read_text())
    names = [s["name"] for s in doc["suites"]]
    assert len(names) == len(set(names)) == 20


def test_verify_case_b_runs_every_suite(tmp_path):
    # gcd-compatible coincident-invariant input: nothing numeric is gated
    st = new_state(LatticeParams(1, 1, 3), {0: [2, 3, 4]}, {0: [3, 2, rat(3, 2)]})
    path = tmp_path / "caseb.json"
    path.write_text(st.dumps())
    out = tmp_path / "rep.json"
    assert run_cli("verify", str(path), "-o", str(out)) == 0
    doc = json.loads(out.read_text())
    statuses = {s["name"]: s["status"] for s in doc["suites"]}
    assert statuses["psi_phi_ratios"] == "pass"
    assert statuses["case_b_structure"] == "pass"
    assert statuses["infinity_asymptotics"] == "pass"
    skipped = [n for n, s in statuses.items() if s == "skipped"]
    assert skipped == ["hidden_invariant"]


# -- degenerate ----------------------------------------------------------------------


def test_degenerate_csv(tmp_path, classic_file):
    out = tmp_path / "table.csv"
    assert (
        run_cli(
            "degenerate",
            "--base",
            classic_file,
            "--direction",
            "reduce_M",
            "--zeta-sweep",
            "1e2,1e3",
            "--horizon",
            "6",
            "-o",
            str(out),
        )
        == 0
    )
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "zeta,max_err,fitted_slope"
    assert len(lines) == 3
    z1, e1, s1 = (float(v) for v in lines[1].split(","))
    z2, e2, s2 = (float(v) for v in lines[2].split(","))
    assert (z1, z2) == (100.0, 1000.0)
    assert e1 > e2 > 0
    assert s1 == s2


def test_unknown_flag_rejected(classic_file):
    with pytest.raises(SystemExit):
        run_cli("charpoly", classic_file, "--bogus")


def test_evolve_to_frontier_is_noop(tmp_path, classic_file):
    out = tmp_path / "same.json"
    assert run_cli("evolve", classic_file, "--to", "0", "-o", str(out)) == 0
    assert json.loads(out.read_text()) == json.loads(open(classic_file).read())


def test_evolve_backward_rejected(tmp_path, classic_file):
    fwd = tmp_path / "fwd.json"
    run_cli("evolve", classic_file, "--to", "3", "-o", str(fwd))
    assert run_cli("evolve", str(fwd), "--to", "1") == 2


def test_verify_large_n_skips_exponent_fits(tmp_path):
    # N beyond the double-precision fit range: exponent suites skip, not fail
    st = random_state(1, 2, 7, seed=3)
    path = tmp_path / "big.json"
    path.write_text(st.dumps())
    out = tmp_path / "rep.json"
    assert run_cli("verify", str(path), "-o", str(out)) == 0
    doc = json.loads(out.read_text())
    by_name = {s["name"]: s for s in doc["suites"]}
    assert by_name["infinity_asymptotics"]["status"] == "skipped"
    assert "double precision" in by_name["infinity_asymptotics"]["reason"]
