import json
import os
import subprocess

import pytest

import vfva


def test_binom_generalized():
    assert vfva.binom(5, 2) == "10"
    assert vfva.binom(-1, 3) == "-1"
    assert vfva.binom(-2, 2) == "3"


def test_prove_identity_pairs():
    assert vfva.prove_identity("two-term")["pairs"] == [[1, 4], [2, 3]]
    assert vfva.prove_identity("three-term")["pairs"] == [[1, 6], [2, 4], [3, 5]]
    with pytest.raises(vfva.VfvaError):
        vfva.prove_identity("four-term")


def test_borcherds_structure_passes_everything():
    s = vfva.borcherds(3)
    assert s["basis"] == ["1", "t", "t2"]
    reports = vfva.check_structure(s)
    assert len(reports) == 12
    assert all(r["verdict"] == "PASS" for r in reports)


def test_mutated_structure_fails_jacobi():
    s = vfva.borcherds(3)
    s["modes"].append({"u": "t", "n": 0, "v": "t", "coeff": {"t2": "1"}})
    verdicts = {r["id"]: r for r in vfva.check_structure(s)}
    assert verdicts["jacobi"]["verdict"] == "FAIL"
    assert verdicts["jacobi"]["witness"]["vectors"]


def test_ideal_has_no_vacuum_axioms():
    verdicts = {r["id"]: r["verdict"] for r in vfva.check_structure(vfva.borcherds(4, unital=False))}
    assert verdicts["vacuum_prop"] == "N/A"
    assert verdicts["jacobi"] == "PASS"


def test_malformed_config_raises():
    with pytest.raises(vfva.VfvaError):
        vfva.check_structure("{not json")
    with pytest.raises(vfva.VfvaError):
        vfva.check_structure({"basis": ["a"]})


def test_run_is_deterministic():
    a = vfva.run("replay-elem", seed=3, count=5)
    b = vfva.run("replay-elem", seed=3, count=5)
    assert a == b
    assert a["exit_code"] == 0
    assert len(a["records"]) == 9


def test_cli_machine_report(tmp_path):
    exe = os.environ.get("VFVA_CLI")
    if not exe:
        pytest.skip("VFVA_CLI not set")
    subprocess.run([exe, "examples", "emit", str(tmp_path)], check=True, capture_output=True)
    out = subprocess.run(
        [exe, "--format", "machine", "check", str(tmp_path / "borcherds-k2.cfg")],
        check=True, capture_output=True, text=True,
    )
    report = json.loads(out.stdout)
    assert report["exit_code"] == 0
    assert {r["verdict"] for r in report["records"]} == {"PASS"}
