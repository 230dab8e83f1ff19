import csv
import json

import pytest

from currentlab import suites as S
from currentlab.errors import DomainError


def test_suite_names_registered():
    assert set(S.SUITE_NAMES) == {
        "specfun", "fourier", "levy-khinchin", "measures", "coherence",
        "invariance", "group", "reps", "spherical", "all",
    }
    for name in S.SUITE_NAMES:
        assert len(S.suite_specs(name)) > 0
    total = sum(len(S.suite_specs(n)) for n in S.SUITE_NAMES if n != "all")
    assert len(S.suite_specs("all")) == total


def test_unknown_suite_raises():
    with pytest.raises(DomainError):
        S.suite_specs("nope")


def test_run_config_validation():
    with pytest.raises(DomainError):
        S.RunConfig(n=1)
    with pytest.raises(DomainError):
        S.RunConfig(partition=(0.5, 0.0))
    with pytest.raises(DomainError):
        S.RunConfig(format="yaml")
    with pytest.raises(DomainError):
        S.RunConfig(tolerances={"x": -1.0})


def test_run_suite_reports_and_determinism():
    cfg = S.RunConfig(workers=2)
    a = S.run_suite(cfg, "measures")
    b = S.run_suite(cfg, "measures")
    assert [r.check_id for r in a] == [r.check_id for r in b]
    assert [r.residual for r in a] == [r.residual for r in b]
    for r in a:
        assert r.passed
        assert r.runtime_ms >= 0.0
        assert r.paper_anchor


def test_tolerance_override_can_fail_a_check():
    cfg = S.RunConfig(tolerances={"density-ratio-consistency": 1e-300})
    reports = {r.check_id: r for r in S.run_suite(cfg, "measures")}
    r = reports["density-ratio-consistency"]
    assert r.tolerance == 1e-300
    assert not r.passed


def test_serial_matches_threaded():
    a = S.run_suite(S.RunConfig(workers=1), "invariance")
    b = S.run_suite(S.RunConfig(workers=4), "invariance")
    assert [(r.check_id, r.residual) for r in a] == \
        [(r.check_id, r.residual) for r in b]


def test_report_dict_uses_pass_key():
    r = S.CheckReport("x", "1-1", 0.0, 1e-6, True, 1.0)
    d = r.to_dict()
    assert d["pass"] is True
    assert "passed" not in d


def test_write_report_json_and_csv(tmp_path):
    cfg = S.RunConfig()
    reports = S.run_suite(cfg, "specfun")
    jpath = tmp_path / "out.json"
    S.write_report(S.RunConfig(output_path=str(jpath)), "specfun", reports)
    doc = json.loads(jpath.read_text())
    assert doc["suite"] == "specfun"
    assert doc["all_pass"] is True
    assert len(doc["reports"]) == len(reports)
    assert all("pass" in r for r in doc["reports"])

    cpath = tmp_path / "out.csv"
    S.write_report(S.RunConfig(output_path=str(cpath), format="csv"),
                   "specfun", reports)
    rows = list(csv.DictReader(cpath.read_text().splitlines()))
    assert len(rows) == len(reports)
    assert set(rows[0]) == {"check_id", "paper_anchor", "residual",
                            "tolerance", "pass", "runtime_ms"}
