import copy
import json
import shutil
import subprocess
import sys

import pytest

from extremal_lie import report as rpt, suites as S
from extremal_lie.cli import main
from extremal_lie.report import ConfigError, RunConfig, SchemaMismatch, compare_reports, run


def _run_main(tmp_path, *args):
    out = tmp_path / "report.json"
    code = main([*args, "--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def test_all_suites_pass_on_sl3_mod_2(tmp_path, capsys):
    code, data = _run_main(tmp_path, "--type", "A2", "--field", "2")
    assert code == 0 and data["status"] == "pass"
    assert data["schema"] == rpt.SCHEMA
    assert set(data["suites"]) == set(rpt.SUITES)
    assert data["counts"]["points"] == 21 and data["counts"]["lines"] == 14
    assert "A2 over F2: pass" in capsys.readouterr().out


def test_failing_suite_gives_exit_code_one(tmp_path, monkeypatch):
    def broken(rs, fields=()):
        rep = S.SuiteReport("structure")
        rep.add("deliberately failing check", False)
        return rep
    monkeypatch.setattr(rpt, "structure_suite", broken)
    code, data = _run_main(tmp_path, "--type", "A2", "--field", "3", "--suites", "structure")
    assert code == 1 and data["status"] == "fail"


@pytest.mark.parametrize("args", [["--type", "B2", "--field", "2"], ["--type", "A2", "--field", "4"],
                                  ["--type", "A2", "--field", "Q", "--suites", "geometry"],
                                  ["--type", "A2", "--field", "2", "--suites", "nonsense"],
                                  ["--type", "A2", "--field", "2", "--point-cap", "0"],
                                  ["--field", "2"]])
def test_bad_configuration_gives_exit_code_two(tmp_path, args):
    code, data = _run_main(tmp_path, *args)
    assert code == 2 and data is None


def test_all_over_rationals_drops_geometry_suites():
    cfg = RunConfig.parse("A2", "Q")
    assert not set(cfg.suites) & set(rpt.GEOMETRY_SUITES)
    assert "dictionary" in cfg.suites and "maintheorem" in cfg.suites
    with pytest.raises(ConfigError):
        RunConfig.parse("A2", "Q", "lemmas")


def test_rational_run_passes():
    data = run(RunConfig.parse("A2", "Q"))
    assert data["status"] == "pass"
    assert data["suites"]["maintheorem"]["status"] == "pass"


def test_large_geometry_is_skipped_with_reason():
    data = run(RunConfig.parse("E8", "3", "geometry"))
    g = data["suites"]["geometry"]
    assert g["status"] == "skipped" and g["reason"].startswith("point-cap")
    assert data["status"] == "pass"


def test_main_theorem_on_D4_mod_2_uses_the_simple_quotient():
    data = run(RunConfig.parse("D4", "2", "maintheorem"))
    m = data["suites"]["maintheorem"]
    assert m["status"] == "pass"
    assert m["data"]["dim_L"] == m["data"]["dim_Lprime"] == 26
    assert m["data"]["kernel_dim"] == m["data"]["center_dim"] == 2


def test_reports_are_deterministic():
    a = run(RunConfig.parse("A3", "2", seed=7))
    b = run(RunConfig.parse("A3", "2", seed=7))
    assert compare_reports(a, b) == []
    assert rpt.dumps({k: v for k, v in a.items() if k != "timings"}) == \
        rpt.dumps({k: v for k, v in b.items() if k != "timings"})


def test_compare_reports_ignores_timings_and_names_real_differences():
    a = run(RunConfig.parse("A2", "2", "geometry"))
    b = copy.deepcopy(a)
    b["timings"]["geometry"] += 5.0
    assert compare_reports(a, b) == []
    b["counts"]["points"] = 22
    b["suites"]["geometry"]["data"]["points"] = 22
    diff = compare_reports(a, b)
    assert ("counts/points", 21, 22) in diff
    assert any(path.startswith("suites/geometry") for path, _, _ in diff)
    with pytest.raises(SchemaMismatch):
        compare_reports(a, dict(b, schema="other"))


@pytest.mark.skipif(shutil.which("extremal-lie") is None, reason="console script not installed")
def test_console_script(tmp_path):
    out = tmp_path / "r.json"
    proc = subprocess.run(["extremal-lie", "--type", "A2", "--field", "2", "--suites", "structure,extremal",
                           "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["status"] == "pass"


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "extremal_lie.cli", "--type", "A1", "--field", "5",
                           "--suites", "structure"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "A1 over F5: pass" in proc.stdout
