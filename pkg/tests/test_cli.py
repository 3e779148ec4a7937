import json
from fractions import Fraction
from pathlib import Path

import pytest

from padicradius.cli import ConfigError, build, format_decimal, main

CONFIGS = Path(__file__).resolve().parents[1] / "demos" / "configs"

EXP = {"field": {"p": 3},
       "system": {"mu": 1, "matrix": [["1"]], "domain": {"kind": "disk", "t_lo": "0"}}}


def write(tmp_path, doc, name="job.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_radius_prints_exact_rational(tmp_path, capsys):
    assert main(["radius", write(tmp_path, EXP), "--t", "0", "--terms", "400"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["v_est"] == "1/2"
    assert doc["v_est_exact"] == "121/243"


def test_profile_csv(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["profile", write(tmp_path, EXP), "--grid", "33", "--terms", "40",
                 "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,v_est,v_cert"
    assert len(lines) == 34


def test_output_is_byte_identical(tmp_path, capsys):
    path = write(tmp_path, EXP)
    main(["profile", path, "--grid", "5", "--terms", "30"])
    a = capsys.readouterr().out
    main(["profile", path, "--grid", "5", "--terms", "30"])
    assert capsys.readouterr().out == a


def test_fit_and_explore_dwork(capsys):
    cfg = str(CONFIGS / "dwork.json")
    assert main(["fit", cfg, "--terms", "200"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert [s["slope"] for s in doc["sides"]] == ["-2", "0"]
    assert main(["explore", cfg, "--terms", "200", "--centers", "1"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["segments"]) == 2 and doc["leaves"]


def test_explore_plot_data_files(tmp_path):
    cfg = str(CONFIGS / "dwork.json")
    out = tmp_path / "plot.csv"
    assert main(["explore", cfg, "--terms", "100", "--centers", "1", "--out", str(out)]) == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["plot_0.csv", "plot_1.csv"]


def test_verify_random_suite(capsys):
    code = main(["verify", str(CONFIGS / "random_suite.json"), "--terms", "40"])
    out = capsys.readouterr().out
    assert code == 0
    assert all(line.startswith("PASS") for line in out.splitlines())


def test_verify_failure_exit_code(tmp_path, capsys, monkeypatch):
    from padicradius import cli
    from padicradius.suites import CheckResult

    monkeypatch.setattr(cli, "run_random_suite",
                        lambda *a, **k: [CheckResult("forced", False, "x")])
    doc = {"field": {"p": 3}, "system": {"random": {"seed": 0}}, "task": {"suite": {"count": 1}}}
    assert main(["verify", write(tmp_path, doc)]) == 1
    assert "FAIL forced" in capsys.readouterr().out


def test_verify_single_system(tmp_path, capsys):
    assert main(["verify", write(tmp_path, EXP), "--terms", "40", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["passed"] and {c["name"] for c in doc["checks"]} >= {"concavity", "transfer"}


def test_transform_output_is_loadable(tmp_path, capsys):
    doc = {"field": {"p": 3},
           "system": {"mu": 1, "matrix": [["T^-1 + T"]],
                      "domain": {"kind": "annulus", "t_lo": "0", "t_hi": "1"}}}
    assert main(["transform", write(tmp_path, doc), "--map", "invert:9"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["system"]["domain"] == {"kind": "annulus", "t_lo": "1", "t_hi": "2",
                                       "open_lo": False}
    job = build(out)
    assert job.system.mu == 1


def test_schema_errors_are_exhaustive(tmp_path, capsys):
    doc = {"field": {"p": 4, "e": 0},
           "system": {"mu": 2, "matrix": [["1 + x", "T^1.5"], ["1"]],
                      "domain": {"kind": "disk", "t_lo": "a"}},
           "task": {"grid": 1, "bogus": 3}}
    assert main(["radius", write(tmp_path, doc)]) == 2
    err = capsys.readouterr().err
    for fragment in ["field/e", "t_lo", "bogus", "task/grid", "not prime",
                     "expected 2 entries", "unknown symbol 'x'", "exponent must be an integer"]:
        assert fragment in err


@pytest.mark.parametrize("argv_tail, fragment", [
    (["--map", "twist:3"], "unknown map"),
    (["--map", "dilate:0"], "nonzero"),
])
def test_transform_input_errors(tmp_path, capsys, argv_tail, fragment):
    assert main(["transform", write(tmp_path, EXP)] + argv_tail) == 2
    assert fragment in capsys.readouterr().err


def test_input_errors(tmp_path, capsys):
    assert main(["radius", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["radius", str(bad)]) == 2
    assert main(["radius", write(tmp_path, EXP), "--t=-1"]) == 2  # outside the disk
    assert main(["radius", write(tmp_path, EXP), "--tol", "abc"]) == 2
    pole = {"field": {"p": 3},
            "system": {"mu": 1, "matrix": [["1/(1+3*T)"]], "domain": {"kind": "disk", "t_lo": "-2"}}}
    assert main(["radius", write(tmp_path, pole)]) == 2
    assert "roots of valuation -1" in capsys.readouterr().err


def test_unknown_command_exits_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate", write(tmp_path, EXP)])
    assert exc.value.code == 2


def test_build_raises_config_error():
    with pytest.raises(ConfigError) as exc:
        build({"field": {"p": 3}})
    assert any("system" in e for e in exc.value.errors)


def test_decimal_formatting():
    assert format_decimal(Fraction(1, 3)) == "0.3333333333"
    assert format_decimal(Fraction(1, 2 * 10 ** 10)) == "0E-10"  # half to even
    assert format_decimal(Fraction(3, 2 * 10 ** 10)) == "2E-10"
