from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest
import yaml

from pseudosym.classify import DETECTOR_NAMES
from pseudosym.cli import run
from pseudosym.curvature import CurvatureBundle
from pseudosym.metricfile import MetricFileError, load_metric, metric_from_dict
from pseudosym.report import ReportDocument, parse_data, report_context

METRICS = Path(__file__).resolve().parent.parent / "metrics"


@pytest.fixture(scope="module")
def rt_machine(cli_run):
    return cli_run(["--metric", "robinson-trautman-jet", "--checks", "all", "--format", "machine", "--trials", "2"])


@pytest.fixture(scope="module")
def cli_run(tmp_path_factory):
    """Run the CLI with --out into a temp file; return (code, text, doc)."""

    def go(argv):
        out = tmp_path_factory.mktemp("cli") / "report"
        code, doc = run([*argv, "--out", str(out)])
        return code, out.read_text() if out.exists() else "", doc

    return go


def test_rt_pseudosymmetry_string(rt_machine):
    code, text, _ = rt_machine
    assert code == 0
    doc = json.loads(text)
    v = next(v for v in doc["verdicts"] if v["name"] == "deszcz-pseudosymmetric")
    assert v["status"] == "holds-with-data"
    assert v["data"]["L"] == "(q - 2*b*r^2)/r^3"


def test_machine_output_reparses(rt_machine, rt_metric):
    _, text, _ = rt_machine
    doc = ReportDocument.from_json(text)
    assert doc.to_json() == text
    ctx = report_context(rt_metric)
    for v in doc.verdicts:
        for key, value in (v.get("data") or {}).items():
            parse_data(value, ctx)
        for w in v.get("witnesses", []):
            ctx.parse(w["value"])
    L = parse_data(doc.verdict("deszcz-pseudosymmetric")["data"]["L"], ctx)
    assert L == ctx.parse("(q - 2*b*r^2)/r^3")


def test_minkowski_statuses(cli_run):
    code, text, _ = cli_run(["--metric", "minkowski", "--checks", "all"])
    assert code == 0
    statuses = {v["name"]: v["status"] for v in json.loads(text)["verdicts"]}
    assert list(statuses) == list(DETECTOR_NAMES)
    assert set(statuses.values()) <= {"vacuous", "holds", "holds-with-data"}


@pytest.mark.parametrize(
    "argv, fragment",
    [
        (["--metric", "missing.file"], "--metric"),
        (["--metric", "minkowski", "--checks", "bogus"], "--checks"),
        (["--metric", "minkowski", "--jet-depth", "0"], "--jet-depth"),
        (["--metric", "minkowski", "--param", "a"], "--param"),
        (["--metric", "robinson-trautman-jet", "--param", "zz=1"], "--param"),
        ([], "--metric"),
    ],
)
def test_usage_errors(argv, fragment, capsys):
    code, doc = run(argv)
    assert code == 2 and doc is None
    err = capsys.readouterr().err
    assert err.startswith("pseudosym: error:") and fragment in err


def test_metric_file_errors_exit_nonzero(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("coordinates: [x, y]\nmetric: {'1,1': 1, '2,2': x/}\n")
    code, _ = run(["--metric", str(bad)])
    assert code == 2
    assert "[metric]" in capsys.readouterr().err


def test_deterministic_bytes():
    argv = ["-m", "pseudosym.cli", "--metric", "som-raychaudhuri", "--seed", "7", "--trials", "3"]
    first = subprocess.run([sys.executable, *argv], capture_output=True, check=True).stdout
    second = subprocess.run([sys.executable, *argv], capture_output=True, check=True).stdout
    assert first == second and first


def test_text_contains_every_verdict(cli_run):
    _, text, doc = cli_run(["--metric", "som-raychaudhuri", "--format", "text", "--trials", "1"])
    lines = text.splitlines()
    for v in doc.verdicts:
        assert any(line.split() == [v["name"], v["status"]] for line in lines), v["name"]
        for w in v.get("witnesses", []):
            assert w["value"] in text


def test_param_specialization(cli_run):
    code, text, _ = cli_run(
        ["--metric", "robinson-trautman-concrete", "--param", "a=0", "--param", "b=0", "--checks", "energy-momentum"]
    )
    assert code == 0
    statuses = {v["name"]: v["status"] for v in json.loads(text)["verdicts"]}
    assert statuses["energy-momentum-parallel"] == "holds"
    assert statuses["rt-parameter-condition"] == "holds"


def test_listing(capsys):
    code, doc = run(["--list"])
    out = capsys.readouterr().out
    assert code == 0 and doc is None
    assert "robinson-trautman-jet" in out and "deszcz-pseudosymmetric" in out


def test_timing_opt_in(cli_run):
    _, text, _ = cli_run(["--metric", "minkowski", "--checks", "einstein"])
    assert "timing_seconds" not in text
    _, text, _ = cli_run(["--metric", "minkowski", "--checks", "einstein", "--timing"])
    assert "timing_seconds" in json.loads(text)


# metric files -----------------------------------------------------------------------------

def test_rt_file_agrees_with_builtin(rt):
    m = load_metric(METRICS / "robinson_trautman.yaml")
    b = CurvatureBundle(m)
    ctx = m.ctx
    assert b.R[0, 1, 0, 1] == ctx.parse("-2*q/r^3")
    assert b.kappa == ctx.parse("-2*(-2*a + 12*b*r + f3^2 + f4^2 - f*(f33 + f44))/r^2")
    for idx, v in rt.S.items():
        assert str(b.S[idx]) == str(v)


def test_sr_file_agrees_with_builtin(sr):
    b = CurvatureBundle(load_metric(METRICS / "som_raychaudhuri.yaml"))
    assert sorted(b.C.keys()) == sorted(sr.C.keys())
    for idx, v in sr.C.items():
        assert str(b.C[idx]) == str(v)


def test_closed_jet_file():
    m = load_metric(METRICS / "exponential_profile.yaml")
    b = CurvatureBundle(m)
    assert b.R[0, 1, 0, 1] == m.ctx.parse("-2*q/r^3")


def _doc(**metric):
    return {"coordinates": ["x", "y"], "metric": metric or {"1,1": "1", "2,2": "x^2"}}


def test_metric_keys_by_name_and_position():
    m = metric_from_dict({"coordinates": ["x", "y"], "nonzero": ["x"], "metric": {"x,x": "1", "2,2": "x^2"}})
    assert m.g[1, 1] == m.ctx.parse("x^2") and m.g[0, 1].is_zero()


def test_conflicting_entries_rejected():
    with pytest.raises(MetricFileError, match="conflicting"):
        metric_from_dict(_doc(**{"1,1": "1", "2,2": "1", "1,2": "x", "2,1": "y"}))
    m = metric_from_dict(_doc(**{"1,1": "1", "2,2": "1", "1,2": "x", "2,1": "x"}))
    assert m.g[1, 0] == m.ctx.parse("x")


@pytest.mark.parametrize(
    "doc, section",
    [
        ({"coordinates": ["x"], "metric": {"1,1": "1"}, "extra": 1}, "extra"),
        ({"coordinates": "x", "metric": {"1,1": "1"}}, "coordinates"),
        ({"coordinates": ["x", "y"], "metric": {"1,3": "1"}}, "metric"),
        ({"coordinates": ["x", "y"], "metric": {"1,1": "1"}}, "metric"),
        ({"coordinates": ["x", "x"], "metric": {"1,1": "1"}}, "symbols"),
        ({"coordinates": ["x"], "jets": [{"depends_on": ["x"]}], "metric": {"1,1": "1"}}, "jets"),
        ({"coordinates": ["x"], "metric": {"1,1": "z"}}, "metric"),
        ([1, 2], "document"),
    ],
)
def test_metric_file_sections_named(doc, section):
    with pytest.raises(MetricFileError) as info:
        metric_from_dict(doc)
    assert info.value.section == section


def test_missing_file():
    with pytest.raises(MetricFileError) as info:
        load_metric("/nonexistent/metric.yaml")
    assert info.value.section == "file"


def test_invalid_yaml(tmp_path):
    p = tmp_path / "m.yaml"
    p.write_text("coordinates: [x\n")
    with pytest.raises(MetricFileError) as info:
        load_metric(p)
    assert info.value.section == "file"


def test_report_schema_version_checked(rt_machine):
    _, text, _ = rt_machine
    doc = json.loads(text)
    doc["schema_version"] = 99
    with pytest.raises(ValueError):
        ReportDocument.from_json(json.dumps(doc))


def test_yaml_file_from_disk(tmp_path):
    doc = {"name": "poincare", "coordinates": ["x", "y"], "nonzero": ["y"], "metric": {"1,1": "1/y^2", "2,2": "1/y^2"}}
    p = tmp_path / "p.yaml"
    p.write_text(yaml.safe_dump(doc))
    b = CurvatureBundle(load_metric(p))
    assert b.kappa == 2
