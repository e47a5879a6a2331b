import json
import os
import subprocess
from pathlib import Path

import jsonschema
import pytest

import cpdy

ROOT = Path(__file__).resolve().parents[2]
SCENARIOS = ROOT / "scenarios"
SCHEMA = json.loads((ROOT / "docs" / "trace.schema.json").read_text())
CLI = os.environ.get("CPDY_CLI")


@pytest.mark.parametrize(
    "name,dy,cp",
    [("network", "attack", "attack"), ("manual", "safe", "attack"), ("heating", "safe", "attack")],
)
def test_verdict_matrix(name, dy, cp):
    spec = SCENARIOS / f"{name}.cpdy"
    assert cpdy.check(spec, "dy")["verdict"] == dy
    assert cpdy.check(spec, "cpdy")["verdict"] == cp


def test_verdict_schema_and_replay():
    spec = SCENARIOS / "manual.cpdy"
    v = cpdy.check(spec)
    jsonschema.validate(v, SCHEMA)
    assert list(v) == ["verdict", "goal", "profile", "bound", "initial", "steps", "states_explored"]
    assert cpdy.replay(spec, v)
    v["steps"][0]["detail"]["rule"] = "drain"
    with pytest.raises(cpdy.ReplayMismatch):
        cpdy.replay(spec, v)


def test_render_text():
    text = cpdy.render(SCENARIOS / "manual.cpdy")
    assert text.startswith("ATTACK on goal 'no_overflow'")
    assert "attacker manually closes" in text


def test_deduction():
    k = ["scrypt(secret,k1)", "k1"]
    assert cpdy.derivable(k, "secret")
    assert not cpdy.derivable(["scrypt(secret,k1)"], "secret")
    assert "secret" in cpdy.analyze(k)


def test_validate_reports_diagnostics():
    assert cpdy.validate((SCENARIOS / "network.cpdy").read_text()) == []
    diags = cpdy.validate("component Tank\ninit { Tank(level, high) }\n")
    assert any(d["severity"] == "error" for d in diags)
    with pytest.raises(cpdy.SpecError):
        cpdy.check("component Tank\ninit { Tank(level, high) }\n")


def test_print_round_trip():
    src = (SCENARIOS / "heating.cpdy").read_text()
    once = cpdy.print_spec(src)
    assert cpdy.print_spec(once) == once


@pytest.mark.skipif(CLI is None, reason="CPDY_CLI not set")
@pytest.mark.parametrize("name", ["network", "manual", "heating"])
@pytest.mark.parametrize("profile", ["dy", "cpdy"])
def test_cli_json_matches_schema(name, profile):
    r = subprocess.run(
        [CLI, "check", str(SCENARIOS / f"{name}.cpdy"), "--profile", profile, "--format", "json"],
        capture_output=True,
        text=True,
    )
    v = json.loads(r.stdout)
    jsonschema.validate(v, SCHEMA)
    assert r.returncode == (1 if v["verdict"] == "attack" else 0)
    assert v == cpdy.check(SCENARIOS / f"{name}.cpdy", profile)


@pytest.mark.skipif(CLI is None, reason="CPDY_CLI not set")
def test_cli_replay(tmp_path):
    spec = SCENARIOS / "network.cpdy"
    trace = tmp_path / "trace.json"
    trace.write_text(json.dumps(cpdy.check(spec, "dy")))
    r = subprocess.run([CLI, "replay", str(spec), str(trace)], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
