import json
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from k3cone import cli
from k3cone.claims import REGISTRY, recheck_entry, run_claims
from k3cone.report import ClaimReport, dumps, emit_report, report_dict
from k3cone.scenario import (
    Scenario,
    ScenarioDegenerateError,
    ScenarioParseError,
    ScenarioSchemaError,
    dump_scenario,
    load_scenario,
    loads,
)

CHEAP = ["C03", "C04", "C05", "C06", "C08", "C09"]


def _scn(**over):
    d = {"name": "t", "surface_gram": [[6, 8], [8, 6]], "hilb_n": 3, "polarizations": [[1, 0], [0, 1]]}
    d.update(over)
    return d


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# scenarios


def test_builtins():
    s = load_scenario("hilb3-deg6")
    assert s.surface_gram == ((6, 8), (8, 6)) and s.hilb_n == 3
    assert len(s.claim_ids) == 23
    s2 = load_scenario("hilb2-deg4")
    assert s2.surface_gram == ((4, 7), (7, 4)) and s2.hilb_n == 2


def test_scenario_round_trip():
    s = load_scenario("hilb3-deg6")
    assert loads(dump_scenario(s)) == s


@pytest.mark.parametrize(
    "text, exc",
    [
        ("{not json", ScenarioParseError),
        ("[]", ScenarioSchemaError),
        (json.dumps(_scn(extra=1)), ScenarioSchemaError),
        (json.dumps({"name": "t"}), ScenarioSchemaError),
        (json.dumps(_scn(surface_gram=[[6, 6], [6, 6]])), ScenarioDegenerateError),
        (json.dumps(_scn(surface_gram=[[6, 8.5], [8.5, 6]])), ScenarioSchemaError),
        (json.dumps(_scn(hilb_n=1)), ScenarioSchemaError),
        (json.dumps(_scn(claim_ids=["C99"])), ScenarioSchemaError),
        (json.dumps(_scn(mori_generators=[[1, 2]])), ScenarioSchemaError),
        (json.dumps(_scn(curve_denominators=[1, 2])), ScenarioSchemaError),
        (json.dumps(_scn(orbit_steps=0)), ScenarioSchemaError),
    ],
)
def test_scenario_errors(text, exc):
    with pytest.raises(exc):
        loads(text)


def test_missing_scenario_file(tmp_path):
    with pytest.raises(ScenarioParseError):
        load_scenario(tmp_path / "nope.json")


# verify and recheck


def test_verify_all_and_recheck(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, _, err = run_cli(capsys, "verify", "--scenario", "hilb3-deg6", "--report", str(report))
    assert code == 0
    assert "20/23 pass, 0 fail, 3 assumed" in err
    data = json.loads(report.read_text())
    assert {e["status"] for e in data["claims"]} == {"pass", "assumed-by-paper"}
    code, out, _ = run_cli(capsys, "recheck", "--report", str(report))
    assert code == 0
    assert all(r["agrees"] for r in json.loads(out)["rechecks"])


def test_verify_is_byte_stable(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run_cli(capsys, "verify", "--claims", "C04,C07,C12", "--report", str(p))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_single_claim_certificate(capsys):
    code, out, _ = run_cli(capsys, "verify", "--claims", "C04")
    entry = json.loads(out)["claims"][0]
    assert code == 0 and entry["id"] == "C04-f-star"
    assert entry["certificate"]["f_star"] == [["27", "12", "16"], ["-18", "-7", "-10"], ["-8", "-4", "-5"]]


def test_deg4_cross_scenario(capsys):
    code, out, _ = run_cli(capsys, "verify", "--scenario", "hilb2-deg4")
    assert code == 0
    assert [e["status"] for e in json.loads(out)["claims"]] == ["pass"] * 3


def test_tampered_certificate_fails_recheck(capsys, tmp_path):
    report = tmp_path / "r.json"
    run_cli(capsys, "verify", "--claims", "C04,C05", "--report", str(report))
    data = json.loads(report.read_text())
    data["claims"][0]["certificate"]["f_star"][0][0] = "28"
    data["claims"][1]["certificate"]["square"] = "-83"
    report.write_text(json.dumps(data))
    code, out, _ = run_cli(capsys, "recheck", "--report", str(report))
    assert code == 2
    assert [r["rechecked"] for r in json.loads(out)["rechecks"]] == ["fail", "fail"]


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--claims", "C77"],
        ["verify", "--scenario", "/nonexistent.json"],
        ["cone-dual", "--scenario", "hilb2-deg4"],
        ["conic", "--gram", "6,8;8", "--target", "1"],
        ["conic", "--gram", "6,8;8,6", "--target", "1", "--bound", "0"],
        ["pell", "--d", "9", "--target", "1"],
        ["isotropy", "--gram", "1,0;0,1", "--bound", "5"],
        ["recheck", "--report", "/nonexistent.json"],
    ],
)
def test_input_errors_exit_3(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 3 and "error" in err


def test_bad_scenario_files_exit_3(capsys, tmp_path):
    for i, text in enumerate(["{", json.dumps(_scn(surface_gram=[[6, 6], [6, 6]])), json.dumps(_scn(x=1))]):
        p = tmp_path / f"s{i}.json"
        p.write_text(text)
        assert run_cli(capsys, "verify", "--scenario", str(p))[0] == 3


def test_failing_claim_exits_2(capsys):
    code, out, _ = run_cli(capsys, "periodicity", "--class", "2,-7,2")
    assert code == 2 and json.loads(out)["status"] == "fail"


def test_tools(capsys):
    code, out, _ = run_cli(capsys, "conic", "--gram", "6,8;8,6", "--target", "-2", "--bound", "5")
    assert code == 0 and [2, -1] in json.loads(out)["solutions"]
    code, out, _ = run_cli(capsys, "isotropy", "--gram", "3,4,0;4,3,0;0,0,-2", "--bound", "50", "--descent")
    assert code == 0 and json.loads(out)["verdict"] == "anisotropic"
    code, out, _ = run_cli(capsys, "pell", "--d", "7", "--target", "-3", "--bound", "40")
    assert json.loads(out)["solutions"] == [[2, -1], [2, 1], [5, -2], [5, 2], [37, -14], [37, 14]]
    code, out, _ = run_cli(capsys, "cone-dual")
    assert code == 0 and len(json.loads(out)["dual"]["rays"]) == 5
    code, out, _ = run_cli(capsys, "mori-replay", "--squares", "-2")
    assert code == 0 and json.loads(out)["status"] == "pass"
    code, out, _ = run_cli(capsys, "invariant-divisors")
    assert code == 0


def test_figures_are_written(capsys, tmp_path):
    code, _, err = run_cli(capsys, "verify", "--claims", "C04", "--figures", str(tmp_path))
    assert code == 0
    for name in ("mori_section.png", "orbit_growth.png"):
        f = tmp_path / name
        assert f.exists() and f.read_bytes()[:4] == b"\x89PNG"
        assert name in err
    code, _, _ = run_cli(capsys, "orbit", "--steps", "8", "--figures", str(tmp_path / "o"))
    assert code == 0 and any((tmp_path / "o").glob("*.png"))


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "k3cone", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "k3cone" in res.stdout


def test_emit_report(tmp_path):
    p = tmp_path / "x.json"
    text = emit_report([ClaimReport("C01-x", "pass", {"a": 1})], p, "s")
    assert p.read_text() == text
    assert json.loads(text)["claims"][0]["id"] == "C01-x"


def test_registry_ids_are_unique():
    ids = [c.claim_id for c in REGISTRY.values()]
    assert len(ids) == len(set(ids)) == 23


# determinism and recheck round trip on random lattices

_grams = st.tuples(st.integers(2, 6), st.integers(-30, 30)).filter(lambda t: abs(t[1]) != 2 * t[0])


@pytest.mark.property_suite
@settings(max_examples=1000)
@given(g=_grams, claim=st.sampled_from(CHEAP))
def test_report_determinism_and_recheck_round_trip(g, claim):
    n, b = g
    scn = Scenario.from_dict(_scn(surface_gram=[[2 * n, b], [b, 2 * n]], hilb_n=n))
    first = dumps(report_dict(scn.name, run_claims(scn, [claim]), "t"))
    second = dumps(report_dict(scn.name, run_claims(scn, [claim]), "t"))
    assert first == second
    (entry,) = json.loads(first)["claims"]
    assert recheck_entry(entry) == entry["status"]


@pytest.mark.parametrize("argv", [[], ["verify", "--bogus"], ["pell", "--d", "x", "--target", "1"]])
def test_usage_errors_exit_3(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 3
