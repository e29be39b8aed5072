"""Command-line front end: scenarios, reports, refusals, exit codes."""

import json
from pathlib import Path

import pytest

from nichols import cli

SCENARIOS = Path(cli.__file__).parent / "scenarios"

A2_CASE = {"label": "a2", "diagonal": [["z3^1", "1"], ["z3^2", "z3^1"]]}

FK3_GROUP = {"type": "permutation", "degree": 3,
             "generators": [[2, 1, 3], [2, 3, 1]]}
FK3_NUMERATION = {"members": [[2, 1, 3], [1, 3, 2], [3, 2, 1]],
                  "reps": [[1, 2, 3], [2, 3, 1], [3, 1, 2]]}


def fk3_module_spec(name, numeration=True):
    spec = {"name": name, "class_rep": [2, 1, 3],
            "rho": {"values": {"2,1,3": "-1"}}}
    if numeration:
        spec["numeration"] = FK3_NUMERATION
    return spec


def write_scenario(tmp_path, payload, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def run_json(capsys, argv):
    code = cli.main(argv + ["--json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


# -- bundled scenarios


def test_bundled_fk3_scenario(capsys):
    code, report = run_json(capsys, ["hilbert", str(SCENARIOS / "s3_fk3.json")])
    assert code == 0
    assert report["spec_version"] == "1.0"
    assert report["task"] == "hilbert"
    assert report["scenario"] == "s3_fk3.json"
    assert len(report["scenario_sha256"]) == 64
    result, = report["results"]
    assert result["label"] == "fk3"
    assert result["dims"] == [1, 3, 4, 3, 1]
    assert result["finished"] is True
    assert result["total"] == 12


def test_bundled_s4_scenario_three_totals(capsys):
    code, report = run_json(capsys,
                            ["hilbert", str(SCENARIOS / "s4_all_three.json")])
    assert code == 0
    assert [r["label"] for r in report["results"]] == \
        ["transpositions-sign", "transpositions-mixed", "four-cycles"]
    for result in report["results"]:
        assert result["finished"] is True
        assert result["total"] == 576


def test_bundled_dn_obstruction_scenario(capsys):
    code, report = run_json(capsys,
                            ["derive", str(SCENARIOS / "dn_obstruction.json")])
    assert code == 0
    result, = report["results"]
    assert result["value"] == "-v5"
    assert result["is_zero"] is False
    assert result["degree"] == 1
    probe = result["cartan_probe"]
    assert probe["entry"] == {"unbounded_at_cap": 3, "chain_reached": 3}
    assert probe["verdict"] == "a[1,2] <= -2"


def test_reports_are_byte_identical(capsys):
    path = str(SCENARIOS / "s3_fk3.json")
    cli.main(["hilbert", path, "--json"])
    first = capsys.readouterr().out
    cli.main(["hilbert", path, "--json"])
    second = capsys.readouterr().out
    assert first == second


# -- tasks on ad-hoc scenarios


def test_groupoid_report(tmp_path, capsys):
    path = write_scenario(tmp_path, {"task": "groupoid", "cap": 6,
                                     "cases": [A2_CASE]})
    code, report = run_json(capsys, ["groupoid", path])
    assert code == 0
    result, = report["results"]
    assert len(result["nodes"]) == 6
    assert len(result["edges"]) == 12
    assert result["partial"] is False
    assert result["standard"]["status"] == "standard"
    assert result["finite_type"] == {"finite": True, "label": "A2"}


def test_roots_report(tmp_path, capsys):
    path = write_scenario(tmp_path, dict(A2_CASE, cap=6))
    code, report = run_json(capsys, ["roots", path])
    assert code == 0
    result, = report["results"]
    assert result["count"] == 6
    assert result["partial"] is False
    assert [tuple(r) for r in result["roots"]] == \
        sorted([(1, 0), (0, 1), (1, 1), (-1, 0), (0, -1), (-1, -1)])


def test_cartan_report_and_csv(tmp_path, capsys):
    path = write_scenario(tmp_path, dict(A2_CASE, cap=6))
    out = tmp_path / "report.json"
    code = cli.main(["cartan", path, "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["results"][0]["cartan"] == [[2, -1], [-1, 2]]
    assert report["results"][0]["exact"] is True
    csv_text = (tmp_path / "report.csv").read_text()
    assert csv_text.splitlines()[0] == "label,row,col,entry"
    assert "a2,1,2,-1" in csv_text.splitlines()


def test_hilbert_csv_and_unfinished_total(tmp_path, capsys):
    path = write_scenario(tmp_path, {
        "group": FK3_GROUP, "field_conductor": 1,
        "modules": [fk3_module_spec("x")]})
    out = tmp_path / "fk3.json"
    code = cli.main(["hilbert", path, "--cap", "2", "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["cap"] == 2
    assert report["results"][0]["finished"] is False
    assert report["results"][0]["total"] is None
    lines = (tmp_path / "fk3.csv").read_text().splitlines()
    assert lines == ["label,degree,dim", "case1,0,1", "case1,1,3",
                     "case1,2,4", "case1,total,"]


def test_reflect_report(tmp_path, capsys):
    path = write_scenario(tmp_path, dict(A2_CASE, cap=6, index=1))
    code, report = run_json(capsys, ["reflect", path])
    assert code == 0
    result, = report["results"]
    assert result["index"] == 1
    assert result["s_matrix"] == [[-1, 1], [0, 1]]
    assert result["reflected_block_dims"] == [1, 1]
    assert result["fingerprints"] != result["reflected_fingerprints"]


def test_derive_pinned_numeration_witness(tmp_path, capsys):
    path = write_scenario(tmp_path, {
        "task": "derive", "cap": 3,
        "group": FK3_GROUP, "field_conductor": 1,
        "modules": [fk3_module_spec("x"), fk3_module_spec("y")],
        "expression": "(d x3 (d y1 (ad x2 (ad x1 y2))))"})
    code, report = run_json(capsys, ["derive", path])
    assert code == 0
    assert report["results"][0]["value"] == "-x2"


def test_numeration_override_flag(tmp_path, capsys):
    path = write_scenario(tmp_path, {
        "task": "derive", "cap": 3,
        "group": FK3_GROUP, "field_conductor": 1,
        "modules": [fk3_module_spec("x", numeration=False),
                    fk3_module_spec("y", numeration=False)],
        "expression": "(d x3 (d y1 (ad x2 (ad x1 y2))))"})
    override = tmp_path / "numeration.json"
    override.write_text(json.dumps([FK3_NUMERATION, FK3_NUMERATION]))
    code, report = run_json(capsys,
                            ["derive", path, "--numeration", str(override)])
    assert code == 0
    assert report["results"][0]["value"] == "-x2"
    # a partial override list is allowed; entries must not outnumber modules
    override.write_text(json.dumps([FK3_NUMERATION, None, FK3_NUMERATION]))
    assert cli.main(["derive", path, "--numeration", str(override)]) == 2


# -- refusals and exit codes


def refusal_payload(capsys, argv):
    code = cli.main(argv + ["--json"])
    captured = capsys.readouterr()
    assert "refused" in captured.err
    return code, json.loads(captured.out)


def test_task_mismatch_is_refused(tmp_path, capsys):
    path = write_scenario(tmp_path, {"task": "groupoid", "cases": [A2_CASE]})
    code, payload = refusal_payload(capsys, ["roots", path])
    assert code == 2
    assert payload["error"] == "scenario-error"


def test_unknown_field_is_refused(tmp_path, capsys):
    path = write_scenario(tmp_path, dict(A2_CASE, caps=6))
    code, payload = refusal_payload(capsys, ["hilbert", path])
    assert code == 2
    assert payload["details"]["field"] == "caps"


def test_malformed_json_is_refused(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"task": "hilbert",}')
    code, payload = refusal_payload(capsys, ["hilbert", str(path)])
    assert code == 2
    assert payload["details"]["line"] == 1


def test_missing_file_is_refused(capsys):
    code, payload = refusal_payload(capsys, ["hilbert", "/nonexistent.json"])
    assert code == 2
    assert payload["error"] == "scenario-error"


def test_uncertified_reflection_is_refused(tmp_path, capsys):
    path = write_scenario(tmp_path, {
        "cap": 3, "group": FK3_GROUP, "field_conductor": 1,
        "modules": [fk3_module_spec("x"), fk3_module_spec("y")]})
    code, payload = refusal_payload(capsys, ["reflect", path])
    assert code == 2
    assert payload["error"] == "reflection-not-certified"


def test_derive_without_expression_is_refused(tmp_path, capsys):
    path = write_scenario(tmp_path, dict(A2_CASE))
    code, payload = refusal_payload(capsys, ["derive", path])
    assert code == 2
    assert payload["error"] == "scenario-error"


def test_mem_limit_env(tmp_path, capsys, monkeypatch):
    path = write_scenario(tmp_path, {
        "group": FK3_GROUP, "field_conductor": 1,
        "modules": [fk3_module_spec("x")]})
    monkeypatch.setenv("NICHOLS_MEM_LIMIT", "10")
    code, payload = refusal_payload(capsys, ["hilbert", path])
    assert code == 2
    assert payload["error"] == "memory-guard"
    monkeypatch.setenv("NICHOLS_MEM_LIMIT", "lots")
    code, payload = refusal_payload(capsys, ["hilbert", path])
    assert code == 2
    assert payload["error"] == "scenario-error"


def test_bad_cap_is_refused(tmp_path, capsys):
    path = write_scenario(tmp_path, dict(A2_CASE))
    code, payload = refusal_payload(capsys, ["hilbert", path, "--cap", "0"])
    assert code == 2
    assert payload["error"] == "scenario-error"


# -- the regression matrix


def test_verify_paper_all_pass(capsys):
    code, report = run_json(capsys, ["verify-paper"])
    assert code == 0
    assert report["task"] == "verify-paper"
    assert report["failed"] == 0
    assert report["passed"] == 11
    statuses = {row["check"]: row["status"] for row in report["results"]}
    assert len(statuses) == 11
    assert set(statuses.values()) == {"PASS"}
    locations = [row["location"] for row in report["results"]]
    assert "Table 1" in locations


def test_verify_paper_matrix_lines(capsys):
    code = cli.main(["verify-paper"])
    out = capsys.readouterr().out
    assert code == 0
    lines = [line for line in out.splitlines() if line.startswith("PASS")]
    assert len(lines) == 11
