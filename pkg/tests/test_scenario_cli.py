"""Scenario files, matrix precomputation and the command-line contract."""

import json
from pathlib import Path

import pytest

import evacrec as ev
from evacrec.cli import main
from evacrec.errors import SchemaViolation
from evacrec.generator import random_scenario_dict
from evacrec.scenario import load_matrix_file, load_scenario


@pytest.fixture
def scenario_path(fixtures_dir) -> Path:
    return fixtures_dir / "compiegne-scenario.json"


def write_json(path: Path, data) -> Path:
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def test_load_scenario_resolves_relative_paths(scenario_path):
    scenario = load_scenario(scenario_path)
    assert len(scenario.snapshot.mobile_resources) == 4
    assert scenario.config.exact_bound == 12


def test_load_scenario_inline_form(tmp_path):
    data = random_scenario_dict(3)
    scenario = load_scenario(write_json(tmp_path / "s.json", data))
    assert scenario.snapshot.crisis is not None


def test_scenario_rejects_unknown_keys(tmp_path):
    data = random_scenario_dict(3)
    data["extra"] = 1
    with pytest.raises(SchemaViolation):
        load_scenario(write_json(tmp_path / "s.json", data))
    bad_solver = random_scenario_dict(3)
    bad_solver["solver"]["typo"] = True
    with pytest.raises(SchemaViolation):
        load_scenario(write_json(tmp_path / "s2.json", bad_solver))


# -- exit-code contract ---------------------------------------------------------


def test_validate_ok(scenario_path, capsys):
    assert main(["validate", str(scenario_path)]) == 0
    assert "scenario ok" in capsys.readouterr().out


def test_validate_unparseable_is_exit_1(tmp_path, capsys):
    bad = tmp_path / "broken.json"
    bad.write_text("{not json", encoding="utf-8")
    assert main(["validate", str(bad)]) == 1
    assert main(["validate", str(tmp_path / "missing.json")]) == 1


def test_validate_violation_is_exit_2(tmp_path, capsys):
    data = random_scenario_dict(5)
    data["snapshot"]["mobile_resources"][0]["vehicle"] = "ghost"
    assert main(["validate", str(write_json(tmp_path / "s.json", data))]) == 2
    out = capsys.readouterr().out
    assert out.count("violation:") == 1


def test_solve_full_coverage_exit_0(scenario_path, tmp_path, capsys):
    out_file = tmp_path / "plan.json"
    assert main(["solve", str(scenario_path), "--output", str(out_file)]) == 0
    plan = json.loads(out_file.read_text())
    assert plan["status"] == "full_coverage"
    assert len(plan["assignments"]) == 3
    assert plan["solver"] == "exact"
    assert "lower_bound_s" not in plan
    stdout = capsys.readouterr().out
    assert "status: full_coverage" in stdout
    assert "mr-alice-minibus" in stdout


def undersized_fleet_scenario() -> dict:
    """Demand 20, fleet capacity 8: partial coverage by construction."""
    return {
        "snapshot": {
            "schema_version": 1,
            "crisis": {"id": "c1", "kind": "flood"},
            "persons": [
                {"id": "d1", "role": "human_resource", "licenses": ["B"]},
                {"id": "d2", "role": "human_resource", "licenses": ["B"]},
            ],
            "vehicles": [
                {"id": "v1", "category": "car", "seats": 5, "required_license": "B"},
                {"id": "v2", "category": "car", "seats": 5, "required_license": "B"},
            ],
            "mobile_resources": [
                {"id": "m1", "driver": "d1", "vehicle": "v1", "position": [49.0, 2.0]},
                {"id": "m2", "driver": "d2", "vehicle": "v2", "position": [49.0, 2.002]},
            ],
            "rescue_points": [
                {"id": "rp1", "position": [49.0, 2.004], "evacuees": 20, "priority": 5}
            ],
            "shelters": [{"id": "sh1", "position": [49.0, 2.006], "capacity": 30}],
        },
        "graph": {
            "nodes": {
                "a": [49.0, 2.0],
                "b": [49.0, 2.002],
                "c": [49.0, 2.004],
                "d": [49.0, 2.006],
            },
            "edges": [
                {"from": f, "to": t, "length_m": 300, "speed_kmh": 30}
                for f, t in [("a", "b"), ("b", "a"), ("b", "c"), ("c", "b"),
                             ("c", "d"), ("d", "c")]
            ],
        },
        "solver": {},
    }


def test_solve_partial_coverage_exit_3(tmp_path, capsys):
    scenario_file = write_json(tmp_path / "s.json", undersized_fleet_scenario())
    code = main(["solve", str(scenario_file), "--output", str(tmp_path / "p.json")])
    assert code == 3
    plan = json.loads((tmp_path / "p.json").read_text())
    assert plan["status"] == "partial_coverage"
    assert plan["uncovered"]["rp1"]["evacuees_left"] == 12


def test_solve_unwritable_output_exit_1(scenario_path, tmp_path):
    assert main(
        ["solve", str(scenario_path), "--output", str(tmp_path / "nodir" / "x" / "p.json")]
    ) == 1


def test_solve_is_deterministic(scenario_path, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["solve", str(scenario_path), "--output", str(a)]) == 0
    assert main(["solve", str(scenario_path), "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_matrix_roundtrip_yields_identical_plans(scenario_path, tmp_path):
    matrix_file = tmp_path / "matrix.json"
    assert main(["matrix", str(scenario_path), "--output", str(matrix_file)]) == 0
    direct = tmp_path / "direct.json"
    cached = tmp_path / "cached.json"
    assert main(["solve", str(scenario_path), "--output", str(direct)]) == 0
    assert main(
        ["solve", str(scenario_path), "--matrix", str(matrix_file), "--output", str(cached)]
    ) == 0
    assert direct.read_bytes() == cached.read_bytes()


def test_matrix_for_zero_places_is_ok(tmp_path):
    data = random_scenario_dict(3)
    data["snapshot"]["mobile_resources"] = []
    data["snapshot"]["rescue_points"] = []
    data["snapshot"]["shelters"] = []
    data["snapshot"]["persons"] = []
    data["snapshot"]["vehicles"] = []
    out = tmp_path / "m.json"
    assert main(["matrix", str(write_json(tmp_path / "s.json", data)), "--output", str(out)]) == 0
    _, to_rp, rp_to_sh = load_matrix_file(out)
    assert to_rp.origins == () and rp_to_sh.destinations == ()


def test_stale_matrix_is_exit_2(tmp_path):
    data = random_scenario_dict(3)
    scenario_file = write_json(tmp_path / "s.json", data)
    matrix_file = tmp_path / "matrix.json"
    assert main(["matrix", str(scenario_file), "--output", str(matrix_file)]) == 0
    # Move a rescue point: the cached matrix no longer matches.
    data["snapshot"]["rescue_points"][0]["position"] = [49.41, 2.84]
    write_json(scenario_file, data)
    code = main(["solve", str(scenario_file), "--matrix", str(matrix_file),
                 "--output", str(tmp_path / "p.json")])
    assert code == 2


def test_oracle_fixture_match_exit_0(scenario_path, capsys):
    assert main(["oracle", str(scenario_path)]) == 0
    out = capsys.readouterr().out
    assert "solver objective" in out and "oracle objective" in out


def test_oracle_random_batch(capsys):
    assert main(["--seed", "5", "oracle", "--random", "15"]) == 0
    assert "15/15 matches" in capsys.readouterr().out


def test_oracle_oversized_exit_5(tmp_path):
    data = random_scenario_dict(3)
    snap = data["snapshot"]
    # Clone resources beyond the enumeration guard.
    while len(snap["mobile_resources"]) < 7:
        i = len(snap["mobile_resources"])
        snap["persons"].append({"id": f"dx{i}", "role": "human_resource", "licenses": ["B"]})
        snap["vehicles"].append(
            {"id": f"vx{i}", "category": "car", "seats": 5, "required_license": "B"}
        )
        snap["mobile_resources"].append(
            {"id": f"mx{i}", "driver": f"dx{i}", "vehicle": f"vx{i}",
             "position": snap["mobile_resources"][0]["position"]}
        )
    assert main(["oracle", str(write_json(tmp_path / "s.json", data))]) == 5


def test_solve_matches_fixture_expectations(scenario_path):
    scenario = load_scenario(scenario_path)
    instance = ev.scenario_instance(scenario)
    plan = ev.solve(instance, scenario.config)
    assert plan.objective == (0, 520, 3)
    assert [a.resource for a in plan.assignments] == [
        "mr-alice-minibus", "mr-chen-boat", "mr-dana-car",
    ]
    best = min(obj for _, obj in ev.enumerate_all(instance))
    assert best == plan.objective
