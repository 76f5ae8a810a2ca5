import json

import pytest

from poissonized_rs import cli
from poissonized_rs.suite import CRITERIA_NAMES, REGISTRY, ConfigError, load_config, run_suite


def test_registry_covers_every_criterion():
    assert len(CRITERIA_NAMES) == 11
    assert set(REGISTRY) == set(CRITERIA_NAMES)


def test_schema_rejects_bad_configs(tmp_path):
    with pytest.raises(ConfigError):
        load_config({"seed": -1})
    with pytest.raises(ConfigError):
        load_config({"criteria": ["nonsense"]})
    with pytest.raises(ConfigError):
        load_config({"experiments": [{"model": "discrete", "theta": 0.5, "pins": [[0, [1]]]}]})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_run_suite_report(tmp_path):
    out = tmp_path / "report.json"
    code, report = run_suite(
        {"seed": 5, "criteria": ["karlin_mcgregor", "dimensions"], "output": str(out)}, echo=None
    )
    assert code == 0
    saved = json.loads(out.read_text())
    for key in ("seed", "stream", "samples", "git_describe"):
        assert key in saved
    assert saved["seed"] == 5
    assert [c["name"] for c in saved["criteria"]] == ["karlin_mcgregor", "dimensions"]


def test_run_suite_experiments():
    config = {
        "seed": 1,
        "samples": 5000,
        "experiments": [
            {"model": "continuous", "theta": 1, "pins": [[0, []]]},
            {"model": "discrete", "theta": 0.5, "k": 2, "pins": [[0, [1]]], "samples": 3000},
        ],
    }
    code, report = run_suite(config, echo=None)
    assert code == 0
    assert [e["samples"] for e in report["experiments"]] == [5000, 3000]
    config["experiments"][0]["pins"] = [[-0.5, [1]]]
    with pytest.raises(ConfigError):
        run_suite(config, echo=None)


def test_suite_is_deterministic():
    config = {"seed": 3, "samples": 2000, "experiments": [{"model": "continuous", "theta": 1, "pins": [[0, [1]]]}]}
    a = run_suite(config, echo=None)[1]["experiments"]
    b = run_suite(config, echo=None)[1]["experiments"]
    assert a == b


def test_cli_prob(capsys):
    assert cli.main(["prob", '{"theta": 1, "pins": [[-0.5, [1]], [0, [1]]]}']) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["rational"] == "1/2"
    assert cli.main(["prob", '{"theta": 0.5, "pins": [[0, [1]]]}', "--k", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["exact"] == "50625/262144"
    assert cli.main(["prob", '{"theta": 1, "pins": [[0.5, [1]]]}']) == 2


def test_cli_sample_trajectory_render(tmp_path, capsys):
    samples = tmp_path / "s.jsonl"
    assert cli.main(["sample", "--theta", "2", "--samples", "3", "--seed", "4", "--out", str(samples)]) == 0
    lines = samples.read_text().splitlines()
    assert len(lines) == 3
    assert cli.main(["sample", "--theta", "0.5", "--k", "2", "--samples", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["k"] == 2
    traj = tmp_path / "t.json"
    assert cli.main(["trajectory", str(samples), "--out", str(traj)]) == 0
    assert "events" in json.loads(traj.read_text())
    svg = tmp_path / "f.svg"
    assert cli.main(["render", str(traj), "--out", str(svg)]) == 0
    assert svg.read_text().startswith("<svg")
    assert cli.main(["trajectory", "--theta", "2", "--format", "csv"]) == 0
    assert capsys.readouterr().out.startswith("line_index,event_time,new_value")


def test_cli_verify_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"bogus": true}')
    assert cli.main(["verify", str(bad)]) == 2
    assert cli.main(["verify", "--criteria", "karlin_mcgregor", "--out", str(tmp_path / "r.json")]) == 0
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "--criteria", "nope"])
    assert exc.value.code == 2


def test_cli_lln(capsys):
    code = cli.main(["lln", "--theta", "5", "--taus", "0.99", "--draws", "2", "--format", "json"])
    rows = json.loads(capsys.readouterr().out)
    assert rows[0]["tau"] == 0.99
    assert code in (0, 1)
