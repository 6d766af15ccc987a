import json
from pathlib import Path

import pytest

from geoergodic import cli

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def write(tmp_path, config, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(config))
    return str(path)


def test_triangle_demo(tmp_path):
    code = cli.main(["triangle-demo", "--config", str(CONFIGS / "triangle.json"),
                     "--out", str(tmp_path), "--format", "both"])
    assert code == cli.EXIT_PASS
    report = json.loads((tmp_path / "triangle_demo_report.json").read_text())
    assert report["status"] == "pass" and report["results"]["n_max"] == 10
    rows = (tmp_path / "triangle_demo_triangles.csv").read_text().splitlines()
    assert len(rows) == 10


def test_drift_translation_reports_one(tmp_path):
    code = cli.main(["drift", "--config", str(CONFIGS / "drift_translation.json"), "--out", str(tmp_path)])
    assert code == cli.EXIT_PASS
    report = json.loads((tmp_path / "drift_report.json").read_text())
    assert report["results"]["A"] == pytest.approx(1.0) and report["results"]["status"] == "ok"


def test_reports_are_byte_identical_and_replayable(tmp_path):
    cfg = str(CONFIGS / "drift_walk.json")
    cli.main(["drift", "--config", cfg, "--out", str(tmp_path / "a")])
    cli.main(["drift", "--config", cfg, "--out", str(tmp_path / "b")])
    a = (tmp_path / "a" / "drift_report.json").read_bytes()
    assert a == (tmp_path / "b" / "drift_report.json").read_bytes()
    report = json.loads(a)
    assert report["seed"] == 6 and len(report["config_hash"]) == 64


def test_seed_override_changes_hash(tmp_path):
    cfg = str(CONFIGS / "drift_walk.json")
    cli.main(["drift", "--config", cfg, "--out", str(tmp_path / "a")])
    cli.main(["drift", "--config", cfg, "--seed", "17", "--out", str(tmp_path / "b")])
    a = json.loads((tmp_path / "a" / "drift_report.json").read_text())
    b = json.loads((tmp_path / "b" / "drift_report.json").read_text())
    assert b["seed"] == 17 and a["config_hash"] != b["config_hash"]


def test_unknown_field_is_config_error(tmp_path):
    path = write(tmp_path, {"seed": 1, "drift": {"n_grid": [10], "typo": 1}})
    assert cli.main(["drift", "--config", path, "--out", str(tmp_path)]) == cli.EXIT_CONFIG


def test_bad_space_is_config_error(tmp_path):
    path = write(tmp_path, {"seed": 1, "space": {"kind": "torus"}})
    assert cli.main(["modulus", "--config", path, "--out", str(tmp_path)]) == cli.EXIT_CONFIG


def test_audit_failure_exit_code(tmp_path):
    path = write(tmp_path, {"seed": 1, "space": {"kind": "sphericalTriangle", "n": 2},
                            "check": {"notions": [{"notion": "busemann", "n_samples": 5000}]}})
    assert cli.main(["convexity-check", "--config", path, "--out", str(tmp_path)]) == cli.EXIT_FAIL


def test_inconclusive_exit_code(tmp_path):
    path = write(tmp_path, {"seed": 1, "space": {"kind": "euclidean", "dim": 2},
                            "family": {"generators": [{"type": "translation", "vector": [1, 0]},
                                                      {"type": "translation", "vector": [-1, 0]}]},
                            "system": {"probabilities": [0.5, 0.5]},
                            "ray": {"horizon": 400, "n_paths": 50}})
    assert cli.main(["ray", "--config", path, "--out", str(tmp_path)]) == cli.EXIT_INCONCLUSIVE


def test_modulus_oracle(tmp_path):
    path = write(tmp_path, {"seed": 1, "space": {"kind": "euclidean", "dim": 2},
                            "modulus": {"eps": [1.0], "radii": [1.0], "n_samples": 8192,
                                        "oracle": "cat0"}})
    assert cli.main(["modulus", "--config", path, "--out", str(tmp_path), "--format", "csv"]) == 0
    assert (tmp_path / "modulus_modulus.csv").exists()
    assert not (tmp_path / "modulus_report.json").exists()


def test_ray_short_reference(tmp_path):
    cfg = json.loads((CONFIGS / "ray_reference.json").read_text())
    cfg["ray"].update(horizon=2000, depth=2, n_grid=[500, 1000, 2000], n_paths=100)
    path = write(tmp_path, cfg)
    assert cli.main(["ray", "--config", path, "--out", str(tmp_path), "--format", "both"]) == 0
    header = (tmp_path / "ray_residuals.csv").read_text().splitlines()[0]
    assert header == "k,i,Ak,residual,final_bound,claim2,claim2_bound,passed"
