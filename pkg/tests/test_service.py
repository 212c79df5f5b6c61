"""HTTP service endpoints."""

from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from reprograph import __version__
from reprograph.service.app import create_app


@pytest.fixture(scope="module")
def client() -> TestClient:
    return TestClient(create_app())


@pytest.fixture(scope="module")
def study(client) -> dict:
    response = client.post(
        "/gen",
        json={
            "seed": 4, "scenario": "random_independent", "n_r": 10, "n_models": 3,
            "n_views": 2, "thresholds": [2, 3, 5], "modes": ["cv3", "fs"], "runs_per_cell": 2,
        },
    )
    assert response.status_code == 200
    return response.json()


def test_health(client):
    payload = client.get("/health").json()
    assert payload == {"status": "ok", "version": __version__}


def test_validate_ok(client, study):
    response = client.post(
        "/validate", json={"config": study["config"], "records_jsonl": study["records_jsonl"]}
    )
    payload = response.json()
    assert payload["ok"]
    assert payload["summary"] == {
        "n_r": 10, "n_models": 3, "n_views": 2, "n_modes": 2, "n_records": 24,
    }


def test_validate_reports_all_diagnostics(client, study):
    lines = study["records_jsonl"].splitlines()
    lines[0] = "{broken"
    record = json.loads(lines[1])
    record["weights"] = [1.0]
    lines[1] = json.dumps(record)
    response = client.post(
        "/validate", json={"config": study["config"], "records_jsonl": "\n".join(lines)}
    )
    payload = response.json()
    assert not payload["ok"]
    assert any("line 1" in d for d in payload["diagnostics"])
    assert any("length mismatch" in d for d in payload["diagnostics"])


def test_validate_allow_missing_warns(client, study):
    lines = [
        line
        for line in study["records_jsonl"].splitlines()
        if not line.startswith('{"model": "m3", "view": "v2", "mode": "fs"')
    ]
    body = {"config": study["config"], "records_jsonl": "\n".join(lines)}
    assert not client.post("/validate", json=body).json()["ok"]
    body["allow_missing"] = True
    payload = client.post("/validate", json=body).json()
    assert payload["ok"]
    assert payload["warnings"]


def test_run_returns_report_and_files(client, study):
    response = client.post(
        "/run",
        json={
            "config": study["config"],
            "records_jsonl": study["records_jsonl"],
            "provenance": {"config_path": "c.json", "input_paths": ["s.jsonl"], "out_dir": "out"},
        },
    )
    assert response.status_code == 200
    payload = response.json()
    files = payload["files"]
    for expected in (
        "report.json", "manifest.json", "winner_weights.csv",
        "scores/score_table.csv", "scores/pairwise.json",
        "matrices/cv3__view_average.csv", "matrices/fs__overall.csv",
        "matrices/grand__overall.csv",
    ):
        assert expected in files
    report = payload["report"]
    assert report["grand"]["winner"] in study["config"]["models"]
    manifest = json.loads(files["manifest.json"])
    assert set(manifest["outputs"]) == set(files) - {"manifest.json"}
    assert manifest["config_path"] == "c.json"


def test_run_rejects_bad_input(client, study):
    response = client.post(
        "/run", json={"config": study["config"], "records_jsonl": "{broken"}
    )
    assert response.status_code == 422
    assert response.json()["diagnostics"]


def test_run_rejects_single_view_study(client):
    gen = client.post(
        "/gen",
        json={"seed": 1, "scenario": "random_independent", "n_r": 6, "n_models": 2,
              "n_views": 1, "thresholds": [2], "modes": ["cv3"]},
    ).json()
    response = client.post(
        "/run", json={"config": gen["config"], "records_jsonl": gen["records_jsonl"]}
    )
    assert response.status_code == 400
    assert "views" in response.json()["detail"]


def test_scores_endpoint(client, study):
    response = client.post(
        "/scores", json={"config": study["config"], "records_jsonl": study["records_jsonl"]}
    )
    files = response.json()["files"]
    assert set(files) == {"scores/score_table.csv", "scores/pairwise.json"}
    header = files["scores/score_table.csv"].splitlines()[0]
    assert header == "model,mode,v.a,r.c,a.w.i,a.w.c,s.c,a.r.i,KL,L2"


def test_gen_deterministic(client):
    body = {"seed": 7, "scenario": "scaled_copies", "n_r": 8, "n_models": 3,
            "n_views": 2, "thresholds": [2, 3], "modes": ["cv3"]}
    a = client.post("/gen", json=body).json()
    b = client.post("/gen", json=body).json()
    assert a == b


def test_gen_rejects_invalid_spec(client):
    response = client.post(
        "/gen",
        json={"seed": 0, "scenario": "planted_consensus", "n_r": 5, "n_models": 4,
              "n_views": 2, "thresholds": [5], "modes": ["cv3"]},
    )
    assert response.status_code == 400


def test_select_matches_run(client, study):
    run_files = client.post(
        "/run", json={"config": study["config"], "records_jsonl": study["records_jsonl"]}
    ).json()
    matrices = {
        mode: {
            "view_average": run_files["files"][f"matrices/{mode}__view_average.csv"],
            "rank_correlation": run_files["files"][f"matrices/{mode}__rank_correlation.csv"],
        }
        for mode in ("cv3", "fs")
    }
    response = client.post(
        "/select",
        json={
            "matrices": matrices,
            "config": study["config"],
            "records_jsonl": study["records_jsonl"],
        },
    )
    assert response.status_code == 200
    payload = response.json()
    assert payload["report"]["grand"]["winner"] == run_files["report"]["grand"]["winner"]
    assert "winner_weights.csv" in payload["files"]
    assert payload["files"]["winner_weights.csv"] == run_files["files"]["winner_weights.csv"]


def test_select_rejects_malformed_matrix(client):
    response = client.post(
        "/select",
        json={"matrices": {"cv3": {"view_average": "junk", "rank_correlation": "junk"}}},
    )
    assert response.status_code == 400
