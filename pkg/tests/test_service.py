"""HTTP surface: endpoints, schemas, and the error-kind contract."""

import pytest
from fastapi.testclient import TestClient

from satoggle.service.app import create_app


@pytest.fixture()
def client():
    with TestClient(create_app(), raise_server_exceptions=False) as c:
        yield c


def synth_payload(out_dir):
    return {"model_name": "svc", "seed": 9, "out_dir": str(out_dir),
            "layers": [{"name": "l0", "kind": "cnn-like", "m": 5, "k": 12,
                        "n": 5, "zero_fraction": 0.3}]}


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok"}


def test_synth_simulate_compare_flow(client, tmp_path):
    resp = client.post("/synth", json=synth_payload(tmp_path / "model"))
    assert resp.status_code == 200
    manifest = resp.json()["manifest"]

    for run, flags in (("base", {}), ("prop", {"bic": True, "zvcg": True})):
        resp = client.post("/simulate", json={
            "manifest": manifest, "out_dir": str(tmp_path / run),
            "array": {"rows": 4, "cols": 4, **flags}})
        assert resp.status_code == 200, resp.text
        body = resp.json()
        assert body["model_name"] == "svc"
        assert body["totals"]["macs_performed"] + \
            body["totals"]["macs_skipped"] == 5 * 12 * 5

    resp = client.post("/compare", json={
        "baseline_dir": str(tmp_path / "base"),
        "proposed_dir": str(tmp_path / "prop"),
        "out_dir": str(tmp_path / "cmp")})
    assert resp.status_code == 200
    body = resp.json()
    assert body["overall"]["layer"] == "OVERALL"
    assert "reference_points" in body
    assert (tmp_path / "cmp" / "compare.csv").exists()


def test_analyze_endpoint(client, tmp_path):
    manifest = client.post("/synth", json=synth_payload(tmp_path / "m")).json()["manifest"]
    resp = client.post("/analyze", json={"manifest": manifest,
                                         "out_dir": str(tmp_path / "stats")})
    assert resp.status_code == 200
    assert resp.json()["layers"][0]["name"] == "l0"


def test_missing_manifest_is_404_workload_io(client, tmp_path):
    resp = client.post("/simulate", json={
        "manifest": str(tmp_path / "absent.json"),
        "out_dir": str(tmp_path / "out")})
    assert resp.status_code == 404
    assert resp.json()["detail"]["kind"] == "workload_io"


def test_bad_segments_is_400_bad_request(client, tmp_path):
    manifest = client.post("/synth", json=synth_payload(tmp_path / "m")).json()["manifest"]
    resp = client.post("/simulate", json={
        "manifest": manifest, "out_dir": str(tmp_path / "out"),
        "array": {"segments": "0:99"}})
    assert resp.status_code == 400
    assert resp.json()["detail"]["kind"] == "bad_request"
    assert not (tmp_path / "out").exists()


def test_schema_validation_is_422(client, tmp_path):
    resp = client.post("/synth", json={"model_name": "x", "seed": 0,
                                       "out_dir": str(tmp_path), "layers": []})
    assert resp.status_code == 422
    resp = client.post("/synth", json={
        "model_name": "x", "seed": 0, "out_dir": str(tmp_path),
        "layers": [{"name": "a", "kind": "bogus", "m": 2, "k": 2, "n": 2}]})
    assert resp.status_code == 422
    resp = client.post("/simulate", json={
        "manifest": "m.json", "out_dir": str(tmp_path),
        "array": {"acc_mode": "double"}})
    assert resp.status_code == 422


def test_bad_proxy_config_is_400(client, tmp_path):
    manifest = client.post("/synth", json=synth_payload(tmp_path / "m")).json()["manifest"]
    client.post("/simulate", json={"manifest": manifest,
                                   "out_dir": str(tmp_path / "r"),
                                   "array": {"rows": 4, "cols": 4}})
    resp = client.post("/compare", json={
        "baseline_dir": str(tmp_path / "r"), "proposed_dir": str(tmp_path / "r"),
        "out_dir": str(tmp_path / "c"), "proxy": {"bogus": 1.0}})
    assert resp.status_code == 400
