import json
import os
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from e2e_fixture import EDITED_BODY, build_app, collect_transcript

GOLDEN = Path(__file__).parent / "data" / "golden_transcript.json"


@pytest.fixture
def service(tmp_path):
    app, state = build_app(tmp_path)
    with TestClient(app) as client:
        yield client, state, tmp_path


def test_no_session_then_assignment_created(service):
    client, state, _ = service
    response = client.get("/assignment")
    assert response.status_code == 200
    body = response.json()
    assert body["session_id"] == "s-0001"
    assert body["question_id"] == 114
    assert body["state"] == "drafted"
    assert body["draft"]["snippet"].startswith("long alpha")


def test_second_get_returns_same_session(service):
    client, _, _ = service
    first = client.get("/assignment").json()
    second = client.get("/assignment").json()
    assert first == second


def test_post_view(service):
    client, _, _ = service
    response = client.get("/posts/114")
    assert response.status_code == 200
    body = response.json()
    assert body["question_id"] == 114
    assert body["tags"] == ["java"]
    assert len(body["answers"]) == 1
    assert client.get("/posts/424242").status_code == 404


def test_put_answer_then_approve_flows_into_outbox(service):
    client, state, _ = service
    session_id = client.get("/assignment").json()["session_id"]
    response = client.put(f"/assignment/{session_id}/answer", json={"body": EDITED_BODY})
    assert response.status_code == 200
    assert response.json()["edited_body"] == EDITED_BODY
    approve = client.post(f"/assignment/{session_id}/approve")
    assert approve.status_code == 200
    assert approve.json()["answer_body"] == EDITED_BODY
    assert approve.json()["mode"] == "dry_run"
    records = state.outbox.records()
    assert len(records) == 1
    assert records[0]["answer_body"] == EDITED_BODY


def test_empty_answer_body_422(service):
    client, _, _ = service
    session_id = client.get("/assignment").json()["session_id"]
    assert client.put(f"/assignment/{session_id}/answer", json={"body": ""}).status_code == 422


def test_approve_without_body_uses_draft_snippet(service):
    client, state, _ = service
    session = client.get("/assignment").json()
    approve = client.post(f"/assignment/{session['session_id']}/approve")
    assert approve.status_code == 200
    assert session["draft"]["snippet"] in approve.json()["answer_body"]


def test_illegal_transitions_409(service):
    client, _, _ = service
    session_id = client.get("/assignment").json()["session_id"]
    client.post(f"/assignment/{session_id}/approve")
    assert client.post(f"/assignment/{session_id}/approve").status_code == 409
    assert (
        client.put(f"/assignment/{session_id}/answer", json={"body": "x"}).status_code == 409
    )
    assert client.post(f"/assignment/{session_id}/draft").status_code == 409


def test_unknown_session_404(service):
    client, _, _ = service
    assert client.post("/assignment/s-9999/approve").status_code == 404
    assert client.put("/assignment/s-9999/answer", json={"body": "x"}).status_code == 404


def test_decline_frees_slot_but_rate_limit_holds(service):
    client, _, _ = service
    session_id = client.get("/assignment").json()["session_id"]
    response = client.post(f"/assignment/{session_id}/decline")
    assert response.status_code == 200
    assert response.json()["state"] == "declined"
    # rate limit already consumed by the first assignment
    follow_up = client.get("/assignment")
    assert follow_up.status_code == 204
    assert follow_up.headers["X-No-Candidate-Reason"] == "rate_limited"


def test_settings_round_trip(service):
    client, _, _ = service
    settings = client.get("/settings").json()
    assert settings["weights"] == {"code": 0.5, "api": 0.3, "text": 0.2}
    updated = client.put(
        "/settings",
        json={"max_suggestions_per_day": 3, "weights": {"code": 0.6, "api": 0.2, "text": 0.2}},
    )
    assert updated.status_code == 200
    assert updated.json()["max_suggestions_per_day"] == 3
    assert updated.json()["weights"]["code"] == 0.6


def test_settings_bad_weights_422(service):
    client, _, _ = service
    response = client.put("/settings", json={"weights": {"code": 0.9, "api": 0.9, "text": 0.9}})
    assert response.status_code == 422


def test_draft_regeneration(service):
    client, _, _ = service
    session_id = client.get("/assignment").json()["session_id"]
    response = client.post(f"/assignment/{session_id}/draft")
    assert response.status_code == 200
    assert response.json()["draft"]["snippet"]


def test_golden_transcript_reproduced_across_three_runs(tmp_path):
    transcripts = []
    for run in range(3):
        root = tmp_path / f"run{run}"
        root.mkdir()
        app, _ = build_app(root)
        with TestClient(app) as client:
            transcripts.append(collect_transcript(client, root))
    assert transcripts[0] == transcripts[1] == transcripts[2]

    if os.environ.get("REGEN_GOLDEN") or not GOLDEN.exists():
        GOLDEN.write_text(json.dumps(transcripts[0], indent=2, sort_keys=True), encoding="utf-8")
    golden = json.loads(GOLDEN.read_text(encoding="utf-8"))
    assert json.loads(json.dumps(transcripts[0], sort_keys=True)) == golden
