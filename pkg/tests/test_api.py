from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

import wordcraft.errors as errors_module
from scenario_driver import drive_walkthrough, wait_for_job
from wordcraft.api import build_app
from wordcraft.config import AppConfig
from wordcraft.errors import ConfigError, WordcraftError, error_registry


def make_client(tmp_path, **overrides) -> TestClient:
    config = AppConfig(data_dir=str(tmp_path), mock_provider=True, **overrides)
    return TestClient(build_app(config))


def test_healthz_reports_mock_mode(tmp_path):
    client = make_client(tmp_path)
    body = client.get("/healthz").json()
    assert body["status"] == "ok"
    assert body["provider_mode"] == "mock"
    assert body["profile"] == "zh-en"


def test_unusable_data_dir_is_config_error(tmp_path):
    blocker = tmp_path / "occupied"
    blocker.write_text("a file, not a directory", encoding="utf-8")
    with pytest.raises(ConfigError):
        build_app(AppConfig(data_dir=str(blocker / "data"), mock_provider=True))


def test_unknown_config_key_rejected(tmp_path):
    cfg = tmp_path / "conf.json"
    cfg.write_text('{"no_such_key": 1}', encoding="utf-8")
    with pytest.raises(ConfigError):
        AppConfig.load(cfg)


def test_unknown_route_is_not_found_code(tmp_path):
    client = make_client(tmp_path)
    body = client.get("/definitely/not/here")
    assert body.status_code == 404
    assert body.json()["error"]["code"] == "NOT_FOUND"


def test_validation_error_code_on_bad_body(tmp_path):
    client = make_client(tmp_path)
    response = client.post("/sessions", json={"word_id": "labyrinth"})
    assert response.status_code == 422
    assert response.json()["error"]["code"] == "VALIDATION_ERROR"


def test_session_crud_and_error_codes(tmp_path):
    client = make_client(tmp_path)
    created = client.post("/sessions", json={"word_id": "labyrinth", "sense_id": "maze"})
    assert created.status_code == 200
    session_id = created.json()["session_id"]
    assert created.json()["stage"] == "overview"

    fetched = client.get(f"/sessions/{session_id}")
    assert fetched.json()["word_id"] == "labyrinth"

    missing = client.get("/sessions/s-9999")
    assert missing.status_code == 404
    assert missing.json()["error"]["code"] == "UNKNOWN_SESSION"

    unknown_sense = client.post(
        "/sessions", json={"word_id": "labyrinth", "sense_id": "nope"}
    )
    assert unknown_sense.status_code == 404
    assert unknown_sense.json()["error"]["code"] == "UNKNOWN_SENSE"


def test_segment_overlap_maps_to_422(tmp_path):
    client = make_client(tmp_path)
    session_id = client.post(
        "/sessions", json={"word_id": "labyrinth", "sense_id": "maze"}
    ).json()["session_id"]
    assert client.post(
        f"/sessions/{session_id}/segments", json={"start": 0, "end": 3}
    ).status_code == 200
    overlapping = client.post(
        f"/sessions/{session_id}/segments", json={"start": 2, "end": 5}
    )
    assert overlapping.status_code == 422
    assert overlapping.json()["error"]["code"] == "OVERLAP_ERROR"


def test_image_gating_returns_409_with_missing_list(tmp_path):
    client = make_client(tmp_path)
    session_id = client.post(
        "/sessions", json={"word_id": "labyrinth", "sense_id": "maze"}
    ).json()["session_id"]
    response = client.post(
        f"/sessions/{session_id}/image", json={"style": "pixar_animation"}
    )
    assert response.status_code == 409
    error = response.json()["error"]
    assert error["code"] == "RECALL_PATH_INCOMPLETE"
    assert error["details"]["missing_nodes"] == ["迷宫"]


def test_keyword_replace_endpoint_synchronizes(tmp_path):
    client = make_client(tmp_path)
    session_id = client.post(
        "/sessions", json={"word_id": "labyrinth", "sense_id": "maze"}
    ).json()["session_id"]
    segment = client.post(
        f"/sessions/{session_id}/segments", json={"start": 0, "end": 3}
    ).json()["segment"]
    choice = client.post(
        f"/sessions/{session_id}/segments/{segment['segment_id']}/keywords/select",
        json={"keyword": "喇叭", "explanation": "speaker"},
    ).json()["choice"]
    replaced = client.post(
        f"/sessions/{session_id}/keywords/{choice['keyword_id']}/replace",
        json={"keyword": "蜡笔", "explanation": "crayon"},
    ).json()
    assert replaced["choice"]["keyword"] == "蜡笔"
    labels = [n["label"] for n in replaced["session"]["map"]["nodes"]]
    assert "蜡笔" in labels and "喇叭" not in labels
    missing = client.post(
        f"/sessions/{session_id}/keywords/kw-99/replace", json={"keyword": "x"}
    )
    assert missing.status_code == 404
    assert missing.json()["error"]["code"] == "UNKNOWN_KEYWORD"


def test_tick_endpoint_accumulates(tmp_path):
    client = make_client(tmp_path)
    session_id = client.post(
        "/sessions", json={"word_id": "labyrinth", "sense_id": "maze"}
    ).json()["session_id"]
    client.post(f"/sessions/{session_id}/tick", json={"delta_ms": 1500})
    body = client.post(f"/sessions/{session_id}/tick", json={"delta_ms": 500}).json()
    assert body["total_active_ms"] == 2000


def test_sessions_survive_restart_from_disk(tmp_path):
    client = make_client(tmp_path)
    session_id = client.post(
        "/sessions", json={"word_id": "labyrinth", "sense_id": "maze"}
    ).json()["session_id"]
    client.post(f"/sessions/{session_id}/segments", json={"start": 0, "end": 3})
    fresh = make_client(tmp_path)
    reloaded = fresh.get(f"/sessions/{session_id}")
    assert reloaded.status_code == 200
    assert len(reloaded.json()["segments"]) == 1


def test_full_scenario_over_http(tmp_path):
    client = make_client(tmp_path)
    session_id, card, hints = drive_walkthrough(client)
    assert "The speaker may produce echoes in the labyrinth." in hints
    assert card["word"] == "labyrinth"
    assert [k["keyword"] for k in card["keywords"]] == ["喇叭", "晕死"]
    assert card["style"] == "pixar_animation"
    fetched = client.get(f"/cards/{card['card_id']}")
    assert fetched.json() == card
    image = client.get(f"/cards/{card['card_id']}/image")
    assert image.status_code == 200
    assert image.content[:8] == b"\x89PNG\r\n\x1a\n"
    listing = client.get("/cards").json()["cards"]
    assert [c["card_id"] for c in listing] == [card["card_id"]]


def test_cards_listing_newest_first_matches_creation_order(tmp_path):
    # Oracle: sort by the recorded creation timestamps.
    client = make_client(tmp_path)
    card_ids = []
    for word in ("sear", "slough"):
        session_id = client.post(
            "/sessions", json={"word_id": word, "sense_id": "burn" if word == "sear" else "shed"}
        ).json()["session_id"]
        card = client.post(
            f"/sessions/{session_id}/card", json={"allow_missing_image": True}
        ).json()
        card_ids.append(card["card_id"])
    listing = client.get("/cards").json()["cards"]
    by_time = sorted(listing, key=lambda c: (c["created_at"], c["card_id"]), reverse=True)
    assert listing == by_time
    assert [c["card_id"] for c in listing] == list(reversed(card_ids))


def make_client_with_script(tmp_path, fixtures) -> TestClient:
    script_path = tmp_path / "script.json"
    script_path.write_text(json.dumps({"fixtures": fixtures}), encoding="utf-8")
    return make_client(tmp_path / "data", mock_script=str(script_path))


def test_image_job_idempotency_key_returns_same_job(tmp_path):
    from wordcraft.providers import placeholder_png
    import base64

    png_b64 = base64.b64encode(placeholder_png()).decode("ascii")
    client = make_client_with_script(
        tmp_path, [{"kind": "image", "png_base64": png_b64}]
    )
    session_id, _ = prepare_complete_canvas(client)
    first = client.post(
        f"/sessions/{session_id}/image",
        json={"style": "pixar_animation", "idempotency_key": "k1"},
    ).json()
    second = client.post(
        f"/sessions/{session_id}/image",
        json={"style": "pixar_animation", "idempotency_key": "k1"},
    ).json()
    assert first["job_id"] == second["job_id"]
    job = wait_for_job(client, first["job_id"])
    assert job["status"] == "done"
    assert job["image_ref"].startswith(f"images/{session_id}/")
    blob = client.get(f"/{job['image_ref']}")
    assert blob.status_code == 200


def prepare_complete_canvas(client):
    session_id = client.post(
        "/sessions", json={"word_id": "sear", "sense_id": "burn"}
    ).json()["session_id"]
    session = client.get(f"/sessions/{session_id}").json()
    meaning = session["map"]["nodes"][0]["node_id"]
    client.post(
        f"/sessions/{session_id}/canvas/elements",
        json={"bbox": {"x": 0.2, "y": 0.2, "w": 0.5, "h": 0.5}, "tags": [meaning],
              "description": "a burned surface"},
    )
    return session_id, meaning


def test_job_failure_keeps_session_untouched(tmp_path):
    client = make_client_with_script(
        tmp_path, [{"kind": "provider_error", "message": "image backend down"}]
    )
    session_id, _ = prepare_complete_canvas(client)
    before = client.get(f"/sessions/{session_id}").json()
    job = client.post(
        f"/sessions/{session_id}/image", json={"style": "sketch"}
    ).json()
    job = wait_for_job(client, job["job_id"])
    assert job["status"] == "failed"
    assert job["error"]["code"] == "PROVIDER_ERROR"
    after = client.get(f"/sessions/{session_id}").json()
    assert after == before
    assert after["images"] == []


def test_unknown_job_404(tmp_path):
    client = make_client(tmp_path)
    response = client.get("/jobs/job-404")
    assert response.status_code == 404
    assert response.json()["error"]["code"] == "UNKNOWN_JOB"


def test_styles_endpoint_lists_presets(tmp_path):
    client = make_client(tmp_path)
    styles = client.get("/styles").json()["styles"]
    assert {"pixar_animation", "watercolor", "flat_illustration", "sketch"} <= set(styles)


def test_error_registry_covers_every_module_error(tmp_path):
    registry = error_registry()
    for name in dir(errors_module):
        obj = getattr(errors_module, name)
        if isinstance(obj, type) and issubclass(obj, WordcraftError):
            assert obj.code in registry, f"{name} missing from registry"
            assert registry[obj.code] == obj.http_status
    # Codes the API emits outside the exception hierarchy.
    assert "VALIDATION_ERROR" in registry
    assert "NOT_FOUND" in registry
