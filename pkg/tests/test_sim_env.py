"""Simulated environment servers."""

from __future__ import annotations

import json

import pytest
import requests

from webpercept.errors import PortUnavailable
from webpercept.sim_env import (
    ActionSpec,
    Effect,
    MockThingConfig,
    PropertySpec,
    generate_td,
    start_directory,
    start_mock_thing,
    start_page_server,
)
from webpercept.td_affordances import parse_td, validate_td


def room_config() -> MockThingConfig:
    return MockThingConfig(
        title="Smart Room",
        properties={
            "thermostat": PropertySpec(initial=21.0, schema={"type": "number"}),
            "serial": PropertySpec(initial="SR-1", schema={"type": "string"}, read_only=True),
        },
        actions={
            "setTemperature": ActionSpec(
                effect=Effect(target="thermostat"), input={"type": "number"}
            ),
            "resetTemperature": ActionSpec(
                effect=Effect(target="thermostat", from_input=False, const=20.0)
            ),
        },
    )


def test_config_rejects_unknown_effect_target():
    with pytest.raises(ValueError):
        MockThingConfig(
            title="Bad",
            properties={},
            actions={"boom": ActionSpec(effect=Effect(target="missing"))},
        )


def test_generated_td_is_strictly_valid():
    td = generate_td(room_config(), "http://127.0.0.1:1", "urn:uuid:x")
    violations = validate_td(json.dumps(td), mode="strict")
    assert violations == []
    catalog = parse_td(json.dumps(td), strict=True)
    assert set(catalog.properties) == {"thermostat", "serial"}
    assert set(catalog.actions) == {"setTemperature", "resetTemperature"}
    assert catalog.properties["serial"].read_only
    assert catalog.base == "http://127.0.0.1:1/"


def test_td_served_at_well_known_path():
    with start_mock_thing(room_config()) as thing:
        resp = requests.get(thing.td_url, timeout=5)
        assert resp.status_code == 200
        assert resp.headers["Content-Type"] == "application/td+json"
        td = resp.json()
        assert td["id"] == thing.thing_id
        assert td["base"] == thing.base_url + "/"


def test_property_read_write_cycle():
    with start_mock_thing(room_config()) as thing:
        url = thing.base_url + "/properties/thermostat"
        assert requests.get(url, timeout=5).json() == 21.0
        put = requests.put(url, data=json.dumps(19.5), timeout=5)
        assert put.status_code == 204
        assert requests.get(url, timeout=5).json() == 19.5


def test_read_only_property_rejects_put():
    with start_mock_thing(room_config()) as thing:
        url = thing.base_url + "/properties/serial"
        assert requests.put(url, data='"X"', timeout=5).status_code == 405
        assert requests.get(url, timeout=5).json() == "SR-1"


def test_unknown_resources_404():
    with start_mock_thing(room_config()) as thing:
        assert requests.get(thing.base_url + "/properties/nope", timeout=5).status_code == 404
        assert requests.post(thing.base_url + "/actions/nope", timeout=5).status_code == 404
        assert requests.get(thing.base_url + "/other", timeout=5).status_code == 404


def test_malformed_json_rejected():
    with start_mock_thing(room_config()) as thing:
        url = thing.base_url + "/properties/thermostat"
        assert requests.put(url, data="{nope", timeout=5).status_code == 400


def test_action_effect_from_input():
    with start_mock_thing(room_config()) as thing:
        resp = requests.post(
            thing.base_url + "/actions/setTemperature", data="18.0", timeout=5
        )
        assert resp.status_code == 204
        got = requests.get(thing.base_url + "/properties/thermostat", timeout=5).json()
        assert got == 18.0


def test_action_effect_const():
    with start_mock_thing(room_config()) as thing:
        requests.post(thing.base_url + "/actions/setTemperature", data="5", timeout=5)
        requests.post(thing.base_url + "/actions/resetTemperature", timeout=5)
        got = requests.get(thing.base_url + "/properties/thermostat", timeout=5).json()
        assert got == 20.0


def test_port_unavailable():
    with start_mock_thing(room_config()) as thing:
        port = int(thing.base_url.rsplit(":", 1)[1])
        cfg = MockThingConfig(title="Clash", port=port)
        with pytest.raises(PortUnavailable):
            start_mock_thing(cfg)


def test_shutdown_frees_server():
    thing = start_mock_thing(room_config())
    url = thing.base_url + "/properties/thermostat"
    assert requests.get(url, timeout=5).status_code == 200
    thing.shutdown()
    with pytest.raises(requests.RequestException):
        requests.get(url, timeout=0.5)


# --- directory -----------------------------------------------------------------


def test_directory_serves_documents():
    docs = [
        json.dumps({"@context": "https://www.w3.org/2022/wot/td/v1.1",
                    "id": f"urn:dev:ops:dir-{i}", "title": f"T{i}",
                    "base": "https://x/", "properties": {"p": {}}})
        for i in range(2)
    ]
    with start_directory(docs) as directory:
        resp = requests.get(directory.base_url + "/things", timeout=5)
        assert resp.status_code == 200
        listed = resp.json()
        assert [d["id"] for d in listed] == ["urn:dev:ops:dir-0", "urn:dev:ops:dir-1"]
        assert requests.get(directory.base_url + "/other", timeout=5).status_code == 404


# --- page server -----------------------------------------------------------------


def test_page_server_substitutes_and_guards(tmp_path):
    import http.client

    root = tmp_path / "site"
    root.mkdir()
    (root / "index.html").write_text("<a href='{{TD_URL}}'>TD</a>")
    (root / "plain.txt").write_text("raw")
    (tmp_path / "secret.txt").write_text("outside the web root")
    with start_page_server(root, {"TD_URL": "http://here/td"}) as pages:
        body = requests.get(pages.base_url + "/index.html", timeout=5).text
        assert "http://here/td" in body and "{{TD_URL}}" not in body
        assert requests.get(pages.base_url + "/", timeout=5).text == body
        txt = requests.get(pages.base_url + "/plain.txt", timeout=5)
        assert txt.text == "raw"
        assert requests.get(pages.base_url + "/missing.html", timeout=5).status_code == 404
        # requests would normalize "..", so send the raw path ourselves
        host, port = pages.base_url.removeprefix("http://").split(":")
        conn = http.client.HTTPConnection(host, int(port), timeout=5)
        conn.request("GET", "/../secret.txt")
        assert conn.getresponse().status == 404
        conn.close()
