"""Protocol client: form selection, schema checks, HTTP dispatch."""

from __future__ import annotations

import json
import socket
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from webpercept.errors import (
    NetworkError,
    NoSuchAffordance,
    NoSupportedBinding,
    ProtocolError,
    ReadOnly,
    SchemaMismatch,
    UnresolvableHref,
    UnsupportedOperation,
    WriteOnly,
)
from webpercept.protocol_client import (
    BindingSelection,
    InteractionResult,
    RequestRecord,
    check_value,
    invoke_action,
    read_property,
    select_form,
    subscribe_event,
    write_property,
)
from webpercept.sim_env import (
    ActionSpec,
    Effect,
    MockThingConfig,
    PropertySpec,
    start_mock_thing,
)
from webpercept.td_affordances import (
    ActionAffordance,
    AffordanceCatalog,
    DataSchema,
    EventAffordance,
    Form,
    PropertyAffordance,
    parse_td,
    resolve_catalog_form,
)
from webpercept.wot_discovery import fetch_td


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


@pytest.fixture()
def thing():
    with start_mock_thing(room_config()) as handle:
        yield handle


@pytest.fixture()
def catalog(thing):
    fetched = fetch_td(thing.td_url)
    return parse_td(fetched.text, strict=True, fetched_from=fetched.url)


# --- hand-built catalogs for unit-level selection tests ---------------------------


def prop_catalog(*forms: Form, base: str | None = None, **prop_kwargs) -> AffordanceCatalog:
    prop = PropertyAffordance(name="p", data_schema=DataSchema(), forms=forms, **prop_kwargs)
    return AffordanceCatalog(thing_id="urn:test", title="Bench", base=base, properties={"p": prop})


def http_form(href: str, *ops: str) -> Form:
    return Form(href=href, ops=frozenset(ops))


# --- select_form -------------------------------------------------------------------


def test_select_single_form_reason_only_form():
    catalog = prop_catalog(http_form("https://x.example/p", "readproperty", "writeproperty"))
    selection = select_form(catalog, "property", "p", "readproperty")
    assert isinstance(selection, BindingSelection)
    assert selection.affordance_name == "p"
    assert selection.reason == "only_form"
    assert selection.chosen_form.href == "https://x.example/p"
    assert selection.chosen_form.scheme == "https"


def test_select_first_form_in_document_order():
    catalog = prop_catalog(
        http_form("http://x.example/a", "readproperty"),
        http_form("http://x.example/b", "readproperty"),
    )
    selection = select_form(catalog, "property", "p", "readproperty")
    assert selection.chosen_form.href == "http://x.example/a"
    assert selection.reason == "first_supported"


def test_select_skips_forms_without_the_verb():
    catalog = prop_catalog(
        http_form("http://x.example/write-only", "writeproperty"),
        http_form("http://x.example/read", "readproperty"),
    )
    selection = select_form(catalog, "property", "p", "readproperty")
    assert selection.chosen_form.href == "http://x.example/read"


def test_select_skips_non_http_schemes():
    catalog = prop_catalog(
        http_form("mqtt://broker.example/p", "readproperty"),
        http_form("https://x.example/p", "readproperty"),
    )
    selection = select_form(catalog, "property", "p", "readproperty")
    assert selection.chosen_form.href == "https://x.example/p"
    assert selection.reason == "first_supported"


def test_select_resolves_relative_href_against_base():
    catalog = prop_catalog(
        http_form("ctrl/p", "readproperty"), base="https://hub.example/api/"
    )
    selection = select_form(catalog, "property", "p", "readproperty")
    assert selection.chosen_form.href == "https://hub.example/api/ctrl/p"
    assert selection.chosen_form.scheme == "https"


def test_select_relative_href_without_base_is_unresolvable():
    catalog = prop_catalog(http_form("ctrl/p", "readproperty"))
    with pytest.raises(UnresolvableHref):
        select_form(catalog, "property", "p", "readproperty")


def test_select_no_form_with_verb_raises():
    catalog = prop_catalog(http_form("http://x.example/p", "readproperty"))
    with pytest.raises(NoSupportedBinding):
        select_form(catalog, "property", "p", "writeproperty")


def test_select_only_mqtt_forms_raises():
    catalog = prop_catalog(http_form("mqtt://broker.example/p", "readproperty"))
    with pytest.raises(NoSupportedBinding):
        select_form(catalog, "property", "p", "readproperty")


def test_select_unknown_affordance_raises():
    catalog = prop_catalog(http_form("http://x.example/p", "readproperty"))
    with pytest.raises(NoSuchAffordance):
        select_form(catalog, "property", "ghost", "readproperty")


def test_select_unknown_kind_raises_value_error():
    catalog = prop_catalog(http_form("http://x.example/p", "readproperty"))
    with pytest.raises(ValueError):
        select_form(catalog, "gadget", "p", "readproperty")


def test_select_works_for_actions_and_events():
    action = ActionAffordance(
        name="go", forms=(http_form("http://x.example/go", "invokeaction"),)
    )
    event = EventAffordance(
        name="tick", forms=(http_form("http://x.example/tick", "subscribeevent"),)
    )
    catalog = AffordanceCatalog(
        thing_id="urn:test", title="Bench", actions={"go": action}, events={"tick": event}
    )
    assert select_form(catalog, "action", "go", "invokeaction").chosen_form.scheme == "http"
    assert select_form(catalog, "event", "tick", "subscribeevent").affordance_name == "tick"


# --- check_value -------------------------------------------------------------------


@pytest.mark.parametrize(
    "value,schema",
    [
        (3.5, DataSchema(json_type="number")),
        (3, DataSchema(json_type="number")),  # integer satisfies number
        (3, DataSchema(json_type="integer")),
        (True, DataSchema(json_type="boolean")),
        ("x", DataSchema(json_type="string")),
        (None, DataSchema(json_type="null")),
        ({"a": 1}, DataSchema(json_type="object")),
        ([1, 2], DataSchema(json_type="array")),
        ("b", DataSchema(json_type="string", enum_values=("a", "b"))),
        (5, DataSchema(json_type="number", minimum=0, maximum=10)),
        (0, DataSchema(json_type="number", minimum=0, maximum=10)),  # bounds inclusive
        (7, DataSchema()),  # untyped schema constrains nothing
        ("anything", None),  # no schema at all
    ],
)
def test_check_value_accepts(value, schema):
    check_value(value, schema)


@pytest.mark.parametrize(
    "value,schema,expected",
    [
        ("hot", DataSchema(json_type="number"), "number"),
        (3.5, DataSchema(json_type="integer"), "integer"),
        (True, DataSchema(json_type="integer"), "integer"),  # bool is not an integer
        (1, DataSchema(json_type="boolean"), "boolean"),
        (None, DataSchema(json_type="string"), "string"),
        ([1], DataSchema(json_type="object"), "object"),
    ],
)
def test_check_value_type_mismatches(value, schema, expected):
    with pytest.raises(SchemaMismatch) as excinfo:
        check_value(value, schema)
    assert excinfo.value.expected == expected


def test_check_value_enum_membership():
    schema = DataSchema(json_type="string", enum_values=("on", "off"))
    with pytest.raises(SchemaMismatch) as excinfo:
        check_value("dim", schema)
    assert "one of" in excinfo.value.expected


def test_check_value_numeric_bounds():
    schema = DataSchema(json_type="number", minimum=0, maximum=10)
    with pytest.raises(SchemaMismatch) as excinfo:
        check_value(-1, schema)
    assert excinfo.value.expected == ">= 0"
    with pytest.raises(SchemaMismatch) as excinfo:
        check_value(11, schema)
    assert excinfo.value.expected == "<= 10"


def test_check_value_bounds_ignore_booleans():
    # bool is an int subclass; range checks must not treat it as a number
    check_value(True, DataSchema(minimum=5))


def test_check_value_nested_object_paths():
    schema = DataSchema(
        json_type="object",
        properties={"outer": DataSchema(json_type="object", properties={"n": DataSchema(json_type="number")})},
    )
    check_value({"outer": {"n": 2}}, schema)
    with pytest.raises(SchemaMismatch) as excinfo:
        check_value({"outer": {"n": "x"}}, schema)
    assert excinfo.value.path == "outer/n"


def test_check_value_nested_extra_and_missing_keys_pass():
    schema = DataSchema(json_type="object", properties={"n": DataSchema(json_type="number")})
    check_value({}, schema)  # declared keys are not required
    check_value({"n": 1, "extra": "ignored"}, schema)


# --- live interactions against the mock thing --------------------------------------


def test_read_property_round_trip(catalog):
    result = read_property(catalog, "thermostat")
    assert isinstance(result, InteractionResult)
    assert result.status == "ok"
    assert result.value == 21.0
    assert result.media_type.startswith("application/json")
    assert result.latency > 0


def test_write_then_read_property(catalog):
    written = write_property(catalog, "thermostat", 17.5)
    assert written.status == "ok"
    assert written.value is None  # 204: nothing comes back
    assert read_property(catalog, "thermostat").value == 17.5


def test_invoke_action_applies_effect(catalog):
    result = invoke_action(catalog, "setTemperature", 19.5)
    assert result.status == "ok"
    assert read_property(catalog, "thermostat").value == 19.5


def test_invoke_action_with_const_effect(catalog):
    write_property(catalog, "thermostat", 25.0)
    invoke_action(catalog, "resetTemperature")
    assert read_property(catalog, "thermostat").value == 20.0


def test_write_read_only_property_refused_before_wire(catalog):
    recorder = []
    with pytest.raises(ReadOnly):
        write_property(catalog, "serial", "SR-2", recorder=recorder)
    assert recorder == []


def test_read_write_only_property_refused():
    catalog = prop_catalog(
        http_form("http://x.example/p", "writeproperty"), write_only=True
    )
    with pytest.raises(WriteOnly):
        read_property(catalog, "p")


def test_preflight_schema_check_blocks_bad_write(catalog):
    recorder = []
    with pytest.raises(SchemaMismatch):
        write_property(catalog, "thermostat", "hot", recorder=recorder)
    assert recorder == []
    assert read_property(catalog, "thermostat").value == 21.0  # unchanged


def test_preflight_schema_check_blocks_bad_action_input(catalog):
    recorder = []
    with pytest.raises(SchemaMismatch):
        invoke_action(catalog, "setTemperature", "x", recorder=recorder)
    assert recorder == []


def test_unknown_names_raise(catalog):
    with pytest.raises(NoSuchAffordance):
        read_property(catalog, "ghost")
    with pytest.raises(NoSuchAffordance):
        invoke_action(catalog, "ghost")


def test_subscribe_event_has_no_transport(catalog):
    with pytest.raises(UnsupportedOperation):
        subscribe_event(catalog, "anything")


def test_recorder_provenance_covers_every_request(catalog):
    recorder = []
    read_property(catalog, "thermostat", recorder=recorder)
    write_property(catalog, "thermostat", 18.0, recorder=recorder)
    invoke_action(catalog, "setTemperature", 19.0, recorder=recorder)

    assert [r.method for r in recorder] == ["GET", "PUT", "POST"]
    assert [r.affordance_name for r in recorder] == [
        "thermostat",
        "thermostat",
        "setTemperature",
    ]
    resolved_hrefs = {
        resolve_catalog_form(catalog, form).href
        for affordance in [*catalog.properties.values(), *catalog.actions.values()]
        for form in affordance.forms
    }
    for record in recorder:
        assert isinstance(record, RequestRecord)
        assert record.url == record.form_href
        assert record.url in resolved_hrefs


def test_interaction_result_to_dict_shape(catalog):
    payload = read_property(catalog, "thermostat").to_dict()
    assert set(payload) == {"status", "value", "media_type", "latency"}
    assert payload["status"] == "ok"
    json.dumps(payload)  # must be serializable as-is


# --- scripted peers: contract violations on the wire --------------------------------


class _PlanHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def log_message(self, format, *args):  # noqa: A002
        pass

    def _respond(self):
        length = int(self.headers.get("Content-Length") or 0)
        body_in = self.rfile.read(length) if length else b""
        self.server.seen.append((self.command, self.path, dict(self.headers), body_in))
        plan = self.server.plan
        if plan.get("sleep"):
            time.sleep(plan["sleep"])
        body = plan.get("body", b"")
        self.send_response(plan.get("status", 200))
        self.send_header("Content-Type", plan.get("content_type", "application/json"))
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        if body:
            self.wfile.write(body)

    do_GET = _respond
    do_PUT = _respond
    do_POST = _respond


class scripted_peer:
    def __init__(self, **plan):
        self.plan = plan

    def __enter__(self):
        self.server = ThreadingHTTPServer(("127.0.0.1", 0), _PlanHandler)
        self.server.plan = self.plan
        self.server.seen = []
        self.server.daemon_threads = True
        threading.Thread(target=self.server.serve_forever, daemon=True).start()
        self.url = f"http://127.0.0.1:{self.server.server_address[1]}"
        return self

    def __exit__(self, *exc):
        self.server.shutdown()
        self.server.server_close()


def scripted_catalog(url: str, schema: DataSchema | None = None, content_type: str = "application/json"):
    form = Form(
        href=f"{url}/properties/p",
        ops=frozenset({"readproperty", "writeproperty"}),
        content_type=content_type,
    )
    prop = PropertyAffordance(name="p", data_schema=schema or DataSchema(), forms=(form,))
    return AffordanceCatalog(thing_id="urn:scripted", title="S", properties={"p": prop})


def test_non_2xx_is_protocol_error_with_status():
    with scripted_peer(status=503, body=b"maintenance") as peer:
        with pytest.raises(ProtocolError) as excinfo:
            read_property(scripted_catalog(peer.url), "p")
    assert excinfo.value.status == 503


def test_json_media_with_garbage_body_is_protocol_error():
    with scripted_peer(body=b"not json at all") as peer:
        with pytest.raises(ProtocolError):
            read_property(scripted_catalog(peer.url), "p")


def test_text_media_returned_verbatim_without_schema_check():
    schema = DataSchema(json_type="number")
    with scripted_peer(body=b"hola", content_type="text/plain") as peer:
        result = read_property(scripted_catalog(peer.url, schema=schema), "p")
    assert result.value == "hola"
    assert result.media_type.startswith("text/plain")


def test_json_read_value_checked_against_property_schema():
    schema = DataSchema(json_type="number")
    with scripted_peer(body=b'"hot"') as peer:
        with pytest.raises(SchemaMismatch):
            read_property(scripted_catalog(peer.url, schema=schema), "p")


def test_action_output_checked_against_output_schema():
    def action_catalog(url):
        form = Form(href=f"{url}/actions/a", ops=frozenset({"invokeaction"}))
        action = ActionAffordance(
            name="a", output_schema=DataSchema(json_type="number"), forms=(form,)
        )
        return AffordanceCatalog(thing_id="urn:scripted", title="S", actions={"a": action})

    with scripted_peer(body=b"3.5") as peer:
        assert invoke_action(action_catalog(peer.url), "a").value == 3.5
    with scripted_peer(body=b'"x"') as peer:
        with pytest.raises(SchemaMismatch):
            invoke_action(action_catalog(peer.url), "a")


def test_request_headers_follow_the_form():
    with scripted_peer(status=204) as peer:
        write_property(scripted_catalog(peer.url), "p", {"k": 1})
        command, path, headers, body = peer.server.seen[0]
    assert command == "PUT"
    assert path == "/properties/p"
    assert headers.get("Content-Type") == "application/json"
    assert headers.get("Accept") == "application/json"
    assert json.loads(body) == {"k": 1}


def test_read_sends_accept_header():
    with scripted_peer(body=b"1") as peer:
        read_property(scripted_catalog(peer.url), "p")
        _, _, headers, _ = peer.server.seen[0]
    assert headers.get("Accept") == "application/json"


def test_connection_refused_is_network_error():
    probe = socket.socket()
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]
    probe.close()
    recorder = []
    with pytest.raises(NetworkError):
        read_property(scripted_catalog(f"http://127.0.0.1:{port}"), "p", recorder=recorder)
    # the attempt is still on the audit trail
    assert len(recorder) == 1 and recorder[0].method == "GET"


def test_timeout_is_network_error():
    with scripted_peer(sleep=1.5, body=b"1") as peer:
        with pytest.raises(NetworkError):
            read_property(scripted_catalog(peer.url), "p", timeout=0.2)
