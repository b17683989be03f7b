"""Exercise cataloged affordances over HTTP.

The catalog's forms dictate everything: URL, verb set, content type.
This module holds no endpoint knowledge of its own; every outgoing
request URL comes from a resolved Form, and callers can pass a recorder
to audit exactly that. MQTT forms and event subscription are recognized
in the data model but refused at dispatch, loudly and distinctly.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import requests

from .errors import (
    NetworkError,
    NoSuchAffordance,
    NoSupportedBinding,
    ProtocolError,
    ReadOnly,
    SchemaMismatch,
    UnsupportedOperation,
    WriteOnly,
)
from .td_affordances import (
    ACTION,
    EVENT,
    PROPERTY,
    AffordanceCatalog,
    DataSchema,
    Form,
    resolve_catalog_form,
)

DEFAULT_TIMEOUT = 5.0

_JSON_BARE_TYPES = ("application/json", "application/td+json")


@dataclass(frozen=True)
class InteractionResult:
    status: str  # "ok" | "error"
    value: object = None
    media_type: str = ""
    latency: float = 0.0

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "value": self.value,
            "media_type": self.media_type,
            "latency": self.latency,
        }


@dataclass(frozen=True)
class BindingSelection:
    affordance_name: str
    chosen_form: Form
    reason: str  # "only_form" | "first_supported"


@dataclass(frozen=True)
class RequestRecord:
    """Provenance entry: which form produced which request."""

    method: str
    url: str
    form_href: str
    affordance_name: str


Recorder = list  # list[RequestRecord]; a plain list keeps call sites simple


def _affordance(catalog: AffordanceCatalog, kind: str, name: str):
    table = {
        PROPERTY: catalog.properties,
        ACTION: catalog.actions,
        EVENT: catalog.events,
    }
    try:
        store = table[kind]
    except KeyError:
        raise ValueError(f"kind must be property, action or event, not {kind!r}") from None
    if name not in store:
        raise NoSuchAffordance(f"no {kind} named {name!r} in {catalog.thing_id}")
    return store[name]


def select_form(
    catalog: AffordanceCatalog, kind: str, name: str, op: str
) -> BindingSelection:
    """First form (document order) speaking the verb over http(s)."""
    affordance = _affordance(catalog, kind, name)
    for form in affordance.forms:
        if op not in form.ops:
            continue
        resolved = resolve_catalog_form(catalog, form)
        if resolved.scheme in ("http", "https"):
            reason = "only_form" if len(affordance.forms) == 1 else "first_supported"
            return BindingSelection(affordance_name=name, chosen_form=resolved, reason=reason)
    raise NoSupportedBinding(
        f"{kind} {name!r} has no http(s) form supporting {op!r}"
    )


# --- type-level schema checks --------------------------------------------------


def _type_name(value: object) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, int):
        return "integer"
    if isinstance(value, float):
        return "number"
    if isinstance(value, str):
        return "string"
    if isinstance(value, dict):
        return "object"
    if isinstance(value, list):
        return "array"
    return type(value).__name__


def check_value(value: object, schema: DataSchema | None, path: str = "") -> None:
    """Type-level validation: json type, enum membership, numeric bounds.

    Deliberately not full JSON Schema; it matches what DataSchema models.
    """
    if schema is None:
        return
    observed = _type_name(value)
    expected = schema.json_type
    if expected is not None:
        ok = observed == expected or (expected == "number" and observed == "integer")
        if not ok:
            raise SchemaMismatch(expected=expected, observed=observed, path=path)
    if schema.enum_values is not None and value not in schema.enum_values:
        raise SchemaMismatch(
            expected=f"one of {list(schema.enum_values)}", observed=repr(value), path=path
        )
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        if schema.minimum is not None and value < schema.minimum:
            raise SchemaMismatch(expected=f">= {schema.minimum}", observed=str(value), path=path)
        if schema.maximum is not None and value > schema.maximum:
            raise SchemaMismatch(expected=f"<= {schema.maximum}", observed=str(value), path=path)
    if isinstance(value, dict) and schema.properties:
        for key, sub in schema.properties.items():
            if key in value:
                check_value(value[key], sub, path=f"{path}/{key}" if path else key)


# --- HTTP dispatch --------------------------------------------------------------


def _is_json_media(media_type: str) -> bool:
    bare = media_type.split(";", 1)[0].strip().lower()
    return bare in _JSON_BARE_TYPES or bare.endswith("+json")


def _request(
    method: str,
    selection: BindingSelection,
    timeout: float,
    recorder: Recorder | None,
    body: object = None,
) -> tuple[object, str, float]:
    form = selection.chosen_form
    if recorder is not None:
        recorder.append(
            RequestRecord(
                method=method,
                url=form.href,
                form_href=form.href,
                affordance_name=selection.affordance_name,
            )
        )
    headers = {"Accept": form.content_type}
    kwargs: dict = {"timeout": timeout, "headers": headers}
    if body is not _NO_BODY:
        headers["Content-Type"] = form.content_type
        kwargs["data"] = json.dumps(body).encode("utf-8")
    started = time.monotonic()
    try:
        response = requests.request(method, form.href, **kwargs)
    except requests.RequestException as exc:
        raise NetworkError(f"{method} {form.href} failed: {exc}") from exc
    latency = time.monotonic() - started
    if not 200 <= response.status_code < 300:
        raise ProtocolError(
            f"{method} {form.href} answered {response.status_code}",
            status=response.status_code,
        )
    media_type = response.headers.get("Content-Type", "")
    if response.status_code == 204 or not response.content:
        return None, media_type, latency
    if _is_json_media(media_type):
        try:
            return json.loads(response.content), media_type, latency
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"{method} {form.href}: body is not valid JSON: {exc}")
    return response.text, media_type, latency


_NO_BODY = object()


def read_property(
    catalog: AffordanceCatalog,
    name: str,
    timeout: float = DEFAULT_TIMEOUT,
    recorder: Recorder | None = None,
) -> InteractionResult:
    prop = _affordance(catalog, PROPERTY, name)
    if prop.write_only:
        raise WriteOnly(f"property {name!r} is write-only")
    selection = select_form(catalog, PROPERTY, name, "readproperty")
    value, media_type, latency = _request("GET", selection, timeout, recorder, body=_NO_BODY)
    if _is_json_media(media_type):
        check_value(value, prop.data_schema)
    return InteractionResult(status="ok", value=value, media_type=media_type, latency=latency)


def write_property(
    catalog: AffordanceCatalog,
    name: str,
    value: object,
    timeout: float = DEFAULT_TIMEOUT,
    recorder: Recorder | None = None,
) -> InteractionResult:
    prop = _affordance(catalog, PROPERTY, name)
    if prop.read_only:
        raise ReadOnly(f"property {name!r} is read-only")
    check_value(value, prop.data_schema)  # pre-flight: nothing mismatched hits the wire
    selection = select_form(catalog, PROPERTY, name, "writeproperty")
    _, media_type, latency = _request("PUT", selection, timeout, recorder, body=value)
    return InteractionResult(status="ok", value=None, media_type=media_type, latency=latency)


def invoke_action(
    catalog: AffordanceCatalog,
    name: str,
    input_value: object = None,
    timeout: float = DEFAULT_TIMEOUT,
    recorder: Recorder | None = None,
) -> InteractionResult:
    action = _affordance(catalog, ACTION, name)
    if action.input_schema is not None:
        check_value(input_value, action.input_schema)
    selection = select_form(catalog, ACTION, name, "invokeaction")
    value, media_type, latency = _request("POST", selection, timeout, recorder, body=input_value)
    if value is not None and action.output_schema is not None:
        check_value(value, action.output_schema)
    return InteractionResult(status="ok", value=value, media_type=media_type, latency=latency)


def subscribe_event(catalog: AffordanceCatalog, name: str) -> InteractionResult:
    """Events are cataloged but have no transport yet; always refuses."""
    raise UnsupportedOperation(
        f"event subscription ({name!r}) has no transport in this version"
    )
