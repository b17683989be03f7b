"""Thing Description parsing: recognize what a service can do.

A TD is consumed as plain JSON: the @context is preserved verbatim and
term names are taken at face value per the TD default context, with no
JSON-LD expansion. security/securityDefinitions are carried through as
an opaque blob and never enforced.

Violations carry JSON-pointer paths so a bad TD can be debugged against
the original document. Severities are fixed by the table in
docs/td-conventions.md; strict parsing fails on any error-severity
violation, lenient parsing repairs what it can and fails only when no
usable catalog can be built (missing title, or an affordance left with
no forms and no base to synthesize one from).
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Callable
from urllib.parse import urljoin, urlsplit, urlunsplit

from .errors import IdMismatch, JsonError, TdError, UnresolvableHref

JSON_TYPES = frozenset({"null", "boolean", "integer", "number", "string", "object", "array"})

OP_VERBS = frozenset(
    {
        "readproperty",
        "writeproperty",
        "invokeaction",
        "subscribeevent",
        "unsubscribeevent",
        "observeproperty",
    }
)

DEFAULT_CONTENT_TYPE = "application/json"

PROPERTY = "property"
ACTION = "action"
EVENT = "event"


def default_ops(kind: str, read_only: bool = False, write_only: bool = False) -> frozenset[str]:
    """The op set a form gets when it declares none (see docs table)."""
    if kind == PROPERTY:
        if read_only:
            return frozenset({"readproperty"})
        if write_only:
            return frozenset({"writeproperty"})
        return frozenset({"readproperty", "writeproperty"})
    if kind == ACTION:
        return frozenset({"invokeaction"})
    return frozenset({"subscribeevent"})


def classify_scheme(url: str) -> str:
    scheme = urlsplit(url).scheme.lower()
    if scheme in ("http", "https"):
        return scheme
    if scheme in ("mqtt", "mqtts"):
        return "mqtt"
    return "other"


# --- domain types -------------------------------------------------------------


@dataclass(frozen=True)
class Form:
    href: str
    ops: frozenset[str]
    content_type: str = DEFAULT_CONTENT_TYPE
    scheme: str | None = None  # set once the href is (or can be) resolved

    def to_dict(self) -> dict:
        out: dict = {"href": self.href, "ops": sorted(self.ops), "content_type": self.content_type}
        if self.scheme is not None:
            out["scheme"] = self.scheme
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Form":
        return cls(
            href=data["href"],
            ops=frozenset(data.get("ops", ())),
            content_type=data.get("content_type", DEFAULT_CONTENT_TYPE),
            scheme=data.get("scheme"),
        )


@dataclass(frozen=True)
class DataSchema:
    json_type: str | None = None
    unit: str | None = None
    minimum: float | None = None
    maximum: float | None = None
    enum_values: tuple | None = None
    properties: dict[str, "DataSchema"] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out: dict = {}
        if self.json_type is not None:
            out["json_type"] = self.json_type
        if self.unit is not None:
            out["unit"] = self.unit
        if self.minimum is not None:
            out["minimum"] = self.minimum
        if self.maximum is not None:
            out["maximum"] = self.maximum
        if self.enum_values is not None:
            out["enum_values"] = list(self.enum_values)
        if self.properties:
            out["properties"] = {k: v.to_dict() for k, v in self.properties.items()}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "DataSchema":
        return cls(
            json_type=data.get("json_type"),
            unit=data.get("unit"),
            minimum=data.get("minimum"),
            maximum=data.get("maximum"),
            enum_values=tuple(data["enum_values"]) if "enum_values" in data else None,
            properties={k: cls.from_dict(v) for k, v in data.get("properties", {}).items()},
        )


@dataclass(frozen=True)
class PropertyAffordance:
    name: str
    data_schema: DataSchema
    read_only: bool = False
    write_only: bool = False
    forms: tuple[Form, ...] = ()

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "data_schema": self.data_schema.to_dict(),
            "read_only": self.read_only,
            "write_only": self.write_only,
            "forms": [f.to_dict() for f in self.forms],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PropertyAffordance":
        return cls(
            name=data["name"],
            data_schema=DataSchema.from_dict(data.get("data_schema", {})),
            read_only=data.get("read_only", False),
            write_only=data.get("write_only", False),
            forms=tuple(Form.from_dict(f) for f in data.get("forms", ())),
        )


@dataclass(frozen=True)
class ActionAffordance:
    name: str
    input_schema: DataSchema | None = None
    output_schema: DataSchema | None = None
    forms: tuple[Form, ...] = ()

    def to_dict(self) -> dict:
        out: dict = {"name": self.name, "forms": [f.to_dict() for f in self.forms]}
        if self.input_schema is not None:
            out["input_schema"] = self.input_schema.to_dict()
        if self.output_schema is not None:
            out["output_schema"] = self.output_schema.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ActionAffordance":
        return cls(
            name=data["name"],
            input_schema=DataSchema.from_dict(data["input_schema"])
            if "input_schema" in data
            else None,
            output_schema=DataSchema.from_dict(data["output_schema"])
            if "output_schema" in data
            else None,
            forms=tuple(Form.from_dict(f) for f in data.get("forms", ())),
        )


@dataclass(frozen=True)
class EventAffordance:
    name: str
    data_schema: DataSchema | None = None
    forms: tuple[Form, ...] = ()

    def to_dict(self) -> dict:
        out: dict = {"name": self.name, "forms": [f.to_dict() for f in self.forms]}
        if self.data_schema is not None:
            out["data_schema"] = self.data_schema.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "EventAffordance":
        return cls(
            name=data["name"],
            data_schema=DataSchema.from_dict(data["data_schema"]) if "data_schema" in data else None,
            forms=tuple(Form.from_dict(f) for f in data.get("forms", ())),
        )


@dataclass(frozen=True)
class AffordanceCatalog:
    thing_id: str
    title: str
    base: str | None = None
    properties: dict[str, PropertyAffordance] = field(default_factory=dict)
    actions: dict[str, ActionAffordance] = field(default_factory=dict)
    events: dict[str, EventAffordance] = field(default_factory=dict)
    context: object = None  # raw @context, verbatim
    security: object = None  # opaque, never enforced
    fetched_from: str | None = None
    fetched_at: str | None = None

    def to_dict(self) -> dict:
        return {
            "thing_id": self.thing_id,
            "title": self.title,
            "base": self.base,
            "properties": {k: v.to_dict() for k, v in self.properties.items()},
            "actions": {k: v.to_dict() for k, v in self.actions.items()},
            "events": {k: v.to_dict() for k, v in self.events.items()},
            "context": self.context,
            "security": self.security,
            "fetched_from": self.fetched_from,
            "fetched_at": self.fetched_at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AffordanceCatalog":
        return cls(
            thing_id=data["thing_id"],
            title=data.get("title", ""),
            base=data.get("base"),
            properties={
                k: PropertyAffordance.from_dict(v) for k, v in data.get("properties", {}).items()
            },
            actions={k: ActionAffordance.from_dict(v) for k, v in data.get("actions", {}).items()},
            events={k: EventAffordance.from_dict(v) for k, v in data.get("events", {}).items()},
            context=data.get("context"),
            security=data.get("security"),
            fetched_from=data.get("fetched_from"),
            fetched_at=data.get("fetched_at"),
        )


@dataclass(frozen=True)
class TdViolation:
    path: str  # JSON pointer into the input document
    severity: str  # "error" | "warning"
    message: str

    def to_dict(self) -> dict:
        return {"path": self.path, "severity": self.severity, "message": self.message}


@dataclass(frozen=True)
class NameSets:
    properties: frozenset[str] = frozenset()
    actions: frozenset[str] = frozenset()
    events: frozenset[str] = frozenset()

    def __bool__(self) -> bool:
        return bool(self.properties or self.actions or self.events)

    def to_dict(self) -> dict:
        return {
            "properties": sorted(self.properties),
            "actions": sorted(self.actions),
            "events": sorted(self.events),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NameSets":
        return cls(
            properties=frozenset(data.get("properties", ())),
            actions=frozenset(data.get("actions", ())),
            events=frozenset(data.get("events", ())),
        )


@dataclass(frozen=True)
class ChangeSet:
    added: NameSets = NameSets()
    removed: NameSets = NameSets()
    modified: NameSets = NameSets()

    def __bool__(self) -> bool:
        return bool(self.added or self.removed or self.modified)

    def to_dict(self) -> dict:
        return {
            "added": self.added.to_dict(),
            "removed": self.removed.to_dict(),
            "modified": self.modified.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ChangeSet":
        return cls(
            added=NameSets.from_dict(data.get("added", {})),
            removed=NameSets.from_dict(data.get("removed", {})),
            modified=NameSets.from_dict(data.get("modified", {})),
        )


# --- analysis (shared by validate_td and parse_td) ----------------------------


def _pointer(*parts: object) -> str:
    out = []
    for part in parts:
        text = str(part).replace("~", "~0").replace("/", "~1")
        out.append(text)
    return "/" + "/".join(out) if out else ""


_KIND_KEYS = (("properties", PROPERTY), ("actions", ACTION), ("events", EVENT))


def _check_document(doc: object) -> list[TdViolation]:
    """All structural checks, in document order by JSON pointer."""
    violations: list[TdViolation] = []

    def err(path: str, message: str) -> None:
        violations.append(TdViolation(path=path, severity="error", message=message))

    def warn(path: str, message: str) -> None:
        violations.append(TdViolation(path=path, severity="warning", message=message))

    if not isinstance(doc, dict):
        err("", "TD must be a JSON object")
        return violations

    title = doc.get("title")
    if not isinstance(title, str) or not title.strip():
        err(_pointer("title"), "TD must carry a nonempty string title")
    if "id" not in doc:
        warn(_pointer("id"), "TD has no id; an urn:uuid will be synthesized")
    elif not isinstance(doc["id"], str) or not doc["id"].strip():
        err(_pointer("id"), "id must be a nonempty string")

    base = doc.get("base")
    if base is not None and (not isinstance(base, str) or not urlsplit(base).scheme):
        err(_pointer("base"), "base must be an absolute URI")
        base = None

    for key, kind in _KIND_KEYS:
        section = doc.get(key)
        if section is None:
            continue
        if not isinstance(section, dict):
            err(_pointer(key), f"{key} must be a JSON object map")
            continue
        for name, body in section.items():
            apath = _pointer(key, name)
            if not isinstance(body, dict):
                err(apath, "affordance must be a JSON object")
                continue
            read_only = body.get("readOnly") is True
            write_only = body.get("writeOnly") is True
            if kind == PROPERTY and read_only and write_only:
                err(apath, "property cannot be both readOnly and writeOnly")
            _check_schemas(body, kind, apath, warn)
            forms = body.get("forms")
            if forms is None or (isinstance(forms, list) and not forms):
                if base is None:
                    err(apath, "affordance has no forms and no base to derive one from")
                else:
                    warn(apath, "affordance has no forms; a default will be synthesized")
                continue
            if not isinstance(forms, list):
                err(_pointer(key, name, "forms"), "forms must be a JSON array")
                continue
            for index, form in enumerate(forms):
                fpath = _pointer(key, name, "forms", index)
                if not isinstance(form, dict):
                    err(fpath, "form must be a JSON object")
                    continue
                href = form.get("href")
                if not isinstance(href, str) or not href.strip():
                    err(_pointer(key, name, "forms", index, "href"), "form needs a nonempty href")
                ops = form.get("op")
                if ops is not None:
                    listed = ops if isinstance(ops, list) else [ops]
                    for verb in listed:
                        if verb not in OP_VERBS:
                            err(
                                _pointer(key, name, "forms", index, "op"),
                                f"unknown op verb {verb!r}",
                            )
    return violations


def _schema_paths(body: dict, kind: str) -> list[tuple[str, dict]]:
    found = []
    if kind == ACTION:
        for key in ("input", "output"):
            if isinstance(body.get(key), dict):
                found.append((key, body[key]))
    elif kind == EVENT:
        if isinstance(body.get("data"), dict):
            found.append(("data", body["data"]))
    else:
        found.append(("", body))  # property schema keywords live on the body
    return found


def _check_schemas(body: dict, kind: str, apath: str, warn: Callable[[str, str], None]) -> None:
    for sub, schema in _schema_paths(body, kind):
        spath = apath if not sub else f"{apath}/{sub}"
        jtype = schema.get("type")
        if jtype is not None and jtype not in JSON_TYPES:
            warn(f"{spath}/type", f"unknown type {jtype!r}; treated as untyped")
        minimum = schema.get("minimum")
        maximum = schema.get("maximum")
        if (
            isinstance(minimum, (int, float))
            and isinstance(maximum, (int, float))
            and minimum > maximum
        ):
            warn(f"{spath}/minimum", "minimum exceeds maximum; both bounds dropped")


def validate_td(document: str | bytes, mode: str = "lenient") -> list[TdViolation]:
    """Check a TD document; violations are the result, never exceptions.

    The check set and severities are identical in both modes; the mode
    argument exists so call sites read naturally next to parse_td, where
    strictness changes behavior.
    """
    if mode not in ("strict", "lenient"):
        raise ValueError(f"mode must be 'strict' or 'lenient', got {mode!r}")
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        return [TdViolation(path="", severity="error", message=f"malformed JSON: {exc}")]
    return _check_document(doc)


# --- parsing ------------------------------------------------------------------


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _parse_schema(schema: dict) -> DataSchema:
    jtype = schema.get("type")
    if jtype not in JSON_TYPES:
        jtype = None
    minimum = schema.get("minimum")
    maximum = schema.get("maximum")
    if not isinstance(minimum, (int, float)) or isinstance(minimum, bool):
        minimum = None
    if not isinstance(maximum, (int, float)) or isinstance(maximum, bool):
        maximum = None
    if minimum is not None and maximum is not None and minimum > maximum:
        minimum = maximum = None  # contradictory bounds are dropped
    enum = schema.get("enum")
    nested = {}
    if jtype == "object" and isinstance(schema.get("properties"), dict):
        nested = {
            name: _parse_schema(sub)
            for name, sub in schema["properties"].items()
            if isinstance(sub, dict)
        }
    return DataSchema(
        json_type=jtype,
        unit=schema.get("unit") if isinstance(schema.get("unit"), str) else None,
        minimum=minimum,
        maximum=maximum,
        enum_values=tuple(enum) if isinstance(enum, list) else None,
        properties=nested,
    )


def _parse_forms(
    body: dict,
    kind: str,
    name: str,
    base: str | None,
    read_only: bool,
    write_only: bool,
) -> tuple[Form, ...]:
    defaults = default_ops(kind, read_only, write_only)
    raw_forms = body.get("forms")
    forms: list[Form] = []
    if isinstance(raw_forms, list):
        for raw in raw_forms:
            if not isinstance(raw, dict):
                continue
            href = raw.get("href")
            if not isinstance(href, str) or not href.strip():
                continue
            ops_raw = raw.get("op")
            if ops_raw is None:
                ops = defaults
            else:
                listed = ops_raw if isinstance(ops_raw, list) else [ops_raw]
                ops = frozenset(v for v in listed if v in OP_VERBS) or defaults
            content_type = raw.get("contentType")
            if not isinstance(content_type, str) or not content_type.strip():
                content_type = DEFAULT_CONTENT_TYPE
            scheme = classify_scheme(href) if urlsplit(href).scheme else None
            forms.append(Form(href=href.strip(), ops=ops, content_type=content_type, scheme=scheme))
    if not forms and base is not None:
        # Default form synthesized against the documented URL layout.
        path = {PROPERTY: "properties", ACTION: "actions", EVENT: "events"}[kind] + f"/{name}"
        forms.append(Form(href=path, ops=defaults, content_type=DEFAULT_CONTENT_TYPE))
    return tuple(forms)


def parse_td(
    document: str | bytes,
    strict: bool = False,
    fetched_from: str | None = None,
    violations_out: list[TdViolation] | None = None,
    id_provider: Callable[[], str] | None = None,
    clock: Callable[[], str] | None = None,
) -> AffordanceCatalog:
    """Parse a TD document into an AffordanceCatalog.

    ``violations_out``, when given, receives everything validate_td
    would report, so warnings travel out-of-band from the catalog.
    ``id_provider`` and ``clock`` exist so tests can pin synthesized
    ids and timestamps.
    """
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise JsonError(f"malformed JSON: {exc}") from exc

    violations = _check_document(doc)
    if violations_out is not None:
        violations_out.extend(violations)
    if strict:
        errors = [v for v in violations if v.severity == "error"]
        if errors:
            head = errors[0]
            raise TdError(
                f"{len(errors)} error(s) in TD, first at {head.path or '<root>'}: {head.message}"
            )

    if not isinstance(doc, dict):
        raise TdError("TD must be a JSON object")
    title = doc.get("title")
    if not isinstance(title, str) or not title.strip():
        raise TdError("TD must carry a nonempty string title")

    base = doc.get("base")
    if not isinstance(base, str) or not urlsplit(base).scheme:
        base = None

    thing_id = doc.get("id")
    if not isinstance(thing_id, str) or not thing_id.strip():
        thing_id = (id_provider or (lambda: f"urn:uuid:{uuid.uuid4()}"))()

    properties: dict[str, PropertyAffordance] = {}
    actions: dict[str, ActionAffordance] = {}
    events: dict[str, EventAffordance] = {}

    for key, kind in _KIND_KEYS:
        section = doc.get(key)
        if not isinstance(section, dict):
            continue
        for name, body in section.items():
            if not isinstance(body, dict):
                continue
            read_only = body.get("readOnly") is True
            write_only = body.get("writeOnly") is True
            if read_only and write_only:
                read_only = write_only = False  # contradictory flags cancel out
            forms = _parse_forms(body, kind, name, base, read_only, write_only)
            if not forms:
                raise TdError(
                    f"affordance {key}/{name} has no forms and no base to derive one from"
                )
            if kind == PROPERTY:
                properties[name] = PropertyAffordance(
                    name=name,
                    data_schema=_parse_schema(body),
                    read_only=read_only,
                    write_only=write_only,
                    forms=forms,
                )
            elif kind == ACTION:
                actions[name] = ActionAffordance(
                    name=name,
                    input_schema=_parse_schema(body["input"])
                    if isinstance(body.get("input"), dict)
                    else None,
                    output_schema=_parse_schema(body["output"])
                    if isinstance(body.get("output"), dict)
                    else None,
                    forms=forms,
                )
            else:
                events[name] = EventAffordance(
                    name=name,
                    data_schema=_parse_schema(body["data"])
                    if isinstance(body.get("data"), dict)
                    else None,
                    forms=forms,
                )

    security = {
        k: doc[k] for k in ("security", "securityDefinitions") if k in doc
    } or None
    return AffordanceCatalog(
        thing_id=thing_id,
        title=title.strip(),
        base=base,
        properties=properties,
        actions=actions,
        events=events,
        context=doc.get("@context"),
        security=security,
        fetched_from=fetched_from,
        fetched_at=(clock or _utc_now)(),
    )


# --- form resolution ----------------------------------------------------------

_RELATIVE_SAFE_SCHEMES = frozenset({"http", "https"})


def _join(base: str, href: str) -> str:
    parts = urlsplit(base)
    if parts.scheme in _RELATIVE_SAFE_SCHEMES:
        return urljoin(base, href)
    # urljoin refuses relative resolution for schemes it does not know;
    # borrow http semantics, then restore the original scheme.
    swapped = urlunsplit(("http",) + parts[1:])
    joined = urljoin(swapped, href)
    jparts = urlsplit(joined)
    if jparts.scheme == "http" and jparts.netloc == parts.netloc:
        return urlunsplit((parts.scheme,) + jparts[1:])
    return joined


def resolve_form(base: str | None, form: Form) -> Form:
    """Resolve a form's href to an absolute URI and classify its scheme."""
    if urlsplit(form.href).scheme:
        return replace(form, scheme=classify_scheme(form.href))
    if not base:
        raise UnresolvableHref(f"relative href {form.href!r} with no base to resolve against")
    resolved = _join(base, form.href)
    if not urlsplit(resolved).scheme:
        raise UnresolvableHref(f"could not resolve {form.href!r} against {base!r}")
    return replace(form, href=resolved, scheme=classify_scheme(resolved))


def resolve_catalog_form(catalog: AffordanceCatalog, form: Form) -> Form:
    """Resolve against the catalog's base, falling back to fetched_from."""
    return resolve_form(catalog.base or catalog.fetched_from, form)


# --- diffing ------------------------------------------------------------------


def _diff_kind(old: dict, new: dict) -> tuple[frozenset[str], frozenset[str], frozenset[str]]:
    old_names = set(old)
    new_names = set(new)
    added = frozenset(new_names - old_names)
    removed = frozenset(old_names - new_names)
    modified = frozenset(n for n in old_names & new_names if old[n] != new[n])
    return added, removed, modified


def catalog_diff(old: AffordanceCatalog, new: AffordanceCatalog) -> ChangeSet:
    """What changed between two revisions of the same thing."""
    if old.thing_id != new.thing_id:
        raise IdMismatch(f"cannot diff {old.thing_id!r} against {new.thing_id!r}")
    pa, pr, pm = _diff_kind(old.properties, new.properties)
    aa, ar, am = _diff_kind(old.actions, new.actions)
    ea, er, em = _diff_kind(old.events, new.events)
    return ChangeSet(
        added=NameSets(properties=pa, actions=aa, events=ea),
        removed=NameSets(properties=pr, actions=ar, events=er),
        modified=NameSets(properties=pm, actions=am, events=em),
    )
