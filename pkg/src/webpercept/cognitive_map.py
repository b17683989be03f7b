"""The agent's world model: every percept, one store, with provenance.

Entries are keyed by origin (page URL for PAMs, thing id for catalogs).
The affordance index is always the flattening of the entries: it is
rebuilt after every mutation rather than patched, so "index equals
rebuild" holds by construction and stays cheap at desk scale.

Persistence is schema-versioned UTF-8 JSON with sorted keys, so files
diff cleanly between runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from .errors import CorruptFile, MissingOrigin, SchemaVersionMismatch
from .td_affordances import AffordanceCatalog, ChangeSet, catalog_diff
from .transducer.pipeline import PageAffordanceModel

MAP_SCHEMA_VERSION = 1

PAM_PERCEPT = "pam"
CATALOG_PERCEPT = "catalog"

# Capability classes: the coarse "what can I do with it" facet of the index.
_PAGE_CAPABILITY = {
    "link": "navigate",
    "button": "activate",
    "submit": "activate",
    "form": "submit",
    "text_input": "input",
    "select": "input",
    "textarea": "input",
    "checkbox": "input",
    "radio": "input",
}


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class Provenance:
    source: str  # module that produced the percept
    recorded_at: str

    def to_dict(self) -> dict:
        return {"source": self.source, "recorded_at": self.recorded_at}

    @classmethod
    def from_dict(cls, data: dict) -> "Provenance":
        return cls(source=data.get("source", ""), recorded_at=data.get("recorded_at", ""))


@dataclass
class MapEntry:
    origin: str
    percept_kind: str  # PAM_PERCEPT | CATALOG_PERCEPT
    percept: object  # PageAffordanceModel | AffordanceCatalog
    provenance: Provenance
    revision: int
    last_diff: ChangeSet | None = None  # catalogs only: change vs previous revision

    def to_dict(self) -> dict:
        return {
            "origin": self.origin,
            "percept_kind": self.percept_kind,
            "percept": self.percept.to_dict(),
            "provenance": self.provenance.to_dict(),
            "revision": self.revision,
            "last_diff": self.last_diff.to_dict() if self.last_diff is not None else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MapEntry":
        kind = data.get("percept_kind")
        if kind == PAM_PERCEPT:
            percept: object = PageAffordanceModel.from_dict(data["percept"])
        elif kind == CATALOG_PERCEPT:
            percept = AffordanceCatalog.from_dict(data["percept"])
        else:
            raise CorruptFile(f"unknown percept kind {kind!r}", offset=0)
        diff = data.get("last_diff")
        return cls(
            origin=data["origin"],
            percept_kind=kind,
            percept=percept,
            provenance=Provenance.from_dict(data.get("provenance", {})),
            revision=int(data.get("revision", 1)),
            last_diff=ChangeSet.from_dict(diff) if diff is not None else None,
        )


@dataclass(frozen=True)
class IndexEntry:
    origin: str
    kind: str  # link|button|...|property|action|event
    name: str
    label: str
    capability: str  # navigate|activate|input|submit|read|write|read/write|invoke|subscribe
    target: str | None = None

    def to_dict(self) -> dict:
        out: dict = {
            "origin": self.origin,
            "kind": self.kind,
            "name": self.name,
            "label": self.label,
            "capability": self.capability,
        }
        if self.target is not None:
            out["target"] = self.target
        return out


@dataclass(frozen=True)
class AffordanceQuery:
    text: str | None = None
    kind: str | None = None
    origin: str | None = None

    def __post_init__(self) -> None:
        if self.text is None and self.kind is None and self.origin is None:
            raise ValueError("query needs at least one of text, kind, origin")


def _index_pam(origin: str, pam: PageAffordanceModel) -> list[IndexEntry]:
    out = []
    for aff in pam.affordances:
        out.append(
            IndexEntry(
                origin=origin,
                kind=aff.kind,
                name=aff.name or aff.label,
                label=aff.label,
                capability=_PAGE_CAPABILITY.get(aff.kind, "other"),
                target=aff.target,
            )
        )
    return out


def _index_catalog(origin: str, catalog: AffordanceCatalog) -> list[IndexEntry]:
    out = []
    for name, prop in catalog.properties.items():
        capability = "read" if prop.read_only else "write" if prop.write_only else "read/write"
        out.append(
            IndexEntry(origin=origin, kind="property", name=name, label=name, capability=capability)
        )
    for name in catalog.actions:
        out.append(
            IndexEntry(origin=origin, kind="action", name=name, label=name, capability="invoke")
        )
    for name in catalog.events:
        out.append(
            IndexEntry(origin=origin, kind="event", name=name, label=name, capability="subscribe")
        )
    return out


def rebuild_index(entries: dict[str, MapEntry]) -> list[IndexEntry]:
    """The index is a pure function of the entries; this is it."""
    flat: list[IndexEntry] = []
    for origin in entries:
        entry = entries[origin]
        if entry.percept_kind == PAM_PERCEPT:
            flat.extend(_index_pam(origin, entry.percept))
        else:
            flat.extend(_index_catalog(origin, entry.percept))
    flat.sort(key=lambda e: (e.origin, e.kind, e.name, e.label, e.target or ""))
    return flat


@dataclass
class CognitiveMap:
    entries: dict[str, MapEntry] = field(default_factory=dict)
    affordance_index: list[IndexEntry] = field(default_factory=list)
    version: int = 0
    clock: Callable[[], str] = field(default=_utc_now, compare=False, repr=False)

    def _upsert(self, origin: str, percept_kind: str, percept: object, source: str) -> int:
        previous = self.entries.get(origin)
        revision = previous.revision + 1 if previous is not None else 1
        last_diff = None
        if (
            percept_kind == CATALOG_PERCEPT
            and previous is not None
            and previous.percept_kind == CATALOG_PERCEPT
            and previous.percept.thing_id == percept.thing_id
        ):
            last_diff = catalog_diff(previous.percept, percept)
        self.entries[origin] = MapEntry(
            origin=origin,
            percept_kind=percept_kind,
            percept=percept,
            provenance=Provenance(source=source, recorded_at=self.clock()),
            revision=revision,
            last_diff=last_diff,
        )
        self.affordance_index = rebuild_index(self.entries)
        self.version += 1
        return revision


def upsert_pam(cmap: CognitiveMap, pam: PageAffordanceModel, source: str = "dom_transducer") -> int:
    """File a page percept under its URL; returns the entry revision."""
    if not pam.source_url:
        raise MissingOrigin("PAM has no source_url to key the entry by")
    return cmap._upsert(pam.source_url, PAM_PERCEPT, pam, source)


def upsert_catalog(
    cmap: CognitiveMap, catalog: AffordanceCatalog, source: str = "wot_discovery"
) -> int:
    """File a thing percept under its id; returns the entry revision."""
    if not catalog.thing_id:
        raise MissingOrigin("catalog has no thing_id to key the entry by")
    return cmap._upsert(catalog.thing_id, CATALOG_PERCEPT, catalog, source)


def query(cmap: CognitiveMap, q: AffordanceQuery) -> list[IndexEntry]:
    """Index hits matching every criterion, in (origin, kind, name) order."""
    needle = q.text.lower() if q.text is not None else None
    hits = []
    for entry in cmap.affordance_index:
        if q.kind is not None and entry.kind != q.kind:
            continue
        if q.origin is not None and entry.origin != q.origin:
            continue
        if needle is not None and needle not in entry.name.lower() and needle not in entry.label.lower():
            continue
        hits.append(entry)
    return hits


def persist(cmap: CognitiveMap, path: str | Path) -> None:
    """Write the map as schema-versioned JSON with stable key order."""
    document = {
        "schema_version": MAP_SCHEMA_VERSION,
        "version": cmap.version,
        "entries": {origin: entry.to_dict() for origin, entry in cmap.entries.items()},
    }
    Path(path).write_text(
        json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def load(path: str | Path) -> CognitiveMap:
    """Read a persisted map; the index is rebuilt, never trusted."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptFile(f"map file {path} is not valid JSON: {exc.msg}", offset=exc.pos) from exc
    if not isinstance(document, dict) or "schema_version" not in document:
        raise CorruptFile(f"map file {path} has no schema_version header", offset=0)
    found = document["schema_version"]
    if found != MAP_SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"map file {path} uses schema {found}, this build reads {MAP_SCHEMA_VERSION}"
        )
    entries_raw = document.get("entries", {})
    if not isinstance(entries_raw, dict):
        raise CorruptFile(f"map file {path}: entries must be an object", offset=0)
    try:
        entries = {origin: MapEntry.from_dict(raw) for origin, raw in entries_raw.items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptFile(f"map file {path}: malformed entry: {exc}", offset=0) from exc
    return CognitiveMap(
        entries=entries,
        affordance_index=rebuild_index(entries),
        version=int(document.get("version", 0)),
    )
