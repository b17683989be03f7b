"""Command-line surface: webpercept <command>.

stdout carries machine-readable payload only; every diagnostic goes to
stderr. Exit codes are part of the contract (see README):

    0 success
    2 input error (missing file, bad JSON argument, corrupt map)
    3 configuration error
    4 Thing Description validation/parse failure
    5 network or protocol error
    6 unknown thing or affordance, or no usable binding
    7 schema or interaction-contract mismatch
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from urllib.parse import urlsplit

from .cognitive_map import (
    AffordanceQuery,
    CognitiveMap,
    load,
    persist,
    query,
    upsert_catalog,
)
from .errors import (
    BodyTooLarge,
    ConfigError,
    CorruptFile,
    EncodingError,
    JsonError,
    MissingOrigin,
    NetworkError,
    NoSuchAffordance,
    NoSupportedBinding,
    ProtocolError,
    ReadOnly,
    SchemaMismatch,
    SchemaVersionMismatch,
    TdError,
    UnsupportedOperation,
    UnsupportedScheme,
    WriteOnly,
)
from .protocol_client import invoke_action, read_property, write_property
from .td_affordances import parse_td, validate_td
from .transducer import TaskContext, TransducerConfig, load_transducer_config, transduce
from .transducer.pipeline import PageAffordanceModel
from .wot_discovery import DirectoryClient, fetch_page, fetch_td, find_td_links, list_things

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_TD = 4
EXIT_NETWORK = 5
EXIT_UNKNOWN_THING = 6
EXIT_SCHEMA = 7


def _diag(message: str) -> None:
    print(message, file=sys.stderr)


def _is_url(text: str) -> bool:
    return urlsplit(text).scheme in ("http", "https")


def _emit(payload: str) -> None:
    sys.stdout.write(payload)
    if not payload.endswith("\n"):
        sys.stdout.write("\n")


# --- commands -------------------------------------------------------------------


def cmd_transduce(args: argparse.Namespace) -> int:
    if args.config:
        config = load_transducer_config(args.config)
    else:
        config = TransducerConfig()
    if args.budget is not None:
        config.budget = args.budget

    if _is_url(args.input):
        raw: bytes = fetch_page(args.input)
        source_url = args.url or args.input
    else:
        raw = Path(args.input).read_bytes()
        source_url = args.url

    ctx = TaskContext.from_description(args.task or "")
    pam = transduce(raw, ctx, config, source_url=source_url)

    if args.emit == "compact":
        _emit(pam.compact.text)
    elif args.emit == "stats":
        _emit(json.dumps(pam.stats.to_dict(), indent=2))
    else:
        _emit(pam.to_json())
    return EXIT_OK


def cmd_parse_td(args: argparse.Namespace) -> int:
    if _is_url(args.input):
        fetched = fetch_td(args.input)
        document, fetched_from = fetched.text, fetched.url
    else:
        document, fetched_from = Path(args.input).read_text(encoding="utf-8"), None

    for violation in validate_td(document):
        _diag(f"{violation.severity}: {violation.path or '<root>'}: {violation.message}")
    catalog = parse_td(document, strict=args.strict, fetched_from=fetched_from)
    _emit(json.dumps(catalog.to_dict(), indent=2, ensure_ascii=False))
    return EXIT_OK


def _load_or_new_map(path: str) -> CognitiveMap:
    if Path(path).exists():
        return load(path)
    return CognitiveMap()


def cmd_discover(args: argparse.Namespace) -> int:
    cmap = _load_or_new_map(args.map)
    before = len(cmap.affordance_index)
    things = 0

    if args.directory:
        client = DirectoryClient(base_url=args.directory)
        listing_url = args.directory.rstrip("/") + "/things"
        for document in list_things(client):
            try:
                catalog = parse_td(document, fetched_from=listing_url)
            except (JsonError, TdError) as exc:
                _diag(f"skipping a directory entry: {exc}")
                continue
            upsert_catalog(cmap, catalog)
            things += 1

    if args.from_pam:
        pam = PageAffordanceModel.from_json(Path(args.from_pam).read_text(encoding="utf-8"))
        for candidate in find_td_links(pam):
            try:
                fetched = fetch_td(candidate.url)
                catalog = parse_td(fetched.text, fetched_from=fetched.url)
            except (JsonError, TdError) as exc:
                _diag(f"skipping {candidate.url}: {exc}")
                continue
            upsert_catalog(cmap, catalog)
            things += 1

    persist(cmap, args.map)
    _emit(
        json.dumps(
            {"things": things, "affordances_added": len(cmap.affordance_index) - before}
        )
    )
    return EXIT_OK


def _catalog_for(args: argparse.Namespace):
    cmap = load(args.map)
    entry = cmap.entries.get(args.thing)
    if entry is None or entry.percept_kind != "catalog":
        raise NoSuchAffordance(f"no thing {args.thing!r} in map {args.map}")
    return entry.percept


def cmd_read(args: argparse.Namespace) -> int:
    result = read_property(_catalog_for(args), args.property)
    _emit(json.dumps(result.to_dict()))
    return EXIT_OK


def cmd_write(args: argparse.Namespace) -> int:
    try:
        value = json.loads(args.value)
    except json.JSONDecodeError as exc:
        raise JsonError(f"--value is not valid JSON: {exc}") from exc
    result = write_property(_catalog_for(args), args.property, value)
    _emit(json.dumps(result.to_dict()))
    return EXIT_OK


def cmd_invoke(args: argparse.Namespace) -> int:
    if args.input is None:
        value = None
    else:
        try:
            value = json.loads(args.input)
        except json.JSONDecodeError as exc:
            raise JsonError(f"--input is not valid JSON: {exc}") from exc
    result = invoke_action(_catalog_for(args), args.action, value)
    _emit(json.dumps(result.to_dict()))
    return EXIT_OK


def cmd_map(args: argparse.Namespace) -> int:
    cmap = load(args.map)
    if args.map_command == "show":
        summaries = []
        for origin in sorted(cmap.entries):
            entry = cmap.entries[origin]
            count = sum(1 for hit in cmap.affordance_index if hit.origin == origin)
            summaries.append(
                {
                    "origin": origin,
                    "percept_kind": entry.percept_kind,
                    "revision": entry.revision,
                    "affordances": count,
                }
            )
        _emit(json.dumps(summaries, indent=2))
        return EXIT_OK
    q = AffordanceQuery(text=args.text, kind=args.kind, origin=args.origin)
    for hit in query(cmap, q):
        _emit(json.dumps(hit.to_dict(), ensure_ascii=False))
    return EXIT_OK


# --- wiring ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="webpercept",
        description="Structured web perception: transduce pages, parse TDs, keep a map.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transduce", help="distill a page into a Page Affordance Model")
    p.add_argument("--input", required=True, help="HTML file path or http(s) URL")
    p.add_argument("--task", default="", help="task description for relevance scoring")
    p.add_argument("--budget", type=int, default=None, help="token budget for pruning")
    p.add_argument("--config", default=None, help="JSON/TOML transducer config file")
    p.add_argument("--url", default=None, help="source URL recorded in the PAM (file inputs)")
    p.add_argument("--emit", choices=("pam", "compact", "stats"), default="pam")
    p.set_defaults(func=cmd_transduce)

    p = sub.add_parser("parse-td", help="parse a Thing Description into a catalog")
    p.add_argument("--input", required=True, help="TD file path or http(s) URL")
    p.add_argument("--strict", action="store_true", help="fail on any error-severity violation")
    p.set_defaults(func=cmd_parse_td)

    p = sub.add_parser("discover", help="find TDs and record them in the map")
    p.add_argument("--directory", default=None, help="TD directory base URL")
    p.add_argument("--from-pam", dest="from_pam", default=None, help="PAM JSON file to mine")
    p.add_argument("--map", required=True, help="cognitive map file (created if missing)")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("read", help="read a property of a mapped thing")
    p.add_argument("--map", required=True)
    p.add_argument("--thing", required=True, help="thing id (map origin key)")
    p.add_argument("--property", required=True)
    p.set_defaults(func=cmd_read)

    p = sub.add_parser("write", help="write a property of a mapped thing")
    p.add_argument("--map", required=True)
    p.add_argument("--thing", required=True)
    p.add_argument("--property", required=True)
    p.add_argument("--value", required=True, help="JSON value")
    p.set_defaults(func=cmd_write)

    p = sub.add_parser("invoke", help="invoke an action of a mapped thing")
    p.add_argument("--map", required=True)
    p.add_argument("--thing", required=True)
    p.add_argument("--action", required=True)
    p.add_argument("--input", default=None, help="JSON action input")
    p.set_defaults(func=cmd_invoke)

    p = sub.add_parser("map", help="inspect the cognitive map")
    p.add_argument("map_command", choices=("show", "query"))
    p.add_argument("--map", required=True)
    p.add_argument("--text", default=None, help="substring match on names/labels")
    p.add_argument("--kind", default=None, help="affordance kind filter")
    p.add_argument("--origin", default=None, help="origin filter")
    p.set_defaults(func=cmd_map)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _diag(f"config error: {exc}")
        return EXIT_CONFIG
    except TdError as exc:
        _diag(f"thing description rejected: {exc}")
        return EXIT_TD
    except (NetworkError, ProtocolError, BodyTooLarge) as exc:
        _diag(f"network error: {exc}")
        return EXIT_NETWORK
    except (NoSuchAffordance, NoSupportedBinding) as exc:
        _diag(f"unknown thing or affordance: {exc}")
        return EXIT_UNKNOWN_THING
    except (SchemaMismatch, ReadOnly, WriteOnly, UnsupportedOperation) as exc:
        _diag(f"interaction contract violation: {exc}")
        return EXIT_SCHEMA
    except (
        JsonError,
        EncodingError,
        CorruptFile,
        SchemaVersionMismatch,
        MissingOrigin,
        UnsupportedScheme,
        ValueError,
        OSError,
    ) as exc:
        _diag(f"input error: {exc}")
        return EXIT_INPUT


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
