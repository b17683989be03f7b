"""webpercept: structured web perception for autonomous agents.

Three capabilities, loosely coupled by design: turning raw HTML into a
compact Page Affordance Model, discovering and speaking W3C Thing
Description interfaces, and remembering both in a cognitive map.
"""

__version__ = "0.1.0"

from . import errors
from .cognitive_map import AffordanceQuery, CognitiveMap, upsert_catalog, upsert_pam
from .html_ingest import DomNode, DomTree, count_tokens, parse_html, serialize
from .protocol_client import invoke_action, read_property, subscribe_event, write_property
from .td_affordances import AffordanceCatalog, parse_td, validate_td
from .transducer import (
    PageAffordanceModel,
    TaskContext,
    TransducerConfig,
    transduce,
)
from .wot_discovery import DirectoryClient, fetch_td, find_td_links, list_things

__all__ = [
    "AffordanceCatalog",
    "AffordanceQuery",
    "CognitiveMap",
    "DirectoryClient",
    "DomNode",
    "DomTree",
    "PageAffordanceModel",
    "TaskContext",
    "TransducerConfig",
    "__version__",
    "count_tokens",
    "errors",
    "fetch_td",
    "find_td_links",
    "invoke_action",
    "list_things",
    "parse_html",
    "parse_td",
    "read_property",
    "serialize",
    "subscribe_event",
    "transduce",
    "upsert_catalog",
    "upsert_pam",
    "validate_td",
    "write_property",
]
