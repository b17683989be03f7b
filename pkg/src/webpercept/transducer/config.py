"""Configuration objects for the DOM transducer pipeline.

Defaults here are deliberately conservative: cleaning strips only
non-semantic machinery (scripts, styles, embedded SVG and the like) and
keeps a short whitelist of attributes a reader or an agent can act on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigError

try:  # 3.11+
    import tomllib
except ImportError:  # pragma: no cover - 3.10 fallback
    tomllib = None

# Tags whose entire subtree is presentation or machinery, never content.
DEFAULT_STRIP_TAGS = frozenset(
    {"script", "style", "noscript", "template", "svg", "iframe", "link", "meta"}
)

# Attributes that survive cleaning. Everything else (style, data-*,
# event handlers, tracking ids) is dropped. `rel` stays because link
# relations such as rel="describedby" drive machine-readable discovery.
DEFAULT_ATTR_WHITELIST = frozenset(
    {
        "id",
        "class",
        "href",
        "src",
        "alt",
        "title",
        "name",
        "type",
        "value",
        "placeholder",
        "rel",
        "role",
        "aria-label",
        "action",
        "method",
        "for",
        "selected",
        "checked",
        "disabled",
    }
)

# Small closed-class words ignored when deriving task keywords.
_STOPWORDS = frozenset(
    """
    a an the and or but nor to of in on at for with by from into onto over
    under is are was were be been being am do does did have has had this
    that these those it its as if then than so such via per each any all
    some no not only own same too very can will just should now i me my we
    our you your he she they them their what which who whom when where how
    """.split()
)


@dataclass(frozen=True)
class TaskContext:
    """What the agent is currently trying to do, in scoring-ready form."""

    description: str
    keywords: frozenset[str] = frozenset()

    @classmethod
    def from_description(cls, description: str) -> "TaskContext":
        """Lowercase, tokenize and stopword-filter a task description."""
        import re

        words = re.findall(r"[a-z0-9][a-z0-9'_-]*", description.lower())
        kw = frozenset(w for w in words if w not in _STOPWORDS)
        return cls(description=description, keywords=kw)


@dataclass(frozen=True)
class CleaningConfig:
    strip_tags: frozenset[str] = DEFAULT_STRIP_TAGS
    strip_comments: bool = True
    attr_whitelist: frozenset[str] = DEFAULT_ATTR_WHITELIST


@dataclass
class TransducerConfig:
    """Knobs for a full transduction run.

    ``budget`` is a token budget for pruning (None means unlimited).
    ``scorer`` and ``summarizer`` take instances, not names; use
    :func:`load_transducer_config` for file-based configuration.
    """

    cleaning: CleaningConfig = field(default_factory=CleaningConfig)
    budget: int | None = None
    scorer: object | None = None  # RelevanceScorer; default chosen lazily
    summarizer: object | None = None  # DomSummarizer or None for identity
    min_block_tokens: int = 8
    block_summary_chars: int = 500
    compact_text_chars: int = 80


_KNOWN_KEYS = {
    "strip_tags",
    "strip_comments",
    "attr_whitelist",
    "budget",
    "scorer",
    "min_block_tokens",
    "block_summary_chars",
    "compact_text_chars",
}


def _build_config(data: dict, source: str) -> TransducerConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a table/object")
    unknown = set(data) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"{source}: unknown keys {sorted(unknown)}")

    cleaning_kwargs = {}
    if "strip_tags" in data:
        cleaning_kwargs["strip_tags"] = frozenset(
            str(t).lower() for t in data["strip_tags"]
        )
    if "attr_whitelist" in data:
        cleaning_kwargs["attr_whitelist"] = frozenset(
            str(a).lower() for a in data["attr_whitelist"]
        )
    if "strip_comments" in data:
        if not isinstance(data["strip_comments"], bool):
            raise ConfigError(f"{source}: strip_comments must be a boolean")
        cleaning_kwargs["strip_comments"] = data["strip_comments"]

    cfg = TransducerConfig(cleaning=CleaningConfig(**cleaning_kwargs))

    if "budget" in data and data["budget"] is not None:
        budget = data["budget"]
        if not isinstance(budget, int) or isinstance(budget, bool) or budget < 0:
            raise ConfigError(f"{source}: budget must be a non-negative integer")
        cfg.budget = budget
    if "scorer" in data:
        name = data["scorer"]
        from .scoring import SCORERS

        if name not in SCORERS:
            raise ConfigError(
                f"{source}: unknown scorer {name!r}, expected one of {sorted(SCORERS)}"
            )
        cfg.scorer = SCORERS[name]()
    for key in ("min_block_tokens", "block_summary_chars", "compact_text_chars"):
        if key in data:
            val = data[key]
            if not isinstance(val, int) or isinstance(val, bool) or val < 0:
                raise ConfigError(f"{source}: {key} must be a non-negative integer")
            setattr(cfg, key, val)
    return cfg


def load_transducer_config(path: str | Path) -> TransducerConfig:
    """Load a TransducerConfig from a JSON or TOML file."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if path.suffix.lower() == ".toml":
        if tomllib is None:
            raise ConfigError("TOML configs need Python 3.11+; use JSON instead")
        try:
            data = tomllib.loads(raw.decode("utf-8"))
        except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    else:
        try:
            data = json.loads(raw.decode("utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return _build_config(data, str(path))
