"""The full transduction pipeline and its output, the PAM.

transduce() is a pure function: parse, clean, partition, score, prune,
summarize, extract affordances, encode. Data flows one way; no stage
sees a later stage's output, and nothing here talks to the network or
to any map/store, so the transducer can run standalone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..errors import EmptyTask
from ..html_ingest import TEXT, DomTree, count_tokens, find_first, parse_html, serialize
from .affordances import AffordanceNode, extract_affordances
from .blocks import partition_blocks
from .cleaning import clean
from .config import TaskContext, TransducerConfig
from .emmet import CompactEncoding, encode_compact
from .pruning import apply_kept_blocks, kept_block_ids
from .scoring import LexicalScorer, score_blocks
from .summarize import apply_summarizer

PAM_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ReductionStats:
    raw_tokens: int
    cleaned_tokens: int
    pruned_tokens: int
    compact_tokens: int
    reduction_ratio: float

    def to_dict(self) -> dict:
        return {
            "raw_tokens": self.raw_tokens,
            "cleaned_tokens": self.cleaned_tokens,
            "pruned_tokens": self.pruned_tokens,
            "compact_tokens": self.compact_tokens,
            "reduction_ratio": self.reduction_ratio,
        }


@dataclass
class PageAffordanceModel:
    """What an agent needs to know about one page, and nothing else."""

    source_url: str | None
    title: str
    affordances: list[AffordanceNode]
    blocks_kept: list[str]
    compact: CompactEncoding
    stats: ReductionStats

    def to_dict(self) -> dict:
        return {
            "schema_version": PAM_SCHEMA_VERSION,
            "source_url": self.source_url,
            "title": self.title,
            "affordances": [a.to_dict() for a in self.affordances],
            "blocks_kept": list(self.blocks_kept),
            "compact": {"text": self.compact.text, "token_count": self.compact.token_count},
            "stats": self.stats.to_dict(),
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> "PageAffordanceModel":
        compact = data.get("compact", {})
        stats = data.get("stats", {})
        return cls(
            source_url=data.get("source_url"),
            title=data.get("title", ""),
            affordances=[AffordanceNode.from_dict(a) for a in data.get("affordances", [])],
            blocks_kept=list(data.get("blocks_kept", [])),
            compact=CompactEncoding(
                text=compact.get("text", ""), token_count=int(compact.get("token_count", 0))
            ),
            stats=ReductionStats(
                raw_tokens=int(stats.get("raw_tokens", 0)),
                cleaned_tokens=int(stats.get("cleaned_tokens", 0)),
                pruned_tokens=int(stats.get("pruned_tokens", 0)),
                compact_tokens=int(stats.get("compact_tokens", 0)),
                reduction_ratio=float(stats.get("reduction_ratio", 0.0)),
            ),
        )

    @classmethod
    def from_json(cls, text: str) -> "PageAffordanceModel":
        return cls.from_dict(json.loads(text))


def _page_title(tree: DomTree) -> str:
    title = find_first(tree.root, "title")
    if title is None:
        return ""
    return " ".join("".join(t.text for t in title.walk() if t.kind == TEXT).split())


def transduce_tree(
    tree: DomTree, ctx: TaskContext, config: TransducerConfig | None = None
) -> PageAffordanceModel:
    """Transduce an already-parsed tree (the core of transduce)."""
    cfg = config or TransducerConfig()
    raw_tokens = count_tokens(serialize(tree))

    cleaned = clean(tree, cfg.cleaning)
    cleaned_tokens = count_tokens(serialize(cleaned))

    blocks = partition_blocks(
        cleaned, min_block_tokens=cfg.min_block_tokens, summary_chars=cfg.block_summary_chars
    )
    try:
        blocks = score_blocks(blocks, ctx, cfg.scorer or LexicalScorer())
    except EmptyTask:
        pass  # keywordless task: fall back to budget-only pruning

    kept = kept_block_ids(blocks, cfg.budget)
    pruned = apply_kept_blocks(cleaned, blocks, kept)
    pruned_tokens = count_tokens(serialize(pruned))

    final = apply_summarizer(cfg.summarizer, pruned, ctx)
    compact = encode_compact(final, text_limit=cfg.compact_text_chars)
    ratio = 0.0
    if raw_tokens > 0:
        ratio = max(0.0, min(1.0, 1.0 - compact.token_count / raw_tokens))

    return PageAffordanceModel(
        source_url=tree.source_url,
        title=_page_title(cleaned),
        affordances=extract_affordances(final),
        blocks_kept=kept,
        compact=compact,
        stats=ReductionStats(
            raw_tokens=raw_tokens,
            cleaned_tokens=cleaned_tokens,
            pruned_tokens=pruned_tokens,
            compact_tokens=compact.token_count,
            reduction_ratio=ratio,
        ),
    )


def transduce(
    raw: bytes | str,
    ctx: TaskContext,
    config: TransducerConfig | None = None,
    source_url: str | None = None,
) -> PageAffordanceModel:
    """Turn raw HTML into a Page Affordance Model."""
    tree = parse_html(raw, source_url=source_url)
    return transduce_tree(tree, ctx, config)
