"""Stage two of transduction: partition a cleaned tree into blocks.

A block is a contiguous region of the tree rooted at a block-level
container. Regions partition the document: every node is claimed by
exactly one region, so block token counts add up to the whole-document
token count and budget arithmetic stays exact.

A catch-all region rooted at body picks up whatever is not inside a
container (stray text, the head, top-level links); it becomes a block
only if it actually holds content.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from ..html_ingest import (
    ELEMENT,
    RAW_TEXT_ELEMENTS,
    TEXT,
    DomNode,
    DomTree,
    count_tokens,
    end_tag_markup,
    find_first,
    leaf_markup,
    start_tag_markup,
)
from .affordances import classify_interactive

CONTAINER_TAGS = frozenset(
    {
        "section",
        "article",
        "nav",
        "header",
        "footer",
        "main",
        "aside",
        "div",
        "form",
        "table",
        "ul",
        "ol",
    }
)

DEFAULT_MIN_BLOCK_TOKENS = 8
DEFAULT_SUMMARY_CHARS = 500

_WORD_RE = re.compile(r"[a-z0-9][a-z0-9'_-]*")

# Attributes whose values carry human-meaningful words for scoring.
_TERM_ATTRS = ("aria-label", "placeholder", "title", "alt", "value")


@dataclass(frozen=True)
class Block:
    """One prunable region of the page."""

    block_id: str
    root_node_id: int
    summary_text: str
    token_count: int
    relevance: float = 0.0
    parent_block_id: str | None = None
    has_interactive: bool = False
    node_ids: frozenset[int] = frozenset()
    interactive_node_ids: frozenset[int] = frozenset()
    terms: frozenset[str] = frozenset()


@dataclass
class BlockTree:
    """Blocks in document order, with parent links mirroring containment."""

    blocks: list[Block] = field(default_factory=list)

    def block(self, block_id: str) -> Block:
        for b in self.blocks:
            if b.block_id == block_id:
                return b
        raise KeyError(block_id)

    def with_relevance(self, scores: dict[str, float]) -> "BlockTree":
        return BlockTree(
            blocks=[replace(b, relevance=scores.get(b.block_id, b.relevance)) for b in self.blocks]
        )


def node_own_tokens(node: DomNode, raw: bool = False) -> int:
    """Tokens this single node contributes to the serialized document."""
    if node.kind != ELEMENT:
        return count_tokens(leaf_markup(node, raw))
    return count_tokens(start_tag_markup(node)) + count_tokens(end_tag_markup(node))


def subtree_tokens(node: DomNode, raw: bool = False) -> int:
    """Token count of the serialized subtree; equals per-node sums."""
    total = node_own_tokens(node, raw)
    if node.kind == ELEMENT:
        child_raw = node.tag in RAW_TEXT_ELEMENTS
        for child in node.children:
            total += subtree_tokens(child, child_raw)
    return total


def content_tokens(node: DomNode) -> int:
    """Tokens inside a container, excluding its own open/close markup.

    This is what the nested-container merge threshold compares against:
    a wrapper's own tags should not count toward its substance.
    """
    return subtree_tokens(node) - node_own_tokens(node)


def _has_block_leaf(node: DomNode) -> bool:
    """True when the subtree holds visible text or anything interactive."""
    for n in node.walk():
        if n.kind == TEXT and n.text.strip():
            return True
        if classify_interactive(n) is not None:
            return True
    return False


class _Region:
    """Mutable accumulator for one block while walking the tree."""

    def __init__(self, root_node_id: int, parent: "_Region | None", catch_all: bool = False):
        self.root_node_id = root_node_id
        self.parent = parent
        self.catch_all = catch_all
        self.node_ids: set[int] = set()
        self.token_count = 0
        self.text_parts: list[str] = []
        self.interactive_ids: set[int] = set()
        self.attr_terms: set[str] = set()
        self.has_text = False
        self.block_id: str | None = None  # set at finalize if emitted

    def claim(self, node: DomNode, raw: bool) -> None:
        self.node_ids.add(node.id)
        self.token_count += node_own_tokens(node, raw)
        if node.kind == TEXT:
            collapsed = " ".join(node.text.split())
            if collapsed:
                self.text_parts.append(collapsed)
                self.has_text = True
        elif node.kind == ELEMENT:
            if classify_interactive(node) is not None:
                self.interactive_ids.add(node.id)
            for attr in _TERM_ATTRS:
                val = node.attrs.get(attr)
                if val:
                    self.attr_terms.update(_WORD_RE.findall(val.lower()))


def partition_blocks(
    tree: DomTree,
    min_block_tokens: int = DEFAULT_MIN_BLOCK_TOKENS,
    summary_chars: int = DEFAULT_SUMMARY_CHARS,
) -> BlockTree:
    """Partition a cleaned tree into prunable blocks.

    Top-level containers always open a block. Containers nested inside
    another container open one only when their content (excluding their
    own tags) reaches ``min_block_tokens``; smaller ones are merged into
    the enclosing block. A region is emitted as a Block only if it ends
    up holding visible text or an interactive element.
    """
    body = find_first(tree.root, "body") or tree.root
    catch_all = _Region(root_node_id=body.id, parent=None, catch_all=True)
    regions: list[_Region] = [catch_all]

    def walk(node: DomNode, current: _Region, raw: bool) -> None:
        current.claim(node, raw)
        if node.kind != ELEMENT:
            return
        child_raw = node.tag in RAW_TEXT_ELEMENTS
        for child in node.children:
            if (
                child.kind == ELEMENT
                and child.tag in CONTAINER_TAGS
                and _has_block_leaf(child)
                and (current.catch_all or content_tokens(child) >= min_block_tokens)
            ):
                region = _Region(root_node_id=child.id, parent=current)
                regions.append(region)
                walk(child, region, child_raw)
            else:
                walk(child, current, child_raw)

    walk(tree.root, catch_all, raw=False)

    emitted = [r for r in regions if r.has_text or r.interactive_ids]
    for index, region in enumerate(emitted, start=1):
        region.block_id = f"b{index}"

    def emitted_parent(region: _Region) -> str | None:
        p = region.parent
        while p is not None and p.block_id is None:
            p = p.parent
        return p.block_id if p is not None else None

    blocks: list[Block] = []
    for region in emitted:
        summary = " ".join(region.text_parts)[:summary_chars]
        terms = frozenset(_WORD_RE.findall(summary.lower())) | frozenset(region.attr_terms)
        blocks.append(
            Block(
                block_id=region.block_id,
                root_node_id=region.root_node_id,
                summary_text=summary,
                token_count=region.token_count,
                relevance=0.0,
                parent_block_id=emitted_parent(region),
                has_interactive=bool(region.interactive_ids),
                node_ids=frozenset(region.node_ids),
                interactive_node_ids=frozenset(region.interactive_ids),
                terms=terms,
            )
        )
    return BlockTree(blocks=blocks)
