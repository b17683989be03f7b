"""Stage four of transduction: budget-driven block pruning.

Selection is greedy over blocks in descending relevance (document
order breaks ties) and stops at the first block that would push the
cumulative token count past the budget. Blocks holding interactive
elements are exempt: they are kept even over budget, because dropping
a form to save tokens defeats the point of perceiving the page.
"""

from __future__ import annotations

from ..html_ingest import ELEMENT, TEXT, DomNode, DomTree, find_first, make_tree
from .blocks import BlockTree


def kept_block_ids(blocks: BlockTree, budget: int | None) -> list[str]:
    """Ids of blocks that survive the budget, in document order."""
    ordered = sorted(
        enumerate(blocks.blocks), key=lambda pair: (-pair[1].relevance, pair[0])
    )
    kept: set[str] = set()
    cumulative = 0
    stopped = False
    for _, block in ordered:
        if block.has_interactive:
            kept.add(block.block_id)
            cumulative += block.token_count
        elif budget is None:
            kept.add(block.block_id)
            cumulative += block.token_count
        elif not stopped:
            if cumulative + block.token_count <= budget:
                kept.add(block.block_id)
                cumulative += block.token_count
            else:
                stopped = True
    return [b.block_id for b in blocks.blocks if b.block_id in kept]


def apply_kept_blocks(tree: DomTree, blocks: BlockTree, kept: list[str]) -> DomTree:
    """Rebuild the tree with dropped blocks removed subtree-wise.

    Surviving nodes keep their ids. An element claimed by a dropped
    block still survives when a kept descendant needs it as scaffolding,
    as do the html/head/body skeleton elements.
    """
    kept_set = set(kept)
    dropped: set[int] = set()
    for block in blocks.blocks:
        if block.block_id not in kept_set:
            dropped.update(block.node_ids)

    skeleton = {tree.root.id}
    for tag in ("head", "body"):
        el = find_first(tree.root, tag)
        if el is not None:
            skeleton.add(el.id)

    def rebuild(node: DomNode) -> DomNode | None:
        if node.kind != ELEMENT:
            if node.id in dropped:
                return None
            return DomNode(id=node.id, kind=node.kind, text=node.text)
        children: list[DomNode] = []
        for child in node.children:
            built = rebuild(child)
            if built is None:
                continue
            if built.kind == TEXT and children and children[-1].kind == TEXT:
                children[-1].text += built.text
                continue
            children.append(built)
        if node.id in dropped and not children and node.id not in skeleton:
            return None
        return DomNode(
            id=node.id, kind=ELEMENT, tag=node.tag, attrs=dict(node.attrs), children=children
        )

    root = rebuild(tree.root)
    assert root is not None
    return make_tree(root, source_url=tree.source_url)


def prune(tree: DomTree, blocks: BlockTree, budget: int | None) -> DomTree:
    """Drop low-relevance blocks until the token budget is respected."""
    return apply_kept_blocks(tree, blocks, kept_block_ids(blocks, budget))
