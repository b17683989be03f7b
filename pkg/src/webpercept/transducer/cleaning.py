"""Stage one of transduction: remove non-semantic markup.

Cleaning is a pure function from tree to tree. It never touches the
input, and running it twice gives the same result as running it once.
"""

from __future__ import annotations

from ..html_ingest import COMMENT, ELEMENT, TEXT, DomNode, DomTree, make_tree
from .config import CleaningConfig


def clean(tree: DomTree, config: CleaningConfig | None = None) -> DomTree:
    """Strip configured tags, comments and non-whitelisted attributes.

    The document root survives even if its tag is listed in
    ``strip_tags``; stripping the root would leave nothing to return.
    """
    cfg = config or CleaningConfig()
    root = _clean_node(tree.root, cfg, is_root=True)
    assert root is not None
    return make_tree(root, source_url=tree.source_url)


def _clean_node(node: DomNode, cfg: CleaningConfig, is_root: bool = False) -> DomNode | None:
    if node.kind == COMMENT:
        if cfg.strip_comments:
            return None
        return DomNode(id=node.id, kind=COMMENT, text=node.text)
    if node.kind == TEXT:
        return DomNode(id=node.id, kind=TEXT, text=node.text)

    if not is_root and node.tag in cfg.strip_tags:
        return None

    attrs = {k: v for k, v in node.attrs.items() if k in cfg.attr_whitelist}
    children: list[DomNode] = []
    for child in node.children:
        kept = _clean_node(child, cfg)
        if kept is None:
            continue
        # Removing an element can make two text runs adjacent; merge them
        # so cleaned trees stay canonical (at most one text node in a row).
        if kept.kind == TEXT and children and children[-1].kind == TEXT:
            children[-1].text += kept.text
            continue
        children.append(kept)
    return DomNode(id=node.id, kind=ELEMENT, tag=node.tag, attrs=attrs, children=children)
