"""HTML ingestion: forgiving parse into a DOM tree with stable node ids.

Built on the stdlib ``html.parser`` tokenizer with HTML5-style tree
construction: implied ``html``/``head``/``body`` skeleton, auto-closing of
``p``/``li``/table elements, void elements, raw-text ``script``/``style``
content, and comments preserved as first-class nodes. Malformed markup never
raises; the worst input still yields a skeleton tree.

Node ids are assigned in document order at parse time and never change
afterwards, so downstream stages (cleaning, pruning) stay traceable back to
the raw DOM.
"""

from __future__ import annotations

import codecs
import re
from dataclasses import dataclass, field
from html import escape
from html.parser import HTMLParser
from typing import Iterator

from .errors import EncodingError

ELEMENT = "element"
TEXT = "text"
COMMENT = "comment"

VOID_ELEMENTS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link",
    "meta", "param", "source", "track", "wbr",
})

RAW_TEXT_ELEMENTS = frozenset({"script", "style"})

# Tags that belong in <head> while the body has not started yet.
_HEAD_TAGS = frozenset({
    "title", "base", "link", "meta", "style", "script", "noscript", "template",
})

# Start tags that implicitly close an open <p>.
_P_CLOSERS = frozenset({
    "address", "article", "aside", "blockquote", "details", "dialog", "dir",
    "div", "dl", "fieldset", "figcaption", "figure", "footer", "form",
    "h1", "h2", "h3", "h4", "h5", "h6", "header", "hgroup", "hr", "main",
    "menu", "nav", "ol", "p", "pre", "section", "table", "ul",
    "li", "dt", "dd",
})

# An open element K is implicitly closed when a start tag in CLOSED_BY[K]
# arrives at the same level.
_CLOSED_BY: dict[str, frozenset[str]] = {
    "p": _P_CLOSERS,
    "li": frozenset({"li"}),
    "dt": frozenset({"dt", "dd"}),
    "dd": frozenset({"dt", "dd"}),
    "option": frozenset({"option", "optgroup"}),
    "optgroup": frozenset({"optgroup"}),
    "thead": frozenset({"tbody", "tfoot"}),
    "tbody": frozenset({"tbody", "tfoot"}),
    "tfoot": frozenset({"tbody", "tfoot"}),
    "tr": frozenset({"tr", "thead", "tbody", "tfoot"}),
    "td": frozenset({"td", "th", "tr", "thead", "tbody", "tfoot"}),
    "th": frozenset({"td", "th", "tr", "thead", "tbody", "tfoot"}),
}

_EMPTY: frozenset[str] = frozenset()


@dataclass
class DomNode:
    """One node of the DOM tree.

    ``kind`` is one of ``element``, ``text``, ``comment``. Elements carry a
    lowercase ``tag`` and an ordered ``attrs`` map; text and comment nodes
    carry ``text`` and have no children.
    """

    id: int
    kind: str
    tag: str = ""
    attrs: dict[str, str] = field(default_factory=dict)
    text: str = ""
    children: list["DomNode"] = field(default_factory=list)

    def walk(self) -> Iterator["DomNode"]:
        """Yield this node and all descendants in document order."""
        yield self
        for child in self.children:
            yield from child.walk()

    def copy(self) -> "DomNode":
        """Deep copy preserving node ids."""
        return DomNode(
            id=self.id,
            kind=self.kind,
            tag=self.tag,
            attrs=dict(self.attrs),
            text=self.text,
            children=[c.copy() for c in self.children],
        )


@dataclass
class DomTree:
    root: DomNode
    source_url: str | None = None
    node_count: int = 1

    def walk(self) -> Iterator[DomNode]:
        return self.root.walk()


def make_tree(root: DomNode, source_url: str | None = None) -> DomTree:
    """Wrap an existing node (ids already assigned) into a DomTree."""
    return DomTree(root=root, source_url=source_url,
                   node_count=sum(1 for _ in root.walk()))


def assign_document_order_ids(root: DomNode) -> int:
    """Assign fresh document-order ids to a hand-built tree; returns count.

    Never call this on a parsed tree: parse-time ids must stay stable.
    """
    count = 0
    for node in root.walk():
        node.id = count
        count += 1
    return count


def parent_map(tree: DomTree) -> dict[int, int | None]:
    """Map node id to parent id (root maps to None)."""
    parents: dict[int, int | None] = {tree.root.id: None}
    for node in tree.walk():
        for child in node.children:
            parents[child.id] = node.id
    return parents


def find_first(root: DomNode, tag: str) -> DomNode | None:
    for node in root.walk():
        if node.kind == ELEMENT and node.tag == tag:
            return node
    return None


# --- decoding ----------------------------------------------------------------

_CHARSET_RE = re.compile(
    rb"""<meta[^>]+charset\s*=\s*["']?([a-zA-Z0-9_.:-]+)""", re.IGNORECASE)

_BOMS = (
    (codecs.BOM_UTF8, "utf-8"),
    (codecs.BOM_UTF16_LE, "utf-16-le"),
    (codecs.BOM_UTF16_BE, "utf-16-be"),
)


def decode_html_bytes(data: bytes) -> str:
    """Decode raw page bytes, honoring BOM and declared meta charset.

    Undecodable byte sequences are replaced; EncodingError is raised only
    when the document declares a charset Python has no codec for.
    """
    for bom, enc in _BOMS:
        if data.startswith(bom):
            return data[len(bom):].decode(enc, errors="replace")
    match = _CHARSET_RE.search(data[:1024])
    if match:
        name = match.group(1).decode("ascii", errors="replace")
        try:
            codec = codecs.lookup(name)
        except LookupError as exc:
            raise EncodingError(f"declared charset {name!r} is not supported") from exc
        return data.decode(codec.name, errors="replace")
    return data.decode("utf-8", errors="replace")


# --- parsing -----------------------------------------------------------------


class _TreeBuilder(HTMLParser):
    """HTML5-style tree construction over the stdlib tokenizer."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self._next_id = 0
        self.root = self._node(ELEMENT, tag="html")
        self._head: DomNode | None = None
        self._body: DomNode | None = None
        self._stack: list[DomNode] = [self.root]

    def _node(self, kind: str, **kw) -> DomNode:
        node = DomNode(id=self._next_id, kind=kind, **kw)
        self._next_id += 1
        return node

    def _ensure_head(self) -> None:
        if self._head is None:
            self._head = self._node(ELEMENT, tag="head")
            self.root.children.append(self._head)

    def _ensure_body(self) -> None:
        self._ensure_head()
        if self._body is None:
            self._body = self._node(ELEMENT, tag="body")
            self.root.children.append(self._body)
            self._stack = [self.root, self._body]

    @staticmethod
    def _merge_attrs(node: DomNode, attrs: dict[str, str]) -> None:
        for key, value in attrs.items():
            node.attrs.setdefault(key, value)

    def handle_starttag(self, tag: str, attrs) -> None:
        attr_map: dict[str, str] = {}
        for key, value in attrs:
            if key not in attr_map:  # first occurrence wins
                attr_map[key] = value if value is not None else ""

        if tag == "html":
            self._merge_attrs(self.root, attr_map)
            return
        if tag == "head":
            if self._body is None:
                self._ensure_head()
                self._merge_attrs(self._head, attr_map)
                self._stack = [self.root, self._head]
            return
        if tag == "body":
            self._ensure_body()
            self._merge_attrs(self._body, attr_map)
            return

        if self._body is None:
            if tag in _HEAD_TAGS:
                self._ensure_head()
                if self._stack[-1] is self.root:
                    self._stack = [self.root, self._head]
            else:
                self._ensure_body()

        if self._body is not None and len(self._stack) > 2:
            while (len(self._stack) > 2
                   and tag in _CLOSED_BY.get(self._stack[-1].tag, _EMPTY)):
                self._stack.pop()

        node = self._node(ELEMENT, tag=tag, attrs=attr_map)
        self._stack[-1].children.append(node)
        if tag not in VOID_ELEMENTS:
            self._stack.append(node)

    def handle_startendtag(self, tag: str, attrs) -> None:
        # HTML5 honors the self-closing slash only on void elements; any
        # other tag written as <x/> stays open.
        self.handle_starttag(tag, attrs)

    def handle_endtag(self, tag: str) -> None:
        if tag in ("html", "body"):
            return
        if tag == "head":
            if self._body is None and self._head is not None:
                self._stack = [self.root]
            return
        for i in range(len(self._stack) - 1, 0, -1):
            node = self._stack[i]
            if node is self._body or node is self._head:
                break
            if node.kind == ELEMENT and node.tag == tag:
                del self._stack[i:]
                return
        # unmatched end tag: ignored

    def handle_data(self, data: str) -> None:
        if self._body is None:
            top = self._stack[-1]
            if top is self.root or top is self._head:
                if not data.strip():
                    return  # stray whitespace around the skeleton
                self._ensure_body()
        top = self._stack[-1]
        if top.children and top.children[-1].kind == TEXT:
            top.children[-1].text += data
        else:
            top.children.append(self._node(TEXT, text=data))

    def handle_comment(self, data: str) -> None:
        self._stack[-1].children.append(self._node(COMMENT, text=data))

    def handle_decl(self, decl: str) -> None:  # doctype: not represented
        pass

    def unknown_decl(self, data: str) -> None:
        pass

    def handle_pi(self, data: str) -> None:
        pass

    def finish(self) -> DomTree:
        self.close()
        self._ensure_body()
        return DomTree(root=self.root, node_count=self._next_id)


def parse_html(data: bytes | str, source_url: str | None = None) -> DomTree:
    """Parse raw HTML into a DomTree; total over any decodable input.

    Accepts bytes (decoded per BOM/meta charset, lossy replacement) or an
    already-decoded string. Raises EncodingError only for a declared charset
    with no available codec.
    """
    text = decode_html_bytes(data) if isinstance(data, bytes) else data
    builder = _TreeBuilder()
    builder.feed(text)
    tree = builder.finish()
    tree.source_url = source_url
    return tree


# --- serialization -----------------------------------------------------------


def _escape_attr(value: str) -> str:
    return escape(value, quote=True)


def start_tag_markup(node: DomNode) -> str:
    """The exact open-tag text the serializer emits for an element."""
    parts = [f"<{node.tag}"]
    for key, value in node.attrs.items():
        parts.append(f' {key}="{_escape_attr(value)}"')
    parts.append(">")
    return "".join(parts)


def end_tag_markup(node: DomNode) -> str:
    """The exact close-tag text the serializer emits ('' for voids)."""
    if node.tag in VOID_ELEMENTS:
        return ""
    return f"</{node.tag}>"


def leaf_markup(node: DomNode, raw: bool = False) -> str:
    """Serialized form of a text or comment node.

    ``raw`` means the parent is a raw-text element (script/style), where
    character references are not interpreted and so not re-escaped.
    """
    if node.kind == COMMENT:
        return f"<!--{node.text}-->"
    return node.text if raw else escape(node.text, quote=False)


def _write(node: DomNode, out: list[str], raw: bool) -> None:
    if node.kind != ELEMENT:
        out.append(leaf_markup(node, raw))
        return
    out.append(start_tag_markup(node))
    if node.tag in VOID_ELEMENTS:
        return
    child_raw = node.tag in RAW_TEXT_ELEMENTS
    for child in node.children:
        _write(child, out, child_raw)
    out.append(end_tag_markup(node))


def serialize(tree: DomTree | DomNode) -> str:
    """Serialize back to HTML; parse(serialize(t)) is structurally equal to t."""
    root = tree.root if isinstance(tree, DomTree) else tree
    out: list[str] = []
    _write(root, out, raw=False)
    return "".join(out)


# --- structural equality -----------------------------------------------------


def node_equal(a: DomNode, b: DomNode) -> bool:
    """Structural equality on kind/tag/attrs/text, ignoring node ids."""
    if a.kind != b.kind:
        return False
    if a.kind == ELEMENT:
        if a.tag != b.tag or a.attrs != b.attrs:
            return False
        if len(a.children) != len(b.children):
            return False
        return all(node_equal(x, y) for x, y in zip(a.children, b.children))
    return a.text == b.text


def tree_equal(a: DomTree, b: DomTree) -> bool:
    return node_equal(a.root, b.root)


# --- canonical tokenizer -----------------------------------------------------

_TOKEN_RE = re.compile(r'[<>="/;]|[^<>="/;\s]+')


def count_tokens(text: str) -> int:
    """Count tokens under the canonical tokenizer.

    Rule: split on Unicode whitespace, then split off each of the characters
    ``< > = " / ;`` as single-character tokens; the count is the number of
    resulting non-empty tokens. Deterministic and dependency-free so that
    reduction metrics are reproducible bit-for-bit.
    """
    return len(_TOKEN_RE.findall(text))
