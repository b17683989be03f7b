"""Stage five of transduction: compact abbreviation codec.

Grammar (encode and decode agree on it):

    items    = item ("+" item)*
    item     = "(" items ")" | text | element
    element  = name ("#" name | "." name | attrs | text)* (">" items)?
    attrs    = "[" (name ("=" (quoted | bare))?)* "]"
    text     = "{" chars "}"            with \\} \\\\ escapes
    quoted   = '"' chars '"'            with \\" \\\\ escapes

`>` descends, `+` separates siblings, parentheses group a non-final
sibling that has children of its own (the final sibling needs none:
`ul>li+li>b` already nests `b` under the last `li`).

Whitespace-only text and comments are not encoded; text is collapsed
and truncated, so decoding recovers the tag hierarchy and attributes,
not the full prose.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import AbbreviationSyntaxError
from ..html_ingest import (
    COMMENT,
    ELEMENT,
    TEXT,
    DomNode,
    DomTree,
    assign_document_order_ids,
    count_tokens,
)

DEFAULT_TEXT_CHARS = 80
TRUNCATION_MARK = "…"

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_-]*")
_WORD_RE = re.compile(r"[A-Za-z0-9_-]+")
_SAFE_CLASS_RE = re.compile(r"[A-Za-z0-9_-]+\Z")
# Bare attribute values: printable, no whitespace, nothing the grammar uses.
_SAFE_BARE_RE = re.compile(r"[^\s\]\"'=]+\Z")
_BARE_RE = re.compile(r"[^\s\]\"'=]+")


@dataclass(frozen=True)
class CompactEncoding:
    text: str
    token_count: int


# --- encoding ----------------------------------------------------------------


def _collapse(text: str, limit: int) -> str:
    joined = " ".join(text.split())
    if len(joined) > limit:
        return joined[:limit] + TRUNCATION_MARK
    return joined


def _escape_text(text: str) -> str:
    return text.replace("\\", "\\\\").replace("}", "\\}")


def _escape_quoted(value: str) -> str:
    return value.replace("\\", "\\\\").replace('"', '\\"')


def _attr_def(key: str, value: str) -> str:
    if value and _SAFE_BARE_RE.match(value):
        return f"{key}={value}"
    return f'{key}="{_escape_quoted(value)}"'


def _element_head(node: DomNode) -> str:
    parts = [node.tag]
    bracket: list[str] = []
    for key, value in node.attrs.items():
        if key == "id" and _SAFE_CLASS_RE.match(value):
            parts.append(f"#{value}")
            continue
        if key == "class":
            names = value.split()
            if names and all(_SAFE_CLASS_RE.match(n) for n in names):
                parts.extend(f".{n}" for n in names)
                continue
        if _NAME_RE.fullmatch(key):
            bracket.append(_attr_def(key, value))
        # names the grammar cannot express (garbage markup) are dropped
    if bracket:
        parts.append("[" + " ".join(bracket) + "]")
    return "".join(parts)


def _encode_node(node: DomNode, limit: int) -> tuple[str, bool]:
    """Abbreviation for one element; flag says it has a child suffix."""
    head = _element_head(node)
    children = [c for c in node.children if c.kind != COMMENT]
    if children and children[0].kind == TEXT:
        lead = _collapse(children[0].text, limit)
        if lead:
            head += "{" + _escape_text(lead) + "}"
        children = children[1:]

    items: list[tuple[str, bool]] = []
    for child in children:
        if child.kind == TEXT:
            text = _collapse(child.text, limit)
            if text:
                items.append(("{" + _escape_text(text) + "}", False))
        else:
            items.append(_encode_node(child, limit))
    if not items:
        return head, False
    rendered = []
    for index, (abbrev, deep) in enumerate(items):
        if deep and index < len(items) - 1:
            abbrev = f"({abbrev})"
        rendered.append(abbrev)
    return head + ">" + "+".join(rendered), True


def encode_compact(tree: DomTree | DomNode, text_limit: int = DEFAULT_TEXT_CHARS) -> CompactEncoding:
    """Encode a tree as an Emmet-style abbreviation."""
    root = tree.root if isinstance(tree, DomTree) else tree
    if root.kind != ELEMENT:
        text = "{" + _escape_text(_collapse(root.text, text_limit)) + "}"
    else:
        text, _ = _encode_node(root, text_limit)
    return CompactEncoding(text=text, token_count=count_tokens(text))


# --- decoding ----------------------------------------------------------------


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.pos = 0

    def fail(self, message: str) -> "AbbreviationSyntaxError":
        return AbbreviationSyntaxError(message, self.pos)

    def peek(self) -> str:
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def parse(self) -> list[DomNode]:
        if not self.src:
            raise self.fail("empty abbreviation")
        nodes = self.items()
        if self.pos != len(self.src):
            raise self.fail(f"unexpected {self.peek()!r}")
        return nodes

    def items(self) -> list[DomNode]:
        nodes = self.item()
        while self.peek() == "+":
            self.pos += 1
            nodes.extend(self.item())
        return nodes

    def item(self) -> list[DomNode]:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            nodes = self.items()
            if self.peek() != ")":
                raise self.fail("unclosed group, expected ')'")
            self.pos += 1
            if self.peek() == ">":
                raise self.fail("a group cannot take children")
            return nodes
        if ch == "{":
            return [DomNode(id=0, kind=TEXT, text=self.braced_text())]
        return [self.element()]

    def element(self) -> DomNode:
        match = _NAME_RE.match(self.src, self.pos)
        if not match:
            raise self.fail("expected an element name")
        self.pos = match.end()
        node = DomNode(id=0, kind=ELEMENT, tag=match.group().lower())
        classes: list[str] = []
        while True:
            ch = self.peek()
            if ch == "#":
                self.pos += 1
                node.attrs["id"] = self.name("id")
            elif ch == ".":
                self.pos += 1
                classes.append(self.name("class"))
            elif ch == "[":
                self.attr_block(node)
            elif ch == "{":
                node.children.append(DomNode(id=0, kind=TEXT, text=self.braced_text()))
            else:
                break
        if classes:
            node.attrs["class"] = " ".join(classes)
        if self.peek() == ">":
            self.pos += 1
            node.children.extend(self.items())
        return node

    def name(self, what: str) -> str:
        match = _WORD_RE.match(self.src, self.pos)
        if not match:
            raise self.fail(f"expected a {what} name")
        self.pos = match.end()
        return match.group()

    def attr_block(self, node: DomNode) -> None:
        self.pos += 1  # consume '['
        while True:
            while self.peek().isspace():
                self.pos += 1
            ch = self.peek()
            if ch == "]":
                self.pos += 1
                return
            if not ch:
                raise self.fail("unclosed attribute block, expected ']'")
            match = _NAME_RE.match(self.src, self.pos)
            if not match:
                raise self.fail("expected an attribute name")
            key = match.group().lower()
            self.pos = match.end()
            value = ""
            if self.peek() == "=":
                self.pos += 1
                value = self.attr_value()
            node.attrs[key] = value

    def attr_value(self) -> str:
        if self.peek() == '"':
            self.pos += 1
            return self.read_escaped('"', "unterminated quoted value")
        match = _BARE_RE.match(self.src, self.pos)
        if not match:
            raise self.fail("expected an attribute value")
        self.pos = match.end()
        return match.group()

    def braced_text(self) -> str:
        self.pos += 1  # consume '{'
        return self.read_escaped("}", "unterminated text, expected '}'")

    def read_escaped(self, closer: str, error: str) -> str:
        out: list[str] = []
        while True:
            if self.pos >= len(self.src):
                raise self.fail(error)
            ch = self.src[self.pos]
            if ch == "\\" and self.pos + 1 < len(self.src):
                out.append(self.src[self.pos + 1])
                self.pos += 2
                continue
            if ch == closer:
                self.pos += 1
                return "".join(out)
            out.append(ch)
            self.pos += 1


def decode_compact(enc: CompactEncoding | str) -> DomTree:
    """Rebuild a tree skeleton from an abbreviation.

    Raises AbbreviationSyntaxError (with character offset) on malformed
    input. Multiple top-level items are wrapped in a synthetic
    <fragment> element so the result is always a single tree.
    """
    src = enc.text if isinstance(enc, CompactEncoding) else enc
    nodes = _Parser(src).parse()
    if len(nodes) == 1 and nodes[0].kind == ELEMENT:
        root = nodes[0]
    else:
        root = DomNode(id=0, kind=ELEMENT, tag="fragment", children=nodes)
    count = assign_document_order_ids(root)
    return DomTree(root=root, node_count=count)
