"""Affordance extraction: find what a page lets an agent do.

An affordance is an interactive element described by what it does
(kind, label, target) rather than how it looks. Extraction is a pure
read of the tree; node ids are kept so callers can trace each
affordance back to its DOM element.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..html_ingest import ELEMENT, TEXT, DomNode, DomTree

# input[type=...] values that act as push buttons.
_BUTTON_INPUT_TYPES = frozenset({"button", "reset", "image"})

LINK = "link"
BUTTON = "button"
SUBMIT = "submit"
TEXT_INPUT = "text_input"
CHECKBOX = "checkbox"
RADIO = "radio"
SELECT = "select"
TEXTAREA = "textarea"
FORM = "form"

AFFORDANCE_KINDS = frozenset(
    {LINK, BUTTON, SUBMIT, TEXT_INPUT, CHECKBOX, RADIO, SELECT, TEXTAREA, FORM}
)


@dataclass(frozen=True)
class AffordanceNode:
    """One actionable element lifted out of the DOM."""

    node_id: int
    kind: str
    label: str
    target: str | None = None
    media_type_hint: str | None = None
    rel: str | None = None
    name: str | None = None

    def to_dict(self) -> dict:
        out: dict = {"node_id": self.node_id, "kind": self.kind, "label": self.label}
        if self.target is not None:
            out["target"] = self.target
        if self.media_type_hint is not None:
            out["media_type_hint"] = self.media_type_hint
        if self.rel is not None:
            out["rel"] = self.rel
        if self.name is not None:
            out["name"] = self.name
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "AffordanceNode":
        return cls(
            node_id=int(data["node_id"]),
            kind=data["kind"],
            label=data.get("label", ""),
            target=data.get("target"),
            media_type_hint=data.get("media_type_hint"),
            rel=data.get("rel"),
            name=data.get("name"),
        )


def classify_interactive(node: DomNode) -> str | None:
    """Return the affordance kind for an element, or None if inert.

    Hidden inputs carry no user-facing action, so they classify as
    inert. Unrecognized input types degrade to text_input, the closest
    generic interaction.
    """
    if node.kind != ELEMENT:
        return None
    tag = node.tag
    if tag == "a":
        return LINK if "href" in node.attrs else None
    if tag == "button":
        btype = node.attrs.get("type", "").strip().lower()
        return SUBMIT if btype == "submit" else BUTTON
    if tag == "input":
        itype = node.attrs.get("type", "").strip().lower()
        if itype == "hidden":
            return None
        if itype == "submit":
            return SUBMIT
        if itype in _BUTTON_INPUT_TYPES:
            return BUTTON
        if itype == "checkbox":
            return CHECKBOX
        if itype == "radio":
            return RADIO
        return TEXT_INPUT
    if tag == "select":
        return SELECT
    if tag == "textarea":
        return TEXTAREA
    if tag == "form":
        return FORM
    return None


def visible_text(node: DomNode) -> str:
    """Whitespace-collapsed concatenation of descendant text."""
    parts: list[str] = []
    for n in node.walk():
        if n.kind == TEXT:
            parts.append(n.text)
    return " ".join("".join(parts).split())


def resolve_label(node: DomNode, kind: str) -> str:
    """Pick a human-readable label.

    Precedence: visible text, then aria-label, then name or
    placeholder. A push-button input renders its value attribute as its
    face, so that counts as visible text.
    """
    if node.tag == "input":
        visible = ""
        if kind in (SUBMIT, BUTTON):
            visible = " ".join(node.attrs.get("value", "").split())
    else:
        visible = visible_text(node)
    if visible:
        return visible
    aria = " ".join(node.attrs.get("aria-label", "").split())
    if aria:
        return aria
    for attr in ("name", "placeholder"):
        val = " ".join(node.attrs.get(attr, "").split())
        if val:
            return val
    return ""


def _make_affordance(node: DomNode, kind: str) -> AffordanceNode:
    target = None
    media = None
    rel = None
    if kind == LINK:
        target = node.attrs.get("href")
        media = node.attrs.get("type") or None
        rel = node.attrs.get("rel") or None
    elif kind == FORM:
        target = node.attrs.get("action") or None
    return AffordanceNode(
        node_id=node.id,
        kind=kind,
        label=resolve_label(node, kind),
        target=target,
        media_type_hint=media,
        rel=rel,
        name=node.attrs.get("name") or None,
    )


def extract_affordances(tree: DomTree) -> list[AffordanceNode]:
    """All affordances in document order."""
    out: list[AffordanceNode] = []
    for node in tree.root.walk():
        kind = classify_interactive(node)
        if kind is not None:
            out.append(_make_affordance(node, kind))
    return out
