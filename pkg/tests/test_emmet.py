"""Compact abbreviation codec: grammar, offsets, roundtrips."""

from __future__ import annotations

import random

import pytest

from webpercept.errors import AbbreviationSyntaxError
from webpercept.html_ingest import (
    DomNode,
    count_tokens,
    find_first,
    parse_html,
    serialize,
)
from webpercept.transducer import decode_compact, encode_compact

from conftest import random_fragment


def encode_at(html: str, tag: str) -> str:
    node = find_first(parse_html(html).root, tag)
    return encode_compact(node).text


# --- encoding oracles -------------------------------------------------------


def test_encode_id_and_child():
    assert encode_at('<div id="a"><p>hi</p></div>', "div") == "div#a>p{hi}"


def test_encode_siblings():
    assert encode_at("<ul><li>x</li><li>y</li></ul>", "ul") == "ul>li{x}+li{y}"


def test_encode_classes():
    assert encode_at('<div class="a b">t</div>', "div") == "div.a.b{t}"


def test_encode_attr_bare_and_quoted():
    got = encode_at('<a href="/go" title="two words">x</a>', "a")
    assert got == 'a[href=/go title="two words"]{x}'


def test_parens_only_for_nonfinal_deep_sibling():
    got = encode_at("<div><ul><li>a</li></ul><p>b</p></div>", "div")
    assert got == "div>(ul>li{a})+p{b}"
    got = encode_at("<div><p>b</p><ul><li>a</li></ul></div>", "div")
    assert got == "div>p{b}+ul>li{a}"


def test_text_truncated_with_mark():
    long = "x" * 100
    got = encode_at(f"<p>{long}</p>", "p")
    assert got == "p{" + "x" * 80 + "…}"


def test_text_escapes():
    got = encode_at("<p>a } b \\ c</p>", "p")
    assert got == "p{a \\} b \\\\ c}"
    decoded = decode_compact(got)
    assert decoded.root.children[0].text == "a } b \\ c"


def test_unsafe_id_goes_to_bracket():
    got = encode_at('<div id="a b">x</div>', "div")
    assert got == 'div[id="a b"]{x}'


def test_inexpressible_attr_name_dropped():
    node = DomNode(id=0, kind="element", tag="p", attrs={"9bad": "v", "ok": "1"})
    assert encode_compact(node).text == "p[ok=1]"


def test_comments_and_blank_text_not_encoded():
    got = encode_at("<div><!-- c -->  <p>x</p></div>", "div")
    assert got == "div>p{x}"


# --- decoding ----------------------------------------------------------------


def test_decode_structure():
    tree = decode_compact('div#a.x.y[href=/go data-n="v v"]{txt}>p')
    root = tree.root
    assert root.tag == "div"
    assert root.attrs == {"id": "a", "class": "x y", "href": "/go", "data-n": "v v"}
    kinds = [(c.kind, getattr(c, "tag", "")) for c in root.children]
    assert kinds == [("text", ""), ("element", "p")]
    assert root.children[0].text == "txt"


def test_decode_multi_root_wrapped_in_fragment():
    tree = decode_compact("p{a}+p{b}")
    assert tree.root.tag == "fragment"
    assert [c.tag for c in tree.root.children] == ["p", "p"]


def test_decode_assigns_document_order_ids():
    tree = decode_compact("div>p{a}+span{b}")
    ids = [n.id for n in tree.walk()]
    assert ids == list(range(len(ids)))


def test_decode_group_sets_siblings():
    tree = decode_compact("div>(ul>li{a})+p{b}")
    div = tree.root
    assert [c.tag for c in div.children] == ["ul", "p"]
    assert div.children[0].children[0].tag == "li"


@pytest.mark.parametrize(
    "src,offset",
    [
        ("div>>p", 4),
        ("", 0),
        ("#x", 0),
        ("div{open", 8),
        ("div[a=1", 7),
        ("(p)>x", 3),
        ("div+*", 4),
        ("p{a}junk", 4),
        ('div[x="v]', 9),
    ],
)
def test_syntax_error_offsets(src, offset):
    with pytest.raises(AbbreviationSyntaxError) as exc_info:
        decode_compact(src)
    assert exc_info.value.position == offset


# --- roundtrips ----------------------------------------------------------------


def element_skeleton(node: DomNode):
    if node.kind != "element":
        return None
    return (
        node.tag,
        dict(node.attrs),
        [element_skeleton(c) for c in node.children if c.kind == "element"],
    )


ROUNDTRIP_HTML = [
    "<div><p>a</p><p>b</p></div>",
    '<form action="/s" method="post"><input type="text" name="q"><button>Go</button></form>',
    "<table><tr><td>1</td><td>2</td></tr></table>",
    '<nav><ul><li><a href="/a">A</a></li><li><a href="/b">B</a></li></ul></nav>',
    '<section id="s1" class="hero wide"><h1>Title</h1><p>Body text here</p></section>',
    "<div><div><div><p>deep</p></div></div></div>",
]


@pytest.mark.parametrize("html", ROUNDTRIP_HTML)
def test_roundtrip_fixtures(html):
    tree = parse_html(html)
    decoded = decode_compact(encode_compact(tree))
    assert element_skeleton(decoded.root) == element_skeleton(tree.root)


@pytest.mark.parametrize("seed", range(60))
def test_roundtrip_generated(seed):
    tree = random_fragment(random.Random(seed))
    decoded = decode_compact(encode_compact(tree))
    assert element_skeleton(decoded.root) == element_skeleton(tree.root)


def test_short_text_preserved_exactly():
    tree = parse_html("<div><p>short words</p><span>more</span></div>")
    decoded = decode_compact(encode_compact(tree))
    texts = [n.text for n in decoded.walk() if n.kind == "text"]
    assert texts == ["short words", "more"]


@pytest.mark.parametrize("seed", range(30))
def test_token_count_beats_serialization(seed):
    tree = random_fragment(random.Random(seed))
    elements = sum(1 for n in tree.walk() if n.kind == "element")
    enc = encode_compact(tree)
    assert enc.token_count == count_tokens(enc.text)
    if elements >= 2:
        assert enc.token_count < count_tokens(serialize(tree))


def test_single_element_token_boundary():
    node = DomNode(id=0, kind="element", tag="p", children=[])
    enc = encode_compact(node)
    assert enc.text == "p"
    assert enc.token_count == 1
