"""Content extraction from final pages.

Pages of one content type are rendered from one HTML template, so the
content "box" can be addressed positionally: the Nth occurrence of a
given tag counted in document order from the page top. This module
locates that box with a lightweight tag scanner (no tree building),
strips the markup down to clean text, and collects the hyperlinks and
images inside the box as classified asset references.

The scanner is deliberately not a spec-complete HTML5 tree builder. It
handles what positional tag counting needs: attributes with ``>`` inside
quotes, comments, CDATA sections, raw-text elements (script/style),
case-insensitive tag names, void and self-closing elements, and graceful
recovery from unclosed tags.
"""

from __future__ import annotations

import html
import logging
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

from .frontier import normalize_url
from .links import Anchor, match_criterion
from .targets import HarvestTarget, LinkKind

__all__ = [
    "HtmlDocument",
    "BoxFragment",
    "ExtractedRecord",
    "BoxNotFound",
    "locate_box",
    "strip_tags",
    "extract_anchors",
    "extract_record",
    "fnv1a64",
]

logger = logging.getLogger(__name__)

# Elements whose content is never text: dropped wholesale.
_RAW_TEXT_TAGS = {"script", "style"}

# Void elements per the HTML standard: no content, no end tag.
_VOID_TAGS = {
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
}

# Tags whose start or end marks a word boundary in the stripped text, so
# that e.g. adjacent table cells do not fuse. Inline tags (a, b, span...)
# are deliberately absent.
_BLOCK_TAGS = {
    "address", "article", "aside", "blockquote", "br", "caption", "dd",
    "div", "dl", "dt", "fieldset", "figcaption", "figure", "footer",
    "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr", "li",
    "main", "nav", "ol", "option", "p", "pre", "section", "select",
    "table", "tbody", "td", "tfoot", "th", "thead", "tr", "ul",
}


@dataclass(frozen=True)
class HtmlDocument:
    """Decoded page text plus the URL relative links resolve against."""

    raw: str
    base_url: str


@dataclass(frozen=True)
class BoxFragment:
    """The selected element's subtree as a substring of the page.

    ``inner`` spans the start tag through the matching end tag. When the
    end tag was missing and recovery kicked in, ``unclosed`` is True.
    """

    inner: str
    start_offset: int
    end_offset: int
    unclosed: bool = False


@dataclass(frozen=True)
class ExtractedRecord:
    """Cleaned text and classified asset links from one final page."""

    target_id: str
    source_url: str
    clean_text: str
    asset_links: tuple[tuple[str, LinkKind], ...]
    harvested_at: int
    content_hash: int


class BoxNotFound(Exception):
    """The page has fewer focus-tag occurrences than the ordinal asks for.

    Usually means the site was redesigned and the focus point parameter
    is stale. ``found_count`` says how many occurrences exist.
    """

    def __init__(self, tag_name: str, ordinal: int, found_count: int) -> None:
        self.found_count = found_count
        super().__init__(
            f"focus point <{tag_name}> #{ordinal} not found "
            f"({found_count} occurrence(s) present)"
        )


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash; the stable content hash for clean text."""
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


# --- tag scanner ------------------------------------------------------------


class TokenType(Enum):
    TEXT = "text"
    START = "start"
    END = "end"
    COMMENT = "comment"
    DECL = "decl"


@dataclass(frozen=True)
class Token:
    type: TokenType
    start: int
    end: int
    name: str = ""
    attrs: tuple[tuple[str, str], ...] = ()
    self_closing: bool = False


_TAG_NAME_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9:-]*")
_ATTR_RE = re.compile(
    r"""\s*([^\s=/>]+)(?:\s*=\s*("[^"]*"|'[^']*'|[^\s>]*))?"""
)


def _parse_attrs(text: str) -> tuple[tuple[str, str], ...]:
    """Parse the attribute region of a start tag.

    Values are unquoted and entity-decoded; names are lowercased.
    Quoted values may contain ``>`` (the scanner already accounted for
    that when finding the tag end).
    """
    attrs = []
    pos = 0
    while pos < len(text):
        m = _ATTR_RE.match(text, pos)
        if not m or not m.group(1):
            break
        name = m.group(1).lower()
        value = m.group(2)
        if value is None:
            value = ""
        elif value[:1] in ("'", '"') and value[-1:] == value[:1] and len(value) >= 2:
            value = value[1:-1]
        attrs.append((name, html.unescape(value)))
        pos = m.end()
        if pos == m.start():
            pos += 1
    return tuple(attrs)


def _find_tag_end(raw: str, start: int) -> int:
    """Index just past the ``>`` closing the tag that opens at ``start``.

    Honors single and double quotes so a ``>`` inside an attribute value
    does not terminate the tag. Returns len(raw) when unterminated.
    """
    i = start
    n = len(raw)
    quote = ""
    while i < n:
        ch = raw[i]
        if quote:
            if ch == quote:
                quote = ""
        elif ch in ("'", '"'):
            quote = ch
        elif ch == ">":
            return i + 1
        i += 1
    return n


def tokenize(raw: str) -> Iterator[Token]:
    """Scan HTML into a flat token stream with character offsets.

    Malformed input degrades to text: a ``<`` that does not open a tag,
    comment, or declaration is literal content. Unterminated constructs
    extend to end of input. Script and style content is a single opaque
    region ending at the matching close tag.
    """
    n = len(raw)
    pos = 0
    text_start = 0

    def flush(upto: int) -> Iterator[Token]:
        if upto > text_start:
            yield Token(TokenType.TEXT, text_start, upto)

    while pos < n:
        lt = raw.find("<", pos)
        if lt == -1:
            break
        nxt = raw[lt + 1 : lt + 2]
        if nxt == "?":
            # Processing instructions degrade to bogus comments.
            end = raw.find(">", lt + 2)
            end = n if end == -1 else end + 1
            yield from flush(lt)
            yield Token(TokenType.DECL, lt, end)
            pos = text_start = end
            continue
        if nxt == "!":
            if raw.startswith("<!--", lt):
                end = raw.find("-->", lt + 4)
                end = n if end == -1 else end + 3
                yield from flush(lt)
                yield Token(TokenType.COMMENT, lt, end)
            elif raw.startswith("<![CDATA[", lt):
                end = raw.find("]]>", lt + 9)
                end = n if end == -1 else end + 3
                yield from flush(lt)
                yield Token(TokenType.DECL, lt, end)
            else:
                end = raw.find(">", lt + 2)
                end = n if end == -1 else end + 1
                yield from flush(lt)
                yield Token(TokenType.DECL, lt, end)
            pos = text_start = end
            continue
        if nxt == "/":
            m = _TAG_NAME_RE.match(raw, lt + 2)
            if not m:
                # "</" without a tag name: bogus comment to the next ">".
                end = raw.find(">", lt + 2)
                end = n if end == -1 else end + 1
                yield from flush(lt)
                yield Token(TokenType.DECL, lt, end)
                pos = text_start = end
                continue
            end = _find_tag_end(raw, lt)
            yield from flush(lt)
            yield Token(TokenType.END, lt, end, name=m.group(0).lower())
            pos = text_start = end
            continue
        m = _TAG_NAME_RE.match(raw, lt + 1)
        if not m:
            # "<" followed by anything but a name: literal text.
            pos = lt + 1
            continue
        name = m.group(0).lower()
        end = _find_tag_end(raw, lt)
        tag_body = raw[m.end() : end - 1] if end > m.end() else ""
        self_closing = tag_body.rstrip().endswith("/")
        if self_closing:
            tag_body = tag_body.rstrip()[:-1]
        yield from flush(lt)
        yield Token(
            TokenType.START,
            lt,
            end,
            name=name,
            attrs=_parse_attrs(tag_body),
            self_closing=self_closing,
        )
        pos = text_start = end
        if name in _RAW_TEXT_TAGS and not self_closing:
            close = re.search(rf"</{name}\b", raw[end:], re.IGNORECASE)
            content_end = n if close is None else end + close.start()
            if content_end > end:
                yield Token(TokenType.COMMENT, end, content_end)
            pos = text_start = content_end
    yield from flush(n)


def _is_childless(token: Token) -> bool:
    return token.name in _VOID_TAGS or token.self_closing


def locate_box(doc: HtmlDocument, focus) -> BoxFragment:
    """Select the subtree of the ordinal-th ``focus.tag_name`` start tag.

    Occurrences are counted in document order from the page top, nested
    ones included: a table inside a table is occurrence n+1. The subtree
    ends at the end tag matching by same-name nesting depth. Void and
    self-closing occurrences have empty subtrees.

    Raises :class:`BoxNotFound` when the page has fewer occurrences than
    the ordinal. A missing end tag is recovered, not failed: the subtree
    runs to the enclosing element's end tag, or to end of input, and the
    fragment is flagged ``unclosed``.
    """
    name = focus.tag_name.lower()
    tokens = list(tokenize(doc.raw))
    count = 0
    stack: list[str] = []  # open element names when the box starts

    for idx, tok in enumerate(tokens):
        if tok.type == TokenType.START:
            if tok.name == name:
                count += 1
                if count == focus.ordinal:
                    return _box_from(doc.raw, tokens, idx, stack)
            if not _is_childless(tok):
                stack.append(tok.name)
        elif tok.type == TokenType.END:
            # Pop the nearest open element of that name, tolerating
            # mismatched close tags.
            for j in range(len(stack) - 1, -1, -1):
                if stack[j] == tok.name:
                    del stack[j:]
                    break
    raise BoxNotFound(name, focus.ordinal, count)


def _box_from(
    raw: str, tokens: list[Token], start_idx: int, open_stack: list[str]
) -> BoxFragment:
    start_tok = tokens[start_idx]
    if _is_childless(start_tok):
        return BoxFragment(
            inner=raw[start_tok.start : start_tok.end],
            start_offset=start_tok.start,
            end_offset=start_tok.end,
        )
    name = start_tok.name
    depth = 1
    parent = open_stack[-1] if open_stack else None
    parent_depth = 1
    parent_end: int | None = None

    for tok in tokens[start_idx + 1 :]:
        if tok.type == TokenType.START and not _is_childless(tok):
            if tok.name == name:
                depth += 1
            if tok.name == parent:
                parent_depth += 1
        elif tok.type == TokenType.END:
            if tok.name == name:
                depth -= 1
                if depth == 0:
                    return BoxFragment(
                        inner=raw[start_tok.start : tok.end],
                        start_offset=start_tok.start,
                        end_offset=tok.end,
                    )
            if tok.name == parent and parent_end is None:
                parent_depth -= 1
                if parent_depth == 0:
                    parent_end = tok.start

    end = parent_end if parent_end is not None else len(raw)
    logger.warning(
        "unclosed <%s>: subtree recovered to offset %d", name, end
    )
    return BoxFragment(
        inner=raw[start_tok.start : end],
        start_offset=start_tok.start,
        end_offset=end,
        unclosed=True,
    )


def strip_tags(source: BoxFragment | HtmlDocument | str) -> str:
    """Reduce markup to clean text.

    All tags go, including malformed and unclosed ones. Script, style,
    comment, and CDATA regions are dropped wholesale. Character entities
    (named and numeric) are decoded. Block-level tag boundaries become
    spaces so adjacent cells and paragraphs do not fuse, then all
    whitespace runs collapse to single spaces and the ends are trimmed.

    The output never contains ``<`` or ``>``: angle brackets surviving in
    text (stray markup, decoded lt/gt entities) are scrubbed to spaces.
    """
    if isinstance(source, BoxFragment):
        raw = source.inner
    elif isinstance(source, HtmlDocument):
        raw = source.raw
    else:
        raw = source
    parts: list[str] = []
    for tok in tokenize(raw):
        if tok.type == TokenType.TEXT:
            text = html.unescape(raw[tok.start : tok.end])
            parts.append(text.replace("<", " ").replace(">", " "))
        elif tok.type in (TokenType.START, TokenType.END):
            if tok.name in _BLOCK_TAGS:
                parts.append(" ")
    return " ".join("".join(parts).split())


def _host_of(url: str) -> str | None:
    from urllib.parse import urlsplit

    try:
        return urlsplit(url).hostname
    except ValueError:
        return None


def _link_candidates(
    raw: str, base_url: str, target_host: str | None, include_images: bool
) -> list[tuple[str, Anchor]]:
    """Single document-order pass over ``a href`` and ``img src``.

    Returns (element name, anchor) pairs. Hrefs the normalizer rejects
    are omitted. An open anchor's text ends at the matching close tag or,
    as browsers do, at the next anchor start. Images carry empty text.
    """
    found: list[tuple[int, str, Anchor]] = []
    open_anchor: tuple[str, int, int] | None = None  # (href, tag start, inner start)

    def close(upto: int) -> None:
        nonlocal open_anchor
        if open_anchor is None:
            return
        href, tag_start, inner_start = open_anchor
        open_anchor = None
        normalized = normalize_url(base_url, href)
        if normalized is None:
            return
        found.append(
            (
                tag_start,
                "a",
                Anchor(
                    href=normalized,
                    text=strip_tags(raw[inner_start:upto]),
                    host_matches_target=_host_of(normalized) == target_host,
                ),
            )
        )

    for tok in tokenize(raw):
        if tok.type == TokenType.START and tok.name == "a":
            close(tok.start)
            href = next((v for k, v in tok.attrs if k == "href"), None)
            if href is not None:
                open_anchor = (href, tok.start, tok.end)
                if tok.self_closing:
                    close(tok.end)
        elif tok.type == TokenType.END and tok.name == "a":
            close(tok.start)
        elif include_images and tok.type == TokenType.START and tok.name == "img":
            src = next((v for k, v in tok.attrs if k == "src"), None)
            if src is None:
                continue
            normalized = normalize_url(base_url, src)
            if normalized is None:
                continue
            found.append(
                (
                    tok.start,
                    "img",
                    Anchor(
                        href=normalized,
                        text="",
                        host_matches_target=_host_of(normalized) == target_host,
                    ),
                )
            )
    close(len(raw))
    found.sort(key=lambda item: item[0])
    return [(name, anchor) for _, name, anchor in found]


def extract_anchors(
    doc: HtmlDocument, target_host: str | None = None
) -> list[Anchor]:
    """Collect every ``<a href>`` of the document, in document order.

    Hrefs are resolved and normalized against ``doc.base_url``; links the
    normalizer rejects (mail, script, malformed) are omitted. Anchor text
    is the stripped inner content. ``target_host`` is the host the
    ``host_matches_target`` flag compares against; it defaults to the
    document's own host.
    """
    if target_host is None:
        target_host = _host_of(doc.base_url)
    return [
        anchor
        for name, anchor in _link_candidates(
            doc.raw, doc.base_url, target_host, include_images=False
        )
        if name == "a"
    ]


def extract_record(
    doc: HtmlDocument, target: HarvestTarget, now: int
) -> ExtractedRecord:
    """Harvest one final page into a record.

    Locates the target's focus box, strips it to clean text, and walks
    the box for asset candidates: anchors and ``img src`` references, in
    document order. Each candidate gets the kind of the first matching
    content link rule; candidates matching no rule are omitted.

    Raises :class:`BoxNotFound` when the focus point is stale; callers
    record it as a per-page error and continue the run.
    """
    box = locate_box(doc, target.focus_point)
    clean_text = strip_tags(box)

    assets: list[tuple[str, LinkKind]] = []
    for _, anchor in _link_candidates(
        box.inner, doc.base_url, _host_of(doc.base_url), include_images=True
    ):
        for rule in target.content_link_rules:
            if match_criterion(anchor, rule):
                assets.append((anchor.href, rule.kind))
                break

    return ExtractedRecord(
        target_id=target.id,
        source_url=doc.base_url,
        clean_text=clean_text,
        asset_links=tuple(assets),
        harvested_at=now,
        content_hash=fnv1a64(clean_text.encode("utf-8")),
    )
