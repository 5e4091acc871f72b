"""Anchor classification: pagination link, title link, or ignorable.

Every anchor discovered on a non-final page gets exactly one of three
fates. Pagination links lead to more title lists at the same depth, title
links descend one hop toward final content, and everything else is
ignored. The decision is a pure function of the anchor, the page depth,
and the target's criteria.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from urllib.parse import urlsplit

from .targets import HarvestTarget, LinkRule, MatchScope, PagingCriterion

__all__ = ["Anchor", "LinkClass", "match_criterion", "classify_link"]


@dataclass(frozen=True)
class Anchor:
    """One hyperlink as seen by the classifier.

    ``href`` is already normalized; ``text`` is the whitespace-collapsed
    inner text; ``host_matches_target`` records whether the link stays on
    the target's host.
    """

    href: str
    text: str
    host_matches_target: bool


class LinkClass(Enum):
    PAGING = "paging"
    TITLE = "title"
    IGNORE = "ignore"


def match_criterion(anchor: Anchor, rule: PagingCriterion | LinkRule) -> bool:
    """Test an anchor against a keyword + query-structure criterion.

    Both parts must hold. The keyword part is vacuous when ``keywords``
    is empty; otherwise at least one keyword must appear (case-insensitive
    substring) in the text chosen by ``scope``. The structural part is
    vacuous when ``separator`` is empty; otherwise splitting the href's
    query component by the separator must yield exactly ``param_count``
    non-empty parts, and an href without a query component fails.
    """
    if rule.keywords:
        candidates: list[str] = []
        if rule.scope in (MatchScope.URL_ONLY, MatchScope.BOTH):
            candidates.append(anchor.href.lower())
        if rule.scope in (MatchScope.ANCHOR_TEXT_ONLY, MatchScope.BOTH):
            candidates.append(anchor.text.lower())
        if not any(
            kw.lower() in candidate for kw in rule.keywords for candidate in candidates
        ):
            return False

    if rule.separator:
        query = urlsplit(anchor.href).query
        if not query:
            return False
        parts = [p for p in query.split(rule.separator) if p]
        if len(parts) != rule.param_count:
            return False

    return True


def classify_link(
    anchor: Anchor, page_depth: int, target: HarvestTarget
) -> LinkClass:
    """Classify one anchor found on a page at ``page_depth``.

    Final pages (``page_depth == target.depth``) contribute content, not
    traversal, so all their anchors are ignored here. Otherwise the paging
    criterion is tried first: a pagination match stays at the same depth,
    which keeps same-host pagination URLs from ballooning the depth
    ledger through the title rule. A title match descends one hop. The
    title rule is ``target.title_criterion`` when configured, else the
    default: any anchor on the target's own host.
    """
    if page_depth >= target.depth:
        return LinkClass.IGNORE
    if match_criterion(anchor, target.paging_criterion):
        return LinkClass.PAGING
    if target.title_criterion is not None:
        if match_criterion(anchor, target.title_criterion):
            return LinkClass.TITLE
    elif anchor.host_matches_target:
        return LinkClass.TITLE
    return LinkClass.IGNORE
