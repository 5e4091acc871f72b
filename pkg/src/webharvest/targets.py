"""Harvesting target model: the administrator-edited parameter set.

A :class:`HarvestTarget` bundles everything needed to harvest one kind of
content from one site: the start URL, how many link hops separate it from
the final content pages, how to tell pagination links from title links,
where the content box sits on a final page, and how to classify asset
links found inside the box.

Targets are value objects. They are validated by :func:`validate_target`
(violations are returned as data, never raised) and round-trip through the
JSON configuration format via :func:`parse_config` / :func:`serialize_config`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import timedelta
from enum import Enum
from urllib.parse import urlsplit

__all__ = [
    "LinkKind",
    "MatchScope",
    "PagingCriterion",
    "LinkRule",
    "FocusPoint",
    "HarvestTarget",
    "CONTENT_TYPES",
    "ConfigError",
    "validate_target",
    "parse_config",
    "serialize_config",
    "target_from_dict",
    "target_to_dict",
]

# The six deployment-seeded content types. content_type is an open string
# tag; these are the conventional values, not a closed set.
CONTENT_TYPES = (
    "institution",
    "person",
    "publication",
    "activity",
    "news",
    "ipr",
)


class LinkKind(str, Enum):
    """Classification a link rule assigns to a matching hyperlink."""

    IMAGE = "image"
    FULL_TEXT = "full_text"
    OTHER = "other"


class MatchScope(str, Enum):
    """Which text a criterion's keywords are matched against."""

    URL_ONLY = "url_only"
    ANCHOR_TEXT_ONLY = "anchor_text_only"
    BOTH = "both"


@dataclass(frozen=True)
class PagingCriterion:
    """Keyword and query-structure matcher for pagination links.

    ``keywords`` are case-insensitive substring patterns. ``separator``
    splits the URL query component; when non-empty, the split must yield
    exactly ``param_count`` non-empty parts for the criterion to match.
    An empty separator disables the structural test.
    """

    keywords: tuple[str, ...] = ()
    separator: str = ""
    param_count: int = 0
    scope: MatchScope = MatchScope.URL_ONLY


@dataclass(frozen=True)
class LinkRule:
    """A paging-style matcher that assigns ``kind`` to matching links."""

    kind: LinkKind = LinkKind.OTHER
    keywords: tuple[str, ...] = ()
    separator: str = ""
    param_count: int = 0
    scope: MatchScope = MatchScope.URL_ONLY


@dataclass(frozen=True)
class FocusPoint:
    """Address of the content box: the ordinal-th ``tag_name`` element
    counted in document order from the page top (1-based)."""

    tag_name: str
    ordinal: int


@dataclass(frozen=True)
class HarvestTarget:
    """One administrator-defined harvesting job."""

    id: str
    institution_id: str
    content_type: str
    start_url: str
    depth: int
    paging_criterion: PagingCriterion
    focus_point: FocusPoint
    content_link_rules: tuple[LinkRule, ...]
    reharvest_period: timedelta
    max_pages: int
    enabled: bool = True
    title_criterion: LinkRule | None = None


class ConfigError(ValueError):
    """Raised when a configuration document cannot be accepted.

    Carries a human-readable message including line/position context for
    syntax errors. The whole document is rejected on the first problem.
    """


def _is_absolute_http_url(url: str) -> bool:
    try:
        parts = urlsplit(url)
    except ValueError:
        return False
    return parts.scheme in ("http", "https") and bool(parts.netloc)


def _criterion_violations(
    prefix: str, separator: str, param_count: int
) -> list[str]:
    out = []
    if param_count < 0:
        out.append(f"{prefix}param_count must be ≥ 0")
    if separator and param_count < 1:
        out.append(f"{prefix}param_count must be ≥ 1 when separator set")
    return out


def validate_target(target: HarvestTarget) -> list[str]:
    """Return every violated invariant of ``target``, in field order.

    An empty list means the target is valid. Violations are data: this
    function never raises for bad values.
    """
    violations: list[str] = []
    if not target.id:
        violations.append("id must be non-empty")
    if not _is_absolute_http_url(target.start_url):
        violations.append("start_url must be an absolute http(s) URL")
    if target.depth < 0:
        violations.append("depth must be ≥ 0")
    violations.extend(
        _criterion_violations(
            "", target.paging_criterion.separator, target.paging_criterion.param_count
        )
    )
    if target.title_criterion is not None:
        violations.extend(
            _criterion_violations(
                "title_criterion: ",
                target.title_criterion.separator,
                target.title_criterion.param_count,
            )
        )
    tag = target.focus_point.tag_name
    if not tag or not tag.isascii() or not tag.isalnum() or tag != tag.lower():
        violations.append("focus_point.tag_name must be lowercase ASCII letters/digits")
    if target.focus_point.ordinal < 1:
        violations.append("focus_point.ordinal must be ≥ 1")
    for i, rule in enumerate(target.content_link_rules):
        violations.extend(
            _criterion_violations(
                f"content_link_rules[{i}]: ", rule.separator, rule.param_count
            )
        )
    if target.reharvest_period <= timedelta(0):
        violations.append("reharvest_period must be > 0")
    if target.max_pages < 1:
        violations.append("max_pages must be ≥ 1")
    return violations


# --- configuration document format -----------------------------------------
#
# UTF-8 JSON array of target objects. Keys are the snake_case field names;
# the re-harvest duration is carried as integer seconds under
# `reharvest_period_s`; enumerations are lowercase strings.

_TARGET_KEYS = {
    "id",
    "institution_id",
    "content_type",
    "start_url",
    "depth",
    "paging_criterion",
    "title_criterion",
    "focus_point",
    "content_link_rules",
    "reharvest_period_s",
    "max_pages",
    "enabled",
}

_CRITERION_KEYS = {"keywords", "separator", "param_count", "scope"}
_RULE_KEYS = _CRITERION_KEYS | {"kind"}


def _expect(cond: bool, where: str, message: str) -> None:
    if not cond:
        raise ConfigError(f"{where}: {message}")


def _decode_scope(value: object, where: str) -> MatchScope:
    _expect(isinstance(value, str), where, "scope must be a string")
    try:
        return MatchScope(value)
    except ValueError:
        raise ConfigError(
            f"{where}: scope must be one of "
            + ", ".join(s.value for s in MatchScope)
        ) from None


def _decode_keywords(value: object, where: str) -> tuple[str, ...]:
    _expect(
        isinstance(value, list) and all(isinstance(k, str) for k in value),
        where,
        "keywords must be a list of strings",
    )
    return tuple(value)  # type: ignore[arg-type]


def _decode_criterion(obj: object, where: str) -> PagingCriterion:
    _expect(isinstance(obj, dict), where, "must be an object")
    assert isinstance(obj, dict)
    unknown = set(obj) - _CRITERION_KEYS
    _expect(not unknown, where, f"unknown keys: {sorted(unknown)}")
    missing = _CRITERION_KEYS - set(obj)
    _expect(not missing, where, f"missing keys: {sorted(missing)}")
    _expect(isinstance(obj["separator"], str), where, "separator must be a string")
    _expect(
        isinstance(obj["param_count"], int) and not isinstance(obj["param_count"], bool),
        where,
        "param_count must be an integer",
    )
    return PagingCriterion(
        keywords=_decode_keywords(obj["keywords"], where),
        separator=obj["separator"],
        param_count=obj["param_count"],
        scope=_decode_scope(obj["scope"], where),
    )


def _decode_rule(obj: object, where: str) -> LinkRule:
    _expect(isinstance(obj, dict), where, "must be an object")
    assert isinstance(obj, dict)
    unknown = set(obj) - _RULE_KEYS
    _expect(not unknown, where, f"unknown keys: {sorted(unknown)}")
    missing = _RULE_KEYS - set(obj)
    _expect(not missing, where, f"missing keys: {sorted(missing)}")
    _expect(isinstance(obj["kind"], str), where, "kind must be a string")
    try:
        kind = LinkKind(obj["kind"])
    except ValueError:
        raise ConfigError(
            f"{where}: kind must be one of " + ", ".join(k.value for k in LinkKind)
        ) from None
    base = _decode_criterion(
        {k: v for k, v in obj.items() if k != "kind"}, where
    )
    return LinkRule(
        kind=kind,
        keywords=base.keywords,
        separator=base.separator,
        param_count=base.param_count,
        scope=base.scope,
    )


def target_from_dict(obj: object, where: str = "target") -> HarvestTarget:
    """Decode one configuration object into a :class:`HarvestTarget`.

    Performs type decoding only; value invariants are the business of
    :func:`validate_target`. Raises :class:`ConfigError` on structural
    problems (wrong types, unknown or missing keys, bad enum values).
    """
    _expect(isinstance(obj, dict), where, "must be an object")
    assert isinstance(obj, dict)
    unknown = set(obj) - _TARGET_KEYS
    _expect(not unknown, where, f"unknown keys: {sorted(unknown)}")
    required = _TARGET_KEYS - {"title_criterion", "enabled"}
    missing = required - set(obj)
    _expect(not missing, where, f"missing keys: {sorted(missing)}")

    for key in ("id", "institution_id", "content_type", "start_url"):
        _expect(isinstance(obj[key], str), where, f"{key} must be a string")
    for key in ("depth", "reharvest_period_s", "max_pages"):
        _expect(
            isinstance(obj[key], int) and not isinstance(obj[key], bool),
            where,
            f"{key} must be an integer",
        )
    enabled = obj.get("enabled", True)
    _expect(isinstance(enabled, bool), where, "enabled must be a boolean")

    focus = obj["focus_point"]
    fwhere = f"{where}.focus_point"
    _expect(isinstance(focus, dict), fwhere, "must be an object")
    assert isinstance(focus, dict)
    unknown = set(focus) - {"tag_name", "ordinal"}
    _expect(not unknown, fwhere, f"unknown keys: {sorted(unknown)}")
    missing = {"tag_name", "ordinal"} - set(focus)
    _expect(not missing, fwhere, f"missing keys: {sorted(missing)}")
    _expect(isinstance(focus["tag_name"], str), fwhere, "tag_name must be a string")
    _expect(
        isinstance(focus["ordinal"], int) and not isinstance(focus["ordinal"], bool),
        fwhere,
        "ordinal must be an integer",
    )

    rules_obj = obj["content_link_rules"]
    _expect(
        isinstance(rules_obj, list), f"{where}.content_link_rules", "must be an array"
    )
    assert isinstance(rules_obj, list)
    rules = tuple(
        _decode_rule(r, f"{where}.content_link_rules[{i}]")
        for i, r in enumerate(rules_obj)
    )

    title_obj = obj.get("title_criterion")
    title = (
        None
        if title_obj is None
        else _decode_rule(title_obj, f"{where}.title_criterion")
    )

    return HarvestTarget(
        id=obj["id"],
        institution_id=obj["institution_id"],
        content_type=obj["content_type"],
        start_url=obj["start_url"],
        depth=obj["depth"],
        paging_criterion=_decode_criterion(
            obj["paging_criterion"], f"{where}.paging_criterion"
        ),
        focus_point=FocusPoint(tag_name=focus["tag_name"], ordinal=focus["ordinal"]),
        content_link_rules=rules,
        reharvest_period=timedelta(seconds=obj["reharvest_period_s"]),
        max_pages=obj["max_pages"],
        enabled=enabled,
        title_criterion=title,
    )


def _criterion_to_dict(c: PagingCriterion) -> dict:
    return {
        "keywords": list(c.keywords),
        "separator": c.separator,
        "param_count": c.param_count,
        "scope": c.scope.value,
    }


def _rule_to_dict(r: LinkRule) -> dict:
    return {
        "kind": r.kind.value,
        "keywords": list(r.keywords),
        "separator": r.separator,
        "param_count": r.param_count,
        "scope": r.scope.value,
    }


def target_to_dict(target: HarvestTarget) -> dict:
    """Encode a target as a configuration-format object."""
    out: dict = {
        "id": target.id,
        "institution_id": target.institution_id,
        "content_type": target.content_type,
        "start_url": target.start_url,
        "depth": target.depth,
        "paging_criterion": _criterion_to_dict(target.paging_criterion),
    }
    if target.title_criterion is not None:
        out["title_criterion"] = _rule_to_dict(target.title_criterion)
    out["focus_point"] = {
        "tag_name": target.focus_point.tag_name,
        "ordinal": target.focus_point.ordinal,
    }
    out["content_link_rules"] = [_rule_to_dict(r) for r in target.content_link_rules]
    out["reharvest_period_s"] = int(target.reharvest_period.total_seconds())
    out["max_pages"] = target.max_pages
    out["enabled"] = target.enabled
    return out


def parse_config(document: bytes | str) -> list[HarvestTarget]:
    """Parse a configuration document into validated targets.

    The whole document is rejected (fail-fast) on the first syntax error,
    duplicate id, or target validation violation.
    """
    if isinstance(document, bytes):
        try:
            text = document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigError(f"document is not UTF-8: {exc}") from None
    else:
        text = document
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(data, list):
        raise ConfigError("document root must be a JSON array of targets")

    targets: list[HarvestTarget] = []
    seen_ids: set[str] = set()
    for i, obj in enumerate(data):
        target = target_from_dict(obj, where=f"target[{i}]")
        if target.id in seen_ids:
            raise ConfigError(f"target[{i}]: duplicate id {target.id!r}")
        seen_ids.add(target.id)
        violations = validate_target(target)
        if violations:
            raise ConfigError(
                f"target[{i}] ({target.id!r}): " + "; ".join(violations)
            )
        targets.append(target)
    return targets


def serialize_config(targets: list[HarvestTarget]) -> bytes:
    """Serialize targets to the canonical configuration document.

    Output is deterministic (stable key order, two-space indent) so that
    configuration files diff cleanly under administration.
    """
    data = [target_to_dict(t) for t in targets]
    return (json.dumps(data, ensure_ascii=False, indent=2) + "\n").encode("utf-8")
