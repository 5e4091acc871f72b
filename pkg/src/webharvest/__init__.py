"""Focused web harvesting at desk scale.

Administrators define harvesting targets (start URL, depth, link
criteria, content box address, re-harvest period); the harvester walks
each target breadth-first within its depth bound, extracts the content
box from final pages, and feeds a searchable topical index.
"""

from .clock import Clock, SimulatedClock, SystemClock
from .extract import (
    BoxFragment,
    BoxNotFound,
    ExtractedRecord,
    HtmlDocument,
    extract_anchors,
    extract_record,
    fnv1a64,
    locate_box,
    strip_tags,
)
from .fetch import FetchedPage, Fetcher, FetchError, FetchPolicy
from .frontier import Frontier, FrontierEntry, normalize_url
from .links import Anchor, LinkClass, classify_link, match_criterion
from .runner import HarvestReport, StopReason, harvest_target
from .schedule import Schedule, ScheduleEntry
from .store import IndexStore, SearchHit, UpsertResult
from .targets import (
    CONTENT_TYPES,
    ConfigError,
    FocusPoint,
    HarvestTarget,
    LinkKind,
    LinkRule,
    MatchScope,
    PagingCriterion,
    parse_config,
    serialize_config,
    validate_target,
)

__version__ = "0.1.0"
