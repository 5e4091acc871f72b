"""One harvest run: start URL to final pages, breadth-first.

The run seeds the frontier with the start URL at depth 0 and pops entries
in FIFO order. Pages short of the target depth are mined for links only:
pagination matches re-enqueue at the same depth, title matches one level
deeper. Pages at the target depth are final: the content box is extracted
and emitted to the record sink. A depth-0 target therefore extracts its
start page directly.

Page-level problems (fetch failures, stale focus points) are recorded in
the report and the run continues; only a sink failure aborts.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .clock import Clock, SystemClock
from .extract import BoxNotFound, ExtractedRecord, HtmlDocument, extract_anchors, extract_record
from .fetch import FetchError, Fetcher
from .frontier import Frontier, FrontierEntry, normalize_url
from .links import LinkClass, classify_link
from .targets import HarvestTarget, validate_target

__all__ = ["HarvestReport", "StopReason", "SinkError", "harvest_target"]

logger = logging.getLogger(__name__)


class StopReason(Enum):
    EXHAUSTED = "exhausted"
    MAX_PAGES = "max_pages"
    ABORTED = "aborted"


class SinkError(Exception):
    """Raised by a record sink when persistence is down; aborts the run."""


@dataclass
class HarvestReport:
    target_id: str
    started_at: float
    finished_at: float = 0.0
    pages_fetched: int = 0
    records_extracted: int = 0
    links_ignored: int = 0
    errors: list[tuple[str, str]] = field(default_factory=list)
    stopped_reason: StopReason = StopReason.EXHAUSTED

    def to_dict(self) -> dict:
        return {
            "target_id": self.target_id,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "pages_fetched": self.pages_fetched,
            "records_extracted": self.records_extracted,
            "links_ignored": self.links_ignored,
            "errors": [{"url": u, "error": e} for u, e in self.errors],
            "stopped_reason": self.stopped_reason.value,
        }


RecordSink = Callable[[ExtractedRecord], None]


def _host_of(url: str) -> str | None:
    from urllib.parse import urlsplit

    try:
        return urlsplit(url).hostname
    except ValueError:
        return None


def harvest_target(
    target: HarvestTarget,
    fetcher: Fetcher,
    frontier: Frontier | None = None,
    record_sink: RecordSink | None = None,
    clock: Clock | None = None,
) -> HarvestReport:
    """Run one target to completion and return its report.

    The target must be valid and enabled. The frontier guarantees each
    URL is fetched at most once; redirects landing on an already-visited
    URL are skipped after the fetch (the fetch itself cannot be avoided).
    The run stops when the frontier empties or max_pages is reached.
    """
    violations = validate_target(target)
    if violations:
        raise ValueError(f"invalid target {target.id!r}: " + "; ".join(violations))
    if not target.enabled:
        raise ValueError(f"target {target.id!r} is disabled")

    clock = clock or SystemClock()
    frontier = frontier if frontier is not None else Frontier()
    sink: RecordSink = record_sink if record_sink is not None else (lambda record: None)
    report = HarvestReport(target_id=target.id, started_at=clock.now())
    target_host = _host_of(target.start_url)

    start = normalize_url(target.start_url, target.start_url)
    if start is None:
        report.errors.append((target.start_url, "start_url failed normalization"))
        report.finished_at = clock.now()
        return report
    frontier.enqueue(FrontierEntry(url=start, depth=0))

    while True:
        entry = frontier.next()
        if entry is None:
            report.stopped_reason = StopReason.EXHAUSTED
            break
        if report.pages_fetched >= target.max_pages:
            report.stopped_reason = StopReason.MAX_PAGES
            break

        try:
            page = fetcher.fetch(entry.url)
        except FetchError as exc:
            report.errors.append((entry.url, str(exc)))
            continue
        report.pages_fetched += 1

        if page.status >= 400:
            report.errors.append((entry.url, f"HTTP {page.status}"))
            continue
        if page.final_url != entry.url and not frontier.mark_visited(page.final_url):
            # Redirect landed on a URL this run already covered.
            continue

        doc = HtmlDocument(raw=page.body_text, base_url=page.final_url)
        if entry.depth == target.depth:
            try:
                record = extract_record(doc, target, now=int(clock.now()))
            except BoxNotFound as exc:
                report.errors.append((entry.url, str(exc)))
                continue
            try:
                sink(record)
            except SinkError as exc:
                report.errors.append((entry.url, f"record sink failed: {exc}"))
                report.stopped_reason = StopReason.ABORTED
                break
            report.records_extracted += 1
        else:
            for anchor in extract_anchors(doc, target_host=target_host):
                link_class = classify_link(anchor, entry.depth, target)
                if link_class is LinkClass.PAGING:
                    frontier.enqueue(FrontierEntry(url=anchor.href, depth=entry.depth))
                elif link_class is LinkClass.TITLE:
                    frontier.enqueue(
                        FrontierEntry(url=anchor.href, depth=entry.depth + 1)
                    )
                else:
                    report.links_ignored += 1

    report.finished_at = clock.now()
    return report
