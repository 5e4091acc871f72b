"""Re-harvest period bookkeeping.

Each registered target gets a next-run time; the first run is due
immediately on registration, and every run re-anchors the next one to its
own start time plus the period. A long run can make the next one due the
moment it finishes, but runs are never silently skipped, and a target
already running is never dispatched a second time.
"""

from __future__ import annotations

from dataclasses import dataclass

from .targets import HarvestTarget

__all__ = ["ScheduleEntry", "Schedule", "UnknownTarget"]


class UnknownTarget(KeyError):
    pass


@dataclass
class ScheduleEntry:
    target_id: str
    next_run: float
    period: float
    enabled: bool = True
    running: bool = False
    last_report: dict | None = None


class Schedule:
    """Per-target next-run state. Callers serialize access."""

    def __init__(self) -> None:
        self._entries: dict[str, ScheduleEntry] = {}

    def register(self, target: HarvestTarget, now: float) -> ScheduleEntry:
        """Add or refresh a target; its first run is due immediately."""
        entry = ScheduleEntry(
            target_id=target.id,
            next_run=now,
            period=target.reharvest_period.total_seconds(),
            enabled=target.enabled,
        )
        self._entries[target.id] = entry
        return entry

    def remove(self, target_id: str) -> None:
        self._entries.pop(target_id, None)

    def set_enabled(self, target_id: str, enabled: bool) -> None:
        self._entry(target_id).enabled = enabled

    def due(self, now: float) -> list[str]:
        """Enabled, not-running targets whose next_run has arrived,
        ordered by (next_run, target_id)."""
        ready = [
            e
            for e in self._entries.values()
            if e.enabled and not e.running and e.next_run <= now
        ]
        ready.sort(key=lambda e: (e.next_run, e.target_id))
        return [e.target_id for e in ready]

    def mark_run(self, target_id: str, run_started_at: float) -> ScheduleEntry:
        """Anchor the next run to this run's start time."""
        entry = self._entry(target_id)
        entry.next_run = run_started_at + entry.period
        entry.running = True
        return entry

    def mark_finished(self, target_id: str, report: dict | None = None) -> None:
        entry = self._entry(target_id)
        entry.running = False
        if report is not None:
            entry.last_report = report

    def get(self, target_id: str) -> ScheduleEntry:
        return self._entry(target_id)

    def entries(self) -> list[ScheduleEntry]:
        return sorted(self._entries.values(), key=lambda e: e.target_id)

    def _entry(self, target_id: str) -> ScheduleEntry:
        try:
            return self._entries[target_id]
        except KeyError:
            raise UnknownTarget(target_id) from None
