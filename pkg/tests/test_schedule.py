"""Re-harvest bookkeeping: due order, anchoring, overlap guard."""

from __future__ import annotations

from datetime import timedelta

import pytest

from webharvest.schedule import Schedule, UnknownTarget

from conftest import make_target


class TestDue:
    def test_empty_schedule(self):
        assert Schedule().due(now=100.0) == []

    def test_threshold(self):
        schedule = Schedule()
        schedule.register(make_target(id="a"), now=10.0)
        schedule.register(make_target(id="b"), now=20.0)
        assert schedule.due(now=15.0) == ["a"]

    def test_equal_next_run_ties_break_on_id(self):
        schedule = Schedule()
        schedule.register(make_target(id="zz"), now=5.0)
        schedule.register(make_target(id="aa"), now=5.0)
        assert schedule.due(now=5.0) == ["aa", "zz"]

    def test_ordered_by_next_run_then_id(self):
        schedule = Schedule()
        schedule.register(make_target(id="late"), now=9.0)
        schedule.register(make_target(id="early"), now=3.0)
        assert schedule.due(now=10.0) == ["early", "late"]

    def test_disabled_target_never_due(self):
        schedule = Schedule()
        schedule.register(make_target(id="a", enabled=False), now=0.0)
        assert schedule.due(now=1000.0) == []
        schedule.set_enabled("a", True)
        assert schedule.due(now=1000.0) == ["a"]

    def test_running_target_not_redispatched(self):
        schedule = Schedule()
        schedule.register(make_target(id="a"), now=0.0)
        schedule.mark_run("a", 0.0)
        assert schedule.due(now=10_000.0) == []
        schedule.mark_finished("a")
        assert schedule.due(now=10_000.0) == ["a"]


class TestMarkRun:
    def test_next_run_anchored_to_start(self):
        schedule = Schedule()
        schedule.register(
            make_target(id="a", reharvest_period=timedelta(seconds=3600)), now=0.0
        )
        entry = schedule.mark_run("a", run_started_at=50.0)
        assert entry.next_run == 50.0 + 3600.0

    def test_successive_runs_strictly_increase(self):
        schedule = Schedule()
        schedule.register(make_target(id="a"), now=0.0)
        first = schedule.mark_run("a", 0.0).next_run
        schedule.mark_finished("a")
        second = schedule.mark_run("a", first).next_run
        assert second > first

    def test_unknown_target(self):
        with pytest.raises(UnknownTarget):
            Schedule().mark_run("ghost", 0.0)


def run_simulation(period_s: float, horizon_s: float, run_duration_s: float = 0.0):
    """Drive a schedule with a virtual clock; returns dispatch times."""
    schedule = Schedule()
    target = make_target(id="t", reharvest_period=timedelta(seconds=period_s))
    schedule.register(target, now=0.0)
    now = 0.0
    dispatches: list[float] = []
    while True:
        for target_id in schedule.due(now):
            dispatches.append(now)
            schedule.mark_run(target_id, now)
            finish = now + run_duration_s
            if finish <= horizon_s:
                schedule.mark_finished(target_id)
            # A run still going at the horizon stays marked running.
        entry = schedule.get("t")
        upcoming = entry.next_run
        if upcoming > horizon_s:
            break
        now = max(now, upcoming)
        if entry.running:
            break
    return dispatches


class TestSimulatedHorizon:
    def test_ten_periods_give_eleven_runs(self):
        dispatches = run_simulation(period_s=10.0, horizon_s=100.0)
        assert len(dispatches) == 11  # floor(100/10) + 1, first at t=0

    def test_instant_runs_are_evenly_anchored(self):
        dispatches = run_simulation(period_s=3600.0, horizon_s=6 * 3600.0)
        assert dispatches == [float(i * 3600) for i in range(7)]

    def test_long_run_defers_but_never_doubles(self):
        # One run takes longer than the period: no overlapping dispatch.
        schedule = Schedule()
        schedule.register(
            make_target(id="t", reharvest_period=timedelta(seconds=10)), now=0.0
        )
        assert schedule.due(0.0) == ["t"]
        schedule.mark_run("t", 0.0)
        # Still running three periods later: not redispatched.
        assert schedule.due(35.0) == []
        schedule.mark_finished("t")
        assert schedule.due(35.0) == ["t"]
