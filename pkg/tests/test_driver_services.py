from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from fairride.forum import Forum, InvalidOption, PollClosed, UnknownTopic
from fairride.profiles import (
    DriverProfile,
    InvalidChange,
    SettingsLocked,
    WorkingWindow,
    update_profile,
)
from fairride.support import EmptyComplaint, IllegalTransition, advance_ticket, open_complaint

NOW = datetime(2026, 3, 2, 9, 0, tzinfo=timezone.utc)


class TestProfileLock:
    def test_change_applies_and_discloses_lock(self):
        profile = DriverProfile(driver_id="d1")
        updated, until = update_profile(
            profile, {"destination_filter": frozenset({"airport"})}, NOW
        )
        assert updated.destination_filter == frozenset({"airport"})
        assert until == NOW + timedelta(days=7)
        assert updated.settings_lock.locked_until == until

    def test_second_change_one_day_later_blocked_with_remaining_time(self):
        profile = DriverProfile(driver_id="d1")
        profile, _ = update_profile(profile, {"assignment_mode": "queued"}, NOW)
        with pytest.raises(SettingsLocked) as exc:
            update_profile(profile, {"assignment_mode": "random"}, NOW + timedelta(days=1))
        assert exc.value.until == NOW + timedelta(days=7)
        assert exc.value.field == "assignment_mode"

    def test_change_allowed_after_window(self):
        profile = DriverProfile(driver_id="d1")
        profile, _ = update_profile(profile, {"assignment_mode": "queued"}, NOW)
        later = NOW + timedelta(days=7, seconds=1)
        updated, until = update_profile(profile, {"assignment_mode": "random"}, later)
        assert updated.assignment_mode == "random"
        assert until == later + timedelta(days=7)

    def test_identity_edits_never_locked(self):
        profile = DriverProfile(driver_id="d1")
        profile, _ = update_profile(profile, {"destination_filter": frozenset({"other"})}, NOW)
        fixed, until = update_profile(profile, {"name": "Sam Doe"}, NOW + timedelta(hours=1))
        assert fixed.name == "Sam Doe"
        # identity edits neither hit nor refresh the dispatch lock
        assert fixed.settings_lock.locked_until == NOW + timedelta(days=7)

    def test_unknown_field_rejected(self):
        with pytest.raises(InvalidChange):
            update_profile(DriverProfile(driver_id="d1"), {"driver_id": "other"}, NOW)

    def test_invalid_value_rejected(self):
        with pytest.raises(InvalidChange):
            update_profile(DriverProfile(driver_id="d1"), {"assignment_mode": "psychic"}, NOW)

    def test_part_time_maps_to_rideshare(self):
        assert DriverProfile(driver_id="d1", employment_mode="part_time").dispatch_mode == "RideShare"
        assert DriverProfile(driver_id="d1", employment_mode="full_time").dispatch_mode == "RideHailing"

    def test_overlapping_windows_rejected(self):
        with pytest.raises(InvalidChange):
            DriverProfile(
                driver_id="d1",
                working_windows=(
                    WorkingWindow(0, 540, 1020),
                    WorkingWindow(0, 1000, 1200),
                ),
            )


class TestComplaints:
    def test_safety_sla_is_24h(self):
        ticket = open_complaint("d1", "safety", "unsafe rider", NOW)
        assert ticket.expected_completion == NOW + timedelta(hours=24)
        assert ticket.status == "open"
        assert ticket.history == (("open", NOW),)

    def test_sla_table(self):
        assert open_complaint("d1", "pay", "x", NOW).expected_completion == NOW + timedelta(hours=48)
        assert open_complaint("d1", "ratings", "x", NOW).expected_completion == NOW + timedelta(hours=72)
        assert open_complaint("d1", "app", "x", NOW).expected_completion == NOW + timedelta(hours=96)

    def test_empty_text_rejected(self):
        with pytest.raises(EmptyComplaint):
            open_complaint("d1", "pay", "   ", NOW)

    def test_lifecycle_happy_path(self):
        ticket = open_complaint("d1", "pay", "missing incentive", NOW)
        ticket = advance_ticket(ticket, "in_review", NOW + timedelta(hours=1))
        ticket = advance_ticket(ticket, "resolved", NOW + timedelta(hours=2))
        assert [status for status, _ in ticket.history] == ["open", "in_review", "resolved"]
        timestamps = [ts for _, ts in ticket.history]
        assert timestamps == sorted(timestamps)
        assert timestamps[0] < timestamps[1] < timestamps[2]

    def test_terminal_states_absorb(self):
        ticket = open_complaint("d1", "pay", "x", NOW)
        ticket = advance_ticket(ticket, "in_review", NOW + timedelta(hours=1))
        ticket = advance_ticket(ticket, "resolved", NOW + timedelta(hours=2))
        with pytest.raises(IllegalTransition):
            advance_ticket(ticket, "open", NOW + timedelta(hours=3))
        with pytest.raises(IllegalTransition):
            advance_ticket(ticket, "in_review", NOW + timedelta(hours=3))

    def test_cannot_skip_review(self):
        ticket = open_complaint("d1", "pay", "x", NOW)
        with pytest.raises(IllegalTransition):
            advance_ticket(ticket, "resolved", NOW + timedelta(hours=1))


class TestForum:
    def test_location_tagged_topic_appears_only_in_its_subforum(self):
        forum = Forum()
        forum.create_topic("d1", "Airport queue tips", NOW, location_tag="NYC")
        forum.create_topic("d2", "General chat", NOW)
        nyc = forum.subforum("NYC")
        general = forum.subforum(None)
        assert [t.title for t in nyc] == ["Airport queue tips"]
        assert [t.title for t in general] == ["General chat"]

    def test_post_requires_topic(self):
        forum = Forum()
        with pytest.raises(UnknownTopic):
            forum.add_post("d1", "missing", "hello", NOW)

    def test_revote_replaces(self):
        forum = Forum()
        poll = forum.create_poll("d1", "Lower the incentive threshold?", ["yes", "no"], NOW)
        forum.vote("d2", poll.poll_id, "yes")
        forum.vote("d2", poll.poll_id, "no")
        assert forum.tally(poll.poll_id) == {"yes": 0, "no": 1}

    def test_tally_equals_distinct_voters(self):
        forum = Forum()
        poll = forum.create_poll("d1", "Q", ["a", "b"], NOW)
        for i in range(5):
            forum.vote(f"d{i}", poll.poll_id, "a" if i % 2 else "b")
        assert sum(forum.tally(poll.poll_id).values()) == 5

    def test_closed_poll_rejects_votes(self):
        forum = Forum()
        poll = forum.create_poll("d1", "Q", ["a", "b"], NOW)
        forum.close_poll(poll.poll_id)
        with pytest.raises(PollClosed):
            forum.vote("d2", poll.poll_id, "a")

    def test_invalid_option(self):
        forum = Forum()
        poll = forum.create_poll("d1", "Q", ["a", "b"], NOW)
        with pytest.raises(InvalidOption):
            forum.vote("d2", poll.poll_id, "c")

    def test_config_poll_emits_proposal_on_close(self):
        forum = Forum()
        poll = forum.create_poll(
            "d1",
            "Incentive threshold?",
            ["0.5", "0.6", "0.7"],
            NOW,
            config_proposal={"field": "incentive_threshold"},
        )
        forum.vote("d1", poll.poll_id, "0.5")
        forum.vote("d2", poll.poll_id, "0.5")
        forum.vote("d3", poll.poll_id, "0.7")
        proposal = forum.close_poll(poll.poll_id)
        assert proposal["winning_option"] == "0.5"
        assert proposal["tally"] == {"0.5": 2, "0.6": 0, "0.7": 1}
        assert proposal["proposal"] == {"field": "incentive_threshold"}

    def test_plain_poll_close_returns_none(self):
        forum = Forum()
        poll = forum.create_poll("d1", "Q", ["a", "b"], NOW)
        assert forum.close_poll(poll.poll_id) is None
