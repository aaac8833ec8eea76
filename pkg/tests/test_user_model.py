from __future__ import annotations

import dataclasses
from datetime import timedelta

import pytest
from hypothesis import given, strategies as st

from promind.agent import ResponseKind
from promind.config import SystemConfig
from promind.planner import (
    Channel,
    Duration,
    ReminderModality,
    Sound,
    build_plan,
)
from promind.factors import ModalityScore
from promind.user_model import (
    InteractionRecord,
    PreferenceState,
    adapt_plan,
    export_preferences,
    import_preferences,
    record_interaction,
)

from .conftest import profile, time_task

AUDIO_LONG_MUSIC = ReminderModality(Channel.AUDIO, Duration.LONG, Sound.MUSIC)
VISUAL_SHORT_RING = ReminderModality(Channel.VISUAL, Duration.SHORT, Sound.RING)


def record(kind: ResponseKind, modality=AUDIO_LONG_MUSIC, index=0):
    latency = timedelta(seconds=30) if kind is not ResponseKind.IGNORE else None
    return InteractionRecord("t1", index, modality, kind, latency)


class TestRecordInteraction:
    def test_full_weight_accept_on_audio(self):
        pref = record_interaction(PreferenceState(), record(ResponseKind.ACCEPT), alpha=1.0)
        assert pref.channel == 1.0

    def test_partial_ignore_on_audio(self):
        start = PreferenceState(channel=0.5)
        pref = record_interaction(start, record(ResponseKind.IGNORE), alpha=0.2)
        assert pref.channel == pytest.approx(0.4)

    def test_fresh_state_is_indifferent(self):
        pref = PreferenceState()
        assert pref.axes() == (0.5, 0.5, 0.5)
        assert pref.sample_count == 0

    def test_rejecting_visual_pushes_toward_audio(self):
        pref = record_interaction(
            PreferenceState(), record(ResponseKind.IGNORE, VISUAL_SHORT_RING), alpha=0.2
        )
        assert pref.channel > 0.5

    def test_accepting_visual_pushes_toward_visual(self):
        pref = record_interaction(
            PreferenceState(), record(ResponseKind.ACCEPT, VISUAL_SHORT_RING), alpha=0.2
        )
        assert pref.channel < 0.5

    def test_postpone_counts_against_used_form(self):
        pref = record_interaction(
            PreferenceState(), record(ResponseKind.POSTPONE), alpha=0.5
        )
        assert pref.channel == pytest.approx(0.25)

    def test_sample_count_increments(self):
        pref = PreferenceState()
        for n in range(1, 4):
            pref = record_interaction(pref, record(ResponseKind.ACCEPT))
            assert pref.sample_count == n

    def test_alpha_bounds(self):
        with pytest.raises(ValueError):
            record_interaction(PreferenceState(), record(ResponseKind.ACCEPT), alpha=0.0)
        with pytest.raises(ValueError):
            record_interaction(PreferenceState(), record(ResponseKind.ACCEPT), alpha=1.5)

    @given(
        st.lists(
            st.tuples(
                st.sampled_from(list(ResponseKind)),
                st.booleans(),
                st.booleans(),
                st.booleans(),
            ),
            max_size=40,
        ),
        st.floats(min_value=0.01, max_value=1.0),
    )
    def test_scores_stay_bounded(self, steps, alpha):
        pref = PreferenceState()
        for kind, audio, long_, music in steps:
            modality = ReminderModality(
                Channel.AUDIO if audio else Channel.VISUAL,
                Duration.LONG if long_ else Duration.SHORT,
                Sound.MUSIC if music else Sound.RING,
            )
            pref = record_interaction(pref, record(kind, modality), alpha)
            assert all(0.0 <= axis <= 1.0 for axis in pref.axes())

    def test_replay_determinism(self):
        sequence = [
            record(ResponseKind.ACCEPT),
            record(ResponseKind.IGNORE, VISUAL_SHORT_RING),
            record(ResponseKind.POSTPONE),
        ]

        def play():
            pref = PreferenceState()
            for item in sequence:
                pref = record_interaction(pref, item, alpha=0.3)
            return pref

        assert play() == play()


class TestAdaptPlan:
    def make_plan(self):
        task = time_task(factors=profile("M", "M", "M", "y"))
        return build_plan(task, SystemConfig())

    def test_zero_blend_is_identity(self):
        plan = self.make_plan()
        assert adapt_plan(plan, PreferenceState(0.9, 0.9, 0.9), blend=0.0) == plan

    def test_full_blend_follows_preferences(self):
        plan = self.make_plan()
        adapted = adapt_plan(plan, PreferenceState(0.0, 0.0, 0.0), blend=1.0)
        assert adapted.modality == VISUAL_SHORT_RING

    def test_blend_example(self):
        plan = dataclasses.replace(
            self.make_plan(), raw_modality_score=ModalityScore(0.6, 0.4, 0.5)
        )
        adapted = adapt_plan(plan, PreferenceState(0.1, 0.9, 0.5), blend=0.3)
        # blended = (0.45, 0.55, 0.5) -> visual, long, music
        assert adapted.modality == ReminderModality(Channel.VISUAL, Duration.LONG, Sound.MUSIC)

    def test_count_and_schedule_never_change(self):
        plan = self.make_plan()
        for blend in (0.0, 0.3, 1.0):
            for pref in (PreferenceState(), PreferenceState(1.0, 0.0, 1.0)):
                adapted = adapt_plan(plan, pref, blend)
                assert adapted.count == plan.count
                assert adapted.schedule == plan.schedule
                assert adapted.offsets == plan.offsets
                assert adapted.raw_modality_score == plan.raw_modality_score

    def test_blend_bounds(self):
        with pytest.raises(ValueError):
            adapt_plan(self.make_plan(), PreferenceState(), blend=1.0001)


class TestExport:
    def test_round_trip_identity(self):
        pref = PreferenceState(0.25, 0.75, 0.5, sample_count=9)
        assert import_preferences(export_preferences(pref)) == pref

    def test_fresh_state_exports_initialization(self):
        data = export_preferences(PreferenceState())
        assert data == {"channel": 0.5, "duration": 0.5, "sound": 0.5, "sample_count": 0}

    def test_export_matches_replayed_updates(self):
        pref = PreferenceState()
        replay = PreferenceState()
        for kind in (ResponseKind.ACCEPT, ResponseKind.IGNORE, ResponseKind.ACCEPT):
            pref = record_interaction(pref, record(kind), alpha=0.2)
            replay = record_interaction(replay, record(kind), alpha=0.2)
        assert export_preferences(pref) == export_preferences(replay)
