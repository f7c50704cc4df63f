from __future__ import annotations

import copy
import random

import pytest

from wordcraft import assoc, keywords
from wordcraft.errors import SessionClosed, UnknownKeyword, UnknownSense, UnknownWord
from wordcraft.session import (
    LearningSession,
    create_session,
    propagate_keyword_change,
    replay_events,
    tick_active,
)


def test_create_session_seeds_meaning_node(demo_lexicon):
    session = create_session(demo_lexicon, "labyrinth", "maze", session_id="s1", at=5)
    assert session.stage == "overview"
    assert session.started_at == 5
    assert len(session.map.nodes) == 1
    node = session.map.nodes[0]
    assert node.kind == "meaning"
    assert node.label == "迷宫"
    assert session.map.links == []
    assert session.segments == []
    assert [a.concept for a in session.tree.anchors] == ["labyrinth"]


def test_create_session_round_trips(demo_lexicon):
    session = create_session(demo_lexicon, "labyrinth", "maze", session_id="s1")
    restored = LearningSession.from_dict(session.to_dict())
    assert restored.to_dict() == session.to_dict()


def test_create_session_unknown_sense(demo_lexicon):
    with pytest.raises(UnknownSense):
        create_session(demo_lexicon, "labyrinth", "nope", session_id="s1")


def test_create_session_unknown_word(demo_lexicon):
    with pytest.raises(UnknownWord):
        create_session(demo_lexicon, "nope", "maze", session_id="s1")


# -- tick_active ------------------------------------------------------------------


def test_tick_zero_is_noop_on_total(labyrinth_session):
    tick_active(labyrinth_session, 0)
    assert labyrinth_session.total_active_ms == 0


def test_tick_accumulates(labyrinth_session):
    tick_active(labyrinth_session, 1000)
    tick_active(labyrinth_session, 1000)
    assert labyrinth_session.total_active_ms == 2000


def test_tick_random_sequence_matches_sum(labyrinth_session):
    rng = random.Random(7)
    deltas = [rng.randrange(0, 5000) for _ in range(50)]
    for delta in deltas:
        tick_active(labyrinth_session, delta)
    assert labyrinth_session.total_active_ms == sum(deltas)


def test_tick_rejected_after_recording(demo_lexicon):
    from wordcraft import canvas

    session = create_session(demo_lexicon, "sear", "burn", session_id="s1")
    canvas.record_word_card(session, card_id="c1", allow_missing_image=True)
    with pytest.raises(SessionClosed):
        tick_active(session, 10)


# -- keyword propagation --------------------------------------------------------------


def build_selected_session(demo_lexicon):
    session = create_session(demo_lexicon, "labyrinth", "maze", session_id="s1", at=0)
    segment = keywords.brush_segment(session, 0, 3, at=1)
    choice = keywords.select_keyword(
        session, segment.segment_id, keyword="喇叭", explanation="speaker", at=2
    )
    return session, segment, choice


def test_propagate_rename_matches_hand_applied_oracle(demo_lexicon):
    from wordcraft import canvas
    from wordcraft.models import BBox

    session, segment, choice = build_selected_session(demo_lexicon)
    node = session.map.node_by_source(choice.keyword_id)
    link = session.map.links[0]
    assoc.add_note(session, link.link_id, "note stays", at=3)
    assoc.set_chain(session, link.link_id, "chain stays", at=4)
    element = canvas.add_element(session, BBox(0, 0, 0.3, 0.3), [node.node_id], at=5)

    # Oracle: take the serialized state and apply the rename by hand. Canvas
    # tags reference the node id, so only the node label itself changes.
    expected = copy.deepcopy(session.to_dict())
    expected["keyword_choices"][0]["keyword"] = "蜡笔"
    expected["keyword_choices"][0]["explanation"] = "crayon"
    expected["keyword_choices"][0]["origin"] = "user"
    for raw in expected["map"]["nodes"]:
        if raw["node_id"] == node.node_id:
            raw["label"] = "蜡笔"
    for raw in expected["tree"]["anchors"]:
        if raw["anchor_id"] == choice.keyword_id:
            raw["concept"] = "蜡笔"

    propagate_keyword_change(
        session, choice.keyword_id, keyword="蜡笔", explanation="crayon", at=9
    )
    actual = session.to_dict()
    expected["events"] = actual["events"]  # the one appended event
    assert actual == expected
    assert len(actual["events"]) == len(session.events)
    # The element now reads as the new keyword, with annotations untouched.
    assert canvas._region_label(session, element) == "蜡笔"
    assert element.tags == [node.node_id]
    assert link.chain.text == "chain stays"
    assert [n.text for n in link.notes] == ["note stays"]


def test_propagate_identity_rename_changes_nothing_but_log(demo_lexicon):
    session, segment, choice = build_selected_session(demo_lexicon)
    before = session.to_dict()
    events_before = len(session.events)
    propagate_keyword_change(
        session, choice.keyword_id, keyword="喇叭", explanation="speaker", at=5
    )
    after = session.to_dict()
    assert len(session.events) == events_before + 1
    before["events"] = after["events"]
    assert after == before


def test_propagate_unknown_keyword_leaves_state(demo_lexicon):
    session, _, _ = build_selected_session(demo_lexicon)
    before = session.to_dict()
    with pytest.raises(UnknownKeyword):
        propagate_keyword_change(session, "kw-99", keyword="蜡笔")
    assert session.to_dict() == before


def test_propagate_preserves_topology(demo_lexicon):
    session, segment, choice = build_selected_session(demo_lexicon)
    counts = (len(session.map.nodes), len(session.map.links), len(session.canvas.elements))
    propagate_keyword_change(session, choice.keyword_id, keyword="蜡笔", at=3)
    assert counts == (
        len(session.map.nodes),
        len(session.map.links),
        len(session.canvas.elements),
    )


def test_select_on_occupied_segment_replaces(demo_lexicon):
    session, segment, choice = build_selected_session(demo_lexicon)
    replaced = keywords.select_keyword(
        session, segment.segment_id, keyword="蜡笔", explanation="crayon", at=3
    )
    assert replaced.keyword_id == choice.keyword_id
    assert replaced.keyword == "蜡笔"
    assert len(session.keyword_choices) == 1
    assert sum(1 for n in session.map.nodes if n.kind == "keyword") == 1


# -- event sourcing --------------------------------------------------------------------


def test_replay_reproduces_state(demo_lexicon):
    session, segment, choice = build_selected_session(demo_lexicon)
    link = session.map.links[0]
    assoc.set_chain(session, link.link_id, "dizziness", at=6)
    assoc.add_note(session, link.link_id, "guide the way", at=7)
    tick_active(session, 1234, at=8)
    replayed = replay_events(session.events)
    assert replayed.to_dict() == session.to_dict()


def test_event_seq_strictly_increasing(demo_lexicon):
    session, _, _ = build_selected_session(demo_lexicon)
    seqs = [e.seq for e in session.events]
    assert seqs == list(range(len(seqs)))


def test_every_mutation_appends_exactly_one_event(demo_lexicon):
    session = create_session(demo_lexicon, "labyrinth", "maze", session_id="s1")
    assert len(session.events) == 1
    keywords.brush_segment(session, 0, 3)
    assert len(session.events) == 2
    tick_active(session, 5)
    assert len(session.events) == 3
    keywords.clear_segments(session)
    assert len(session.events) == 4


def test_recorded_session_rejects_all_mutations(demo_lexicon):
    from wordcraft import canvas
    from wordcraft.models import BBox

    session = create_session(demo_lexicon, "labyrinth", "maze", session_id="s1")
    canvas.record_word_card(session, card_id="c9", allow_missing_image=True)
    with pytest.raises(SessionClosed):
        keywords.brush_segment(session, 0, 2)
    with pytest.raises(SessionClosed):
        keywords.clear_segments(session)
    with pytest.raises(SessionClosed):
        canvas.add_element(session, BBox(0, 0, 0.2, 0.2), ["cn-1"])
    with pytest.raises(SessionClosed):
        canvas.record_word_card(session, card_id="c10", allow_missing_image=True)
