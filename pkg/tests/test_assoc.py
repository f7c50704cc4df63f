from __future__ import annotations

from pathlib import Path

import pytest

from wordcraft import assoc, keywords
from wordcraft.errors import EmptyNote, FormatError, SelfLink, UnknownLink, UnknownNode

GOLDEN_DIR = Path(__file__).parent / "data" / "golden"


@pytest.fixture
def mapped_session(labyrinth_session):
    """Session with meaning node plus keywords 喇叭 and 晕死."""
    seg1 = keywords.brush_segment(labyrinth_session, 0, 3)
    seg2 = keywords.brush_segment(labyrinth_session, 3, 8)
    keywords.select_keyword(labyrinth_session, seg1.segment_id, keyword="喇叭")
    keywords.select_keyword(labyrinth_session, seg2.segment_id, keyword="晕死")
    return labyrinth_session


def node_by_label(session, label):
    for node in session.map.nodes:
        if node.label == label:
            return node
    raise AssertionError(f"no node {label}")


def test_upsert_is_symmetric(mapped_session):
    a = node_by_label(mapped_session, "喇叭")
    b = node_by_label(mapped_session, "迷宫")
    first = assoc.upsert_link(mapped_session, a.node_id, b.node_id)
    second = assoc.upsert_link(mapped_session, b.node_id, a.node_id)
    assert first.link_id == second.link_id


def test_keyword_keyword_link_allowed(mapped_session):
    a = node_by_label(mapped_session, "喇叭")
    b = node_by_label(mapped_session, "晕死")
    link = assoc.upsert_link(mapped_session, a.node_id, b.node_id)
    assert set(link.endpoints) == {a.node_id, b.node_id}


def test_self_link_rejected(mapped_session):
    meaning = node_by_label(mapped_session, "迷宫")
    with pytest.raises(SelfLink):
        assoc.upsert_link(mapped_session, meaning.node_id, meaning.node_id)


def test_unknown_node_rejected(mapped_session):
    with pytest.raises(UnknownNode):
        assoc.upsert_link(mapped_session, "cn-1", "cn-99")


def test_set_chain_and_add_note(mapped_session):
    link = mapped_session.map.links[0]
    assoc.set_chain(mapped_session, link.link_id, "dizziness")
    assert link.chain.text == "dizziness"
    assoc.add_note(
        mapped_session, link.link_id, "The speaker can guide the way in the labyrinth"
    )
    assert len(link.notes) == 1
    assert link.notes[0].text == "The speaker can guide the way in the labyrinth"


def test_empty_note_rejected(mapped_session):
    link = mapped_session.map.links[0]
    with pytest.raises(EmptyNote):
        assoc.add_note(mapped_session, link.link_id, "")


def test_chain_and_note_on_unknown_link(mapped_session):
    with pytest.raises(UnknownLink):
        assoc.set_chain(mapped_session, "ln-99", "x")
    with pytest.raises(UnknownLink):
        assoc.add_note(mapped_session, "ln-99", "x")


def test_map_stays_simple_graph(mapped_session):
    a = node_by_label(mapped_session, "喇叭")
    b = node_by_label(mapped_session, "晕死")
    assoc.upsert_link(mapped_session, a.node_id, b.node_id)
    assoc.upsert_link(mapped_session, b.node_id, a.node_id)
    pairs = [l.endpoints for l in mapped_session.map.links]
    assert len(pairs) == len(set(pairs))
    assert all(x != y for x, y in pairs)


def test_delete_link_removes_it_and_keeps_history(mapped_session):
    link = mapped_session.map.links[0]
    assoc.set_chain(mapped_session, link.link_id, "dizziness")
    assoc.delete_link(mapped_session, link.link_id)
    assert mapped_session.map.link(link.link_id) is None
    removed = mapped_session.events[-1].payload["removed"]
    assert removed["chain"]["text"] == "dizziness"


# -- hints ----------------------------------------------------------------------------


def hint_script(sentences):
    return [sentences]


def test_hints_include_scripted_sentence(mapped_session, make_gateway):
    link = mapped_session.map.links[0]
    assoc.set_chain(mapped_session, link.link_id, "dizziness")
    gateway, _ = make_gateway(
        hint_script(
            [
                "The speaker may produce echoes in the labyrinth.",
                "Sound bounces endlessly off the walls.",
                "A guide's voice can overwhelm when it repeats.",
            ]
        )
    )
    hints = assoc.suggest_hints(mapped_session, gateway, link.link_id)
    assert "The speaker may produce echoes in the labyrinth." in hints
    assert 3 <= len(hints) <= 5


def test_hints_cardinality_retry_then_error(mapped_session, make_gateway):
    too_few = ["one", "two"]
    gateway, mock = make_gateway([too_few, too_few])
    link = mapped_session.map.links[0]
    with pytest.raises(FormatError):
        assoc.suggest_hints(mapped_session, gateway, link.link_id)
    assert len(mock.recorded) == 2


def test_hints_never_mutate_the_map(mapped_session, make_gateway):
    gateway, _ = make_gateway(hint_script(["a sentence", "another one", "a third"]))
    link = mapped_session.map.links[0]
    before = mapped_session.to_dict()
    assoc.suggest_hints(mapped_session, gateway, link.link_id)
    assert mapped_session.to_dict() == before


def test_hint_request_carries_labels_chain_and_all_notes(mapped_session, make_gateway):
    link = mapped_session.map.link_for_pair(
        node_by_label(mapped_session, "迷宫").node_id,
        node_by_label(mapped_session, "喇叭").node_id,
    )
    assoc.set_chain(mapped_session, link.link_id, "dizziness")
    assoc.add_note(
        mapped_session, link.link_id, "The speaker can guide the way in the labyrinth"
    )
    assoc.add_note(mapped_session, link.link_id, "The noise is uncomfortable")
    gateway, mock = make_gateway(hint_script(["one sentence", "two sentences", "three"]))
    assoc.suggest_hints(mapped_session, gateway, link.link_id)
    prompt = mock.recorded[0].messages[0]["content"]
    golden = (GOLDEN_DIR / "assoc_hints.txt").read_text(encoding="utf-8")
    assert prompt == golden
    for fragment in (
        "喇叭",
        "迷宫",
        "dizziness",
        "The speaker can guide the way in the labyrinth",
        "The noise is uncomfortable",
    ):
        assert fragment in prompt
