"""Association map: links between concept nodes, chain nodes, notes, hints.

The map is a simple undirected graph. Exactly one meaning node exists per
session and every other node mirrors a selected keyword; links carry one
chain node and any number of notes.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from .errors import EmptyNote, SelfLink, UnknownLink, UnknownNode, ValidationError
from .models import AssociationLink, ChainNode, Note
from .session import LearningSession, SessionEvent, applier, emit, ensure_open

if TYPE_CHECKING:
    from .gateway import Gateway


def upsert_link(session: LearningSession, node_a: str, node_b: str, *, at: int = 0) -> AssociationLink:
    """Return the link between two nodes, creating it with an empty chain if new."""
    ensure_open(session)
    for node_id in (node_a, node_b):
        if session.map.node(node_id) is None:
            raise UnknownNode(f"unknown concept node {node_id!r}")
    if node_a == node_b:
        raise SelfLink("a link needs two distinct nodes")
    return emit(session, "link_upserted", {"node_a": node_a, "node_b": node_b}, at)


@applier("link_upserted")
def _apply_link_upserted(session: LearningSession, event: SessionEvent) -> AssociationLink:
    p = event.payload
    existing = session.map.link_for_pair(p["node_a"], p["node_b"])
    if existing is not None:
        session.stage = "association"
        return existing
    link = AssociationLink(
        link_id=session.alloc("ln"),
        endpoints=tuple(sorted((p["node_a"], p["node_b"]))),
        chain=ChainNode(""),
    )
    session.map.links.append(link)
    session.stage = "association"
    return link


def set_chain(
    session: LearningSession,
    link_id: str,
    text: str,
    *,
    max_chars: int | None = None,
    at: int = 0,
) -> AssociationLink:
    """Replace the associative-pathway phrase attached to a link."""
    ensure_open(session)
    if session.map.link(link_id) is None:
        raise UnknownLink(f"unknown link {link_id!r}")
    if max_chars is not None and len(text) > max_chars:
        raise ValidationError(f"chain text exceeds {max_chars} characters")
    return emit(session, "chain_set", {"link_id": link_id, "text": text}, at)


@applier("chain_set")
def _apply_chain_set(session: LearningSession, event: SessionEvent) -> AssociationLink:
    link = session.map.link(event.payload["link_id"])
    assert link is not None
    link.chain.text = event.payload["text"]
    session.stage = "association"
    return link


def add_note(session: LearningSession, link_id: str, text: str, *, at: int = 0) -> AssociationLink:
    """Append a free-text note to a link."""
    ensure_open(session)
    if session.map.link(link_id) is None:
        raise UnknownLink(f"unknown link {link_id!r}")
    if not text or not text.strip():
        raise EmptyNote("note text must be non-empty")
    return emit(session, "note_added", {"link_id": link_id, "text": text}, at)


@applier("note_added")
def _apply_note_added(session: LearningSession, event: SessionEvent) -> AssociationLink:
    link = session.map.link(event.payload["link_id"])
    assert link is not None
    link.notes.append(
        Note(note_id=session.alloc("nt"), text=event.payload["text"], created_at=event.at)
    )
    session.stage = "association"
    return link


def delete_link(session: LearningSession, link_id: str, *, at: int = 0) -> LearningSession:
    """Remove a link; its chain and notes stay recoverable from the event log."""
    ensure_open(session)
    link = session.map.link(link_id)
    if link is None:
        raise UnknownLink(f"unknown link {link_id!r}")
    emit(session, "link_deleted", {"link_id": link_id, "removed": link.to_dict()}, at)
    return session


@applier("link_deleted")
def _apply_link_deleted(session: LearningSession, event: SessionEvent) -> LearningSession:
    link_id = event.payload["link_id"]
    session.map.links = [l for l in session.map.links if l.link_id != link_id]
    session.stage = "association"
    return session


def suggest_hints(session: LearningSession, gateway: "Gateway", link_id: str) -> list[str]:
    """Request indirect hint sentences for a link. Pure: the map is untouched.

    The request carries both endpoint labels, the current chain text, and all
    notes on the link, so hints build on what the learner already wrote.
    """
    link = session.map.link(link_id)
    if link is None:
        raise UnknownLink(f"unknown link {link_id!r}")
    label_a = session.map.node(link.endpoints[0])
    label_b = session.map.node(link.endpoints[1])
    assert label_a is not None and label_b is not None
    return gateway.call_text(
        "assoc_hints",
        {
            "entity_a": label_a.label,
            "entity_b": label_b.label,
            "chain": link.chain.text,
            "notes": [n.text for n in link.notes],
        },
    )
