"""Keyword selection: phoneme brushing, brainstorming tree, suggestion pipeline.

Keyword suggestion runs in two stages: a creative pass that over-generates
candidate keywords for the brushed phoneme range, then a conservative review
pass that keeps exactly four, excluding everything already shown in the
session. Suggested semantic concepts are candidates only; nothing attaches to
the tree until the learner accepts it.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from .errors import (
    DepthExceeded,
    DuplicateConcept,
    OverlapError,
    RangeError,
    UnknownAnchor,
    UnknownCard,
    UnknownSegment,
    UnknownSemanticNode,
    ValidationError,
)
from .models import (
    ConceptNode,
    KeywordBatch,
    KeywordCard,
    KeywordChoice,
    Segment,
    SemanticAnchor,
    SemanticNode,
    SemanticSuggestion,
)
from .session import (
    LearningSession,
    SessionEvent,
    applier,
    emit,
    ensure_open,
    propagate_keyword_change,
)

if TYPE_CHECKING:
    from .gateway import Gateway

CARDS_PER_BATCH = 4
STAGE1_MIN_CANDIDATES = 10
STAGE1_MAX_CANDIDATES = 20
MAX_TREE_DEPTH = 2

CHAIN_JOINER = " → "


# -- segments -------------------------------------------------------------------

def brush_segment(session: LearningSession, start: int, end: int, *, at: int = 0) -> Segment:
    """Mark a contiguous phoneme range as a keyword seed."""
    ensure_open(session)
    if not (0 <= start < end <= len(session.phonemes)):
        raise RangeError(
            f"range [{start}, {end}) invalid for {len(session.phonemes)} phonemes"
        )
    for seg in session.segments:
        if seg.overlaps(start, end):
            raise OverlapError(
                f"range [{start}, {end}) overlaps active segment {seg.segment_id}",
                segment_id=seg.segment_id,
            )
    return emit(session, "segment_brushed", {"start": start, "end": end}, at)


@applier("segment_brushed")
def _apply_segment_brushed(session: LearningSession, event: SessionEvent) -> Segment:
    p = event.payload
    segment = Segment(
        segment_id=session.alloc("seg"),
        start=p["start"],
        end=p["end"],
        color_index=session.next_segment_color(),
    )
    session.segments.append(segment)
    session.stage = "keyword_selection"
    return segment


def clear_segments(session: LearningSession, *, at: int = 0) -> LearningSession:
    """Archive all active segments and their keyword choices; nothing is lost.

    Keyword concept nodes leave the active map (their links travel with them
    into the event history) and the matching brainstorming anchors retire, so
    selected keywords and map nodes stay in one-to-one correspondence.
    """
    ensure_open(session)
    emit(session, "segments_cleared", {}, at)
    return session


@applier("segments_cleared")
def _apply_segments_cleared(session: LearningSession, event: SessionEvent) -> LearningSession:
    for seg in session.segments:
        seg.state = "archived"
        session.archived_segments.append(seg)
    session.segments = []
    keyword_ids = {c.keyword_id for c in session.keyword_choices}
    session.archived_choices.extend(session.keyword_choices)
    session.keyword_choices = []
    keyword_node_ids = {
        n.node_id for n in session.map.nodes if n.kind == "keyword" and n.source_ref in keyword_ids
    }
    session.map.links = [
        l for l in session.map.links
        if not (l.endpoints[0] in keyword_node_ids or l.endpoints[1] in keyword_node_ids)
    ]
    session.map.nodes = [n for n in session.map.nodes if n.node_id not in keyword_node_ids]
    session.tree.anchors = [a for a in session.tree.anchors if a.anchor_id not in keyword_ids]
    session.tree.nodes = [n for n in session.tree.nodes if n.anchor_id not in keyword_ids]
    session.stage = "keyword_selection"
    return session


# -- semantic brainstorming tree ----------------------------------------------------

def add_semantic_node(
    session: LearningSession,
    anchor_id: str,
    concept: str,
    *,
    parent_id: str | None = None,
    cue: str = "",
    translation: str = "",
    origin: str = "user",
    at: int = 0,
) -> SemanticNode:
    """Attach a concept under an anchor (the target word or a chosen keyword).

    Two levels below the anchor is the hard ceiling, and concepts must be
    unique per anchor.
    """
    ensure_open(session)
    if session.tree.anchor(anchor_id) is None:
        raise UnknownAnchor(f"unknown anchor {anchor_id!r}")
    if not concept or not concept.strip():
        raise ValidationError("concept must be non-empty")
    concept = concept.strip()
    depth = 1
    if parent_id is not None:
        parent = session.tree.node(parent_id)
        if parent is None or parent.anchor_id != anchor_id:
            raise UnknownSemanticNode(f"unknown parent node {parent_id!r} under {anchor_id!r}")
        depth = parent.depth + 1
        if depth > MAX_TREE_DEPTH:
            raise DepthExceeded(f"nodes deeper than {MAX_TREE_DEPTH} levels are not allowed")
    if concept in session.tree.concepts_under(anchor_id):
        raise DuplicateConcept(f"concept {concept!r} already exists under {anchor_id!r}")
    if origin not in ("user", "suggested"):
        raise ValidationError(f"invalid origin {origin!r}")
    return emit(
        session,
        "semantic_node_added",
        {
            "anchor_id": anchor_id,
            "parent_id": parent_id,
            "concept": concept,
            "cue": cue,
            "translation": translation,
            "origin": origin,
            "depth": depth,
        },
        at,
    )


@applier("semantic_node_added")
def _apply_semantic_node_added(session: LearningSession, event: SessionEvent) -> SemanticNode:
    p = event.payload
    node = SemanticNode(
        node_id=session.alloc("sn"),
        anchor_id=p["anchor_id"],
        parent_id=p["parent_id"],
        concept=p["concept"],
        cue=p["cue"],
        translation=p["translation"],
        origin=p["origin"],
        depth=p["depth"],
    )
    session.tree.nodes.append(node)
    session.stage = "keyword_selection"
    return node


def suggest_semantic_nodes(
    session: LearningSession,
    gateway: "Gateway",
    anchor_id: str,
    count: int = 4,
) -> list[SemanticSuggestion]:
    """Request concept candidates for an anchor. Pure: nothing is attached."""
    anchor = session.tree.anchor(anchor_id)
    if anchor is None:
        raise UnknownAnchor(f"unknown anchor {anchor_id!r}")
    if count < 1:
        raise ValidationError("count must be >= 1")
    items = gateway.call_text(
        "semantic_assoc",
        {"target": anchor.concept, "count": count},
    )
    existing = session.tree.concepts_under(anchor_id) | {anchor.concept}
    suggestions = []
    for item in items:
        if item["concept"] in existing:
            continue
        existing.add(item["concept"])
        suggestions.append(
            SemanticSuggestion(
                concept=item["concept"],
                cue=item.get("cue", ""),
                translation=item.get("translation", ""),
            )
        )
    return suggestions[:count]


# -- keyword suggestion pipeline ------------------------------------------------------

def suggest_keywords(
    session: LearningSession,
    gateway: "Gateway",
    segment_id: str,
    selected_node_ids: list[str] | None = None,
    *,
    at: int = 0,
) -> KeywordBatch:
    """Produce a batch of exactly four keyword cards for an active segment.

    Stage one over-generates candidates from the segment's phoneme substring
    and the learner's selected concepts at a creative temperature; stage two
    reviews them at a conservative temperature and returns the four best,
    never repeating a keyword already shown in this session.
    """
    ensure_open(session)
    segment = session.segment(segment_id)
    if segment is None:
        raise UnknownSegment(f"no active segment {segment_id!r}")
    selected_node_ids = list(selected_node_ids or [])
    related: list[str] = []
    for node_id in selected_node_ids:
        node = session.tree.node(node_id)
        if node is None:
            raise UnknownSemanticNode(f"unknown semantic node {node_id!r}")
        related.append(node.concept)
    ipa = session.segment_ipa(segment)
    shown = session.shown_keywords()

    candidates = gateway.call_text(
        "keyword_gen",
        {"ipa": ipa, "related": related},
    )

    def not_already_shown(items: list[dict]) -> None:
        repeats = [i["keyword"] for i in items if i["keyword"] in shown]
        if repeats:
            raise ValueError(f"keywords already shown this session: {repeats}")

    survivors = gateway.call_text(
        "keyword_review",
        {"ipa": ipa, "candidates": candidates, "exclude": sorted(shown)},
        extra_check=not_already_shown,
    )
    return emit(
        session,
        "keyword_batch_suggested",
        {
            "segment_id": segment_id,
            "source_node_ids": selected_node_ids,
            "cards": survivors,
        },
        at,
    )


@applier("keyword_batch_suggested")
def _apply_keyword_batch_suggested(session: LearningSession, event: SessionEvent) -> KeywordBatch:
    p = event.payload
    batch_id = session.alloc("batch")
    cards = [
        KeywordCard(
            card_id=session.alloc("kc"),
            keyword=c["keyword"],
            explanation=c["explanation"],
            reasoning=c["reasoning"],
            source_segment_id=p["segment_id"],
            source_node_ids=list(p["source_node_ids"]),
            batch_id=batch_id,
        )
        for c in p["cards"]
    ]
    batch = KeywordBatch(batch_id=batch_id, segment_id=p["segment_id"], cards=cards)
    session.batches.append(batch)
    session.stage = "keyword_selection"
    return batch


def _resolve_chain(session: LearningSession, chain_node_ids: list[str]) -> list[str]:
    """Turn a path of semantic node ids into concepts, anchor concept first."""
    if not chain_node_ids:
        return []
    concepts: list[str] = []
    anchor_id: str | None = None
    for node_id in chain_node_ids:
        node = session.tree.node(node_id)
        if node is None:
            raise UnknownSemanticNode(f"unknown semantic node {node_id!r}")
        if anchor_id is None:
            anchor_id = node.anchor_id
        elif node.anchor_id != anchor_id:
            raise ValidationError("chain nodes must share one anchor")
        concepts.append(node.concept)
    anchor = session.tree.anchor(anchor_id or "")
    assert anchor is not None
    return [anchor.concept, *concepts]


def select_keyword(
    session: LearningSession,
    segment_id: str,
    *,
    card_id: str | None = None,
    keyword: str | None = None,
    explanation: str = "",
    chain_node_ids: list[str] | None = None,
    at: int = 0,
) -> KeywordChoice:
    """Bind a keyword to a segment, from a suggestion card or typed directly.

    The choice seeds the association map in the same step: a keyword concept
    node, a link to the meaning node, and a chain node carrying the preferred
    semantic path. Selecting on a segment that already has a keyword replaces
    it via the synchronized rename path instead.
    """
    ensure_open(session)
    segment = session.segment(segment_id)
    if segment is None:
        raise UnknownSegment(f"no active segment {segment_id!r}")

    if card_id is not None:
        card = None
        for batch in session.batches:
            for c in batch.cards:
                if c.card_id == card_id:
                    card = c
        if card is None or card.source_segment_id != segment_id:
            raise UnknownCard(f"no card {card_id!r} for segment {segment_id!r}")
        keyword = card.keyword
        explanation = card.explanation
        origin = "card"
    else:
        if not keyword:
            raise ValidationError("either card_id or keyword is required")
        origin = "user"

    chain = _resolve_chain(session, list(chain_node_ids or []))

    existing = session.choice_for_segment(segment_id)
    if existing is not None:
        return propagate_keyword_change(
            session,
            existing.keyword_id,
            keyword=keyword,
            explanation=explanation,
            origin=origin,
            chain=chain,
            at=at,
        )

    return emit(
        session,
        "keyword_selected",
        {
            "segment_id": segment_id,
            "card_id": card_id,
            "keyword": keyword,
            "explanation": explanation,
            "origin": origin,
            "chain": chain,
        },
        at,
    )


@applier("keyword_selected")
def _apply_keyword_selected(session: LearningSession, event: SessionEvent) -> KeywordChoice:
    p = event.payload
    keyword_id = session.alloc("kw")
    choice = KeywordChoice(
        keyword_id=keyword_id,
        segment_id=p["segment_id"],
        keyword=p["keyword"],
        explanation=p["explanation"],
        origin=p["origin"],
        chain=list(p["chain"]),
    )
    session.keyword_choices.append(choice)

    node = ConceptNode(
        node_id=session.alloc("cn"),
        kind="keyword",
        label=p["keyword"],
        color_index=session.next_color("ncolor"),
        source_ref=keyword_id,
    )
    session.map.nodes.append(node)

    meaning = session.map.meaning_node()
    from .models import AssociationLink, ChainNode  # local to avoid import noise

    link = AssociationLink(
        link_id=session.alloc("ln"),
        endpoints=tuple(sorted((meaning.node_id, node.node_id))),
        chain=ChainNode(CHAIN_JOINER.join(p["chain"]) if p["chain"] else ""),
    )
    session.map.links.append(link)

    session.tree.anchors.append(
        SemanticAnchor(anchor_id=keyword_id, concept=p["keyword"], kind="keyword")
    )
    session.stage = "keyword_selection"
    return choice
