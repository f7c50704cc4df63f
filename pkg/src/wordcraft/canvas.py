"""Imagery canvas: recall path, coverage gating, image requests, word cards.

Activation rules. A concept node is active when at least one canvas element
carries its tag. A link is active when one element carries both endpoint tags
(co-location) or a drawn relation joins an element tagged with one endpoint to
an element tagged with the other; an empty relation sentence still activates.
Image generation is gated on the full recall path being active.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Sequence

from .errors import (
    BadBBox,
    NoImage,
    RecallPathIncomplete,
    SelfRelation,
    UnknownConceptTag,
    UnknownElement,
    UnknownRelation,
    UnknownStyle,
    ValidationError,
)
from .models import (
    BBox,
    CanvasElement,
    CanvasRelation,
    ImageRecord,
    WordCard,
)
from .session import LearningSession, SessionEvent, applier, emit, ensure_open

if TYPE_CHECKING:
    from .gateway import Gateway

STYLE_PRESETS: dict[str, str] = {
    "pixar_animation": "Pixar-style 3D animation",
    "watercolor": "soft watercolor painting",
    "flat_illustration": "flat vector illustration",
    "sketch": "black-and-white pencil sketch",
}


# -- coverage core ---------------------------------------------------------------

def coverage_core(
    node_ids: Sequence[str],
    link_pairs: Sequence[tuple[str, str]],
    element_tags: Sequence[frozenset[str]],
    relation_pairs: Sequence[tuple[frozenset[str], frozenset[str]]],
) -> tuple[set[str], set[tuple[str, str]]]:
    """Compute active nodes and links from tag sets alone.

    ``relation_pairs`` holds the tag sets of each relation's two endpoint
    elements.
    """
    active_nodes = {
        node for node in node_ids if any(node in tags for tags in element_tags)
    }
    active_links: set[tuple[str, str]] = set()
    for a, b in link_pairs:
        if any(a in tags and b in tags for tags in element_tags):
            active_links.add((a, b))
            continue
        for ta, tb in relation_pairs:
            if (a in ta and b in tb) or (b in ta and a in tb):
                active_links.add((a, b))
                break
    return active_nodes, active_links


@dataclass
class Coverage:
    active_nodes: set[str]
    active_links: set[str]  # link ids
    missing_nodes: list[str]
    missing_links: list[str]  # link ids
    is_complete: bool


def compute_coverage(session: LearningSession) -> Coverage:
    """Evaluate the activation state of every map node and link."""
    element_tags = [frozenset(e.tags) for e in session.canvas.elements]
    tags_by_element = {e.element_id: frozenset(e.tags) for e in session.canvas.elements}
    relation_pairs = [
        (tags_by_element[r.endpoints[0]], tags_by_element[r.endpoints[1]])
        for r in session.canvas.relations
    ]
    node_ids = [n.node_id for n in session.map.nodes]
    pair_to_id = {l.endpoints: l.link_id for l in session.map.links}
    active_nodes, active_pairs = coverage_core(
        node_ids, list(pair_to_id.keys()), element_tags, relation_pairs
    )
    active_links = {pair_to_id[p] for p in active_pairs}
    missing_nodes = [n for n in node_ids if n not in active_nodes]
    missing_links = [l.link_id for l in session.map.links if l.link_id not in active_links]
    return Coverage(
        active_nodes=active_nodes,
        active_links=active_links,
        missing_nodes=missing_nodes,
        missing_links=missing_links,
        is_complete=not missing_nodes and not missing_links,
    )


@dataclass
class RecallPath:
    """Simplified view of the map: concept nodes and links with activation."""

    nodes: list[dict] = field(default_factory=list)
    links: list[dict] = field(default_factory=list)
    is_complete: bool = False

    def to_dict(self) -> dict:
        return {"nodes": self.nodes, "links": self.links, "is_complete": self.is_complete}


def derive_recall_path(session: LearningSession) -> RecallPath:
    """Project the association map onto its recall view; never stored."""
    cov = compute_coverage(session)
    nodes = [
        {
            "node_id": n.node_id,
            "label": n.label,
            "kind": n.kind,
            "color_index": n.color_index,
            "active": n.node_id in cov.active_nodes,
        }
        for n in session.map.nodes
    ]
    links = [
        {
            "link_id": l.link_id,
            "endpoints": list(l.endpoints),
            "active": l.link_id in cov.active_links,
        }
        for l in session.map.links
    ]
    return RecallPath(nodes=nodes, links=links, is_complete=cov.is_complete)


# -- canvas editing ------------------------------------------------------------------

def _check_bbox(bbox: BBox) -> None:
    if not bbox.valid():
        raise BadBBox(
            "bbox must lie within the unit canvas with positive size",
            bbox=bbox.to_dict(),
        )


def _check_tags(session: LearningSession, tags: Iterable[str]) -> list[str]:
    cleaned: list[str] = []
    for tag in tags:
        if session.map.node(tag) is None:
            raise UnknownConceptTag(f"tag {tag!r} is not a concept node")
        if tag not in cleaned:
            cleaned.append(tag)
    if not cleaned:
        raise ValidationError("an element needs at least one concept tag")
    return cleaned


def add_element(
    session: LearningSession,
    bbox: BBox,
    tags: list[str],
    description: str = "",
    *,
    at: int = 0,
) -> CanvasElement:
    ensure_open(session)
    _check_bbox(bbox)
    cleaned = _check_tags(session, tags)
    return emit(
        session,
        "element_added",
        {"bbox": bbox.to_dict(), "tags": cleaned, "description": description},
        at,
    )


@applier("element_added")
def _apply_element_added(session: LearningSession, event: SessionEvent) -> CanvasElement:
    p = event.payload
    element = CanvasElement(
        element_id=session.alloc("el"),
        bbox=BBox.from_dict(p["bbox"]),
        tags=list(p["tags"]),
        description=p["description"],
    )
    session.canvas.elements.append(element)
    session.stage = "imagery"
    return element


def update_element(
    session: LearningSession,
    element_id: str,
    *,
    bbox: BBox | None = None,
    tags: list[str] | None = None,
    description: str | None = None,
    at: int = 0,
) -> CanvasElement:
    ensure_open(session)
    if session.canvas.element(element_id) is None:
        raise UnknownElement(f"unknown element {element_id!r}")
    payload: dict = {"element_id": element_id, "bbox": None, "tags": None, "description": None}
    if bbox is not None:
        _check_bbox(bbox)
        payload["bbox"] = bbox.to_dict()
    if tags is not None:
        payload["tags"] = _check_tags(session, tags)
    if description is not None:
        payload["description"] = description
    return emit(session, "element_updated", payload, at)


@applier("element_updated")
def _apply_element_updated(session: LearningSession, event: SessionEvent) -> CanvasElement:
    p = event.payload
    element = session.canvas.element(p["element_id"])
    assert element is not None
    if p["bbox"] is not None:
        element.bbox = BBox.from_dict(p["bbox"])
    if p["tags"] is not None:
        element.tags = list(p["tags"])
    if p["description"] is not None:
        element.description = p["description"]
    session.stage = "imagery"
    return element


def delete_element(session: LearningSession, element_id: str, *, at: int = 0) -> LearningSession:
    """Remove an element; relations touching it are cascaded away."""
    ensure_open(session)
    if session.canvas.element(element_id) is None:
        raise UnknownElement(f"unknown element {element_id!r}")
    emit(session, "element_deleted", {"element_id": element_id}, at)
    return session


@applier("element_deleted")
def _apply_element_deleted(session: LearningSession, event: SessionEvent) -> LearningSession:
    element_id = event.payload["element_id"]
    session.canvas.elements = [
        e for e in session.canvas.elements if e.element_id != element_id
    ]
    session.canvas.relations = [
        r for r in session.canvas.relations if element_id not in r.endpoints
    ]
    session.stage = "imagery"
    return session


def add_relation(
    session: LearningSession,
    element_a: str,
    element_b: str,
    text: str = "",
    *,
    at: int = 0,
) -> CanvasRelation:
    """Join two elements; the sentence may be empty when placement says enough."""
    ensure_open(session)
    for element_id in (element_a, element_b):
        if session.canvas.element(element_id) is None:
            raise UnknownElement(f"unknown element {element_id!r}")
    if element_a == element_b:
        raise SelfRelation("a relation needs two distinct elements")
    return emit(
        session,
        "relation_added",
        {"element_a": element_a, "element_b": element_b, "text": text},
        at,
    )


@applier("relation_added")
def _apply_relation_added(session: LearningSession, event: SessionEvent) -> CanvasRelation:
    p = event.payload
    existing = session.canvas.relation_for_pair(p["element_a"], p["element_b"])
    if existing is not None:
        existing.text = p["text"]
        session.stage = "imagery"
        return existing
    relation = CanvasRelation(
        relation_id=session.alloc("rel"),
        endpoints=tuple(sorted((p["element_a"], p["element_b"]))),
        text=p["text"],
    )
    session.canvas.relations.append(relation)
    session.stage = "imagery"
    return relation


def delete_relation(session: LearningSession, relation_id: str, *, at: int = 0) -> LearningSession:
    ensure_open(session)
    if session.canvas.relation(relation_id) is None:
        raise UnknownRelation(f"unknown relation {relation_id!r}")
    emit(session, "relation_deleted", {"relation_id": relation_id}, at)
    return session


@applier("relation_deleted")
def _apply_relation_deleted(session: LearningSession, event: SessionEvent) -> LearningSession:
    relation_id = event.payload["relation_id"]
    session.canvas.relations = [
        r for r in session.canvas.relations if r.relation_id != relation_id
    ]
    session.stage = "imagery"
    return session


# -- inspiration ----------------------------------------------------------------------

def suggest_visual_elements(
    session: LearningSession,
    gateway: "Gateway",
    node_ids: list[str],
) -> list[str]:
    """Request drawable noun phrases for the given concepts. Pure."""
    if not node_ids:
        raise ValidationError("node_ids must be non-empty")
    concepts = []
    for node_id in node_ids:
        node = session.map.node(node_id)
        if node is None:
            raise UnknownConceptTag(f"tag {node_id!r} is not a concept node")
        concepts.append(node.label)
    items = gateway.call_text("imagery_recommender", {"concepts": concepts})
    descriptions = [e.description for e in session.canvas.elements if e.description]
    return [s for s in items if not any(s in d for d in descriptions)]


def suggest_relations(
    session: LearningSession,
    gateway: "Gateway",
    element_a: str,
    element_b: str,
) -> list[str]:
    """Request one-sentence links between two elements. Pure."""
    first = session.canvas.element(element_a)
    second = session.canvas.element(element_b)
    if first is None or second is None:
        raise UnknownElement("both elements must exist")

    def describe(element: CanvasElement) -> str:
        labels = []
        for tag in element.tags:
            node = session.map.node(tag)
            if node is not None:
                labels.append(node.label)
        head = " + ".join(labels)
        return f"{head}: {element.description}" if element.description else head

    return gateway.call_text(
        "scene_relation",
        {"left": describe(first), "right": describe(second)},
    )


# -- image request ---------------------------------------------------------------------

@dataclass
class ImageRequest:
    """Layout-guided request: regions, relations, style, fixed constraints."""

    layout: list[dict]
    relations: list[dict]
    style: str
    negative_constraints: str

    def to_dict(self) -> dict:
        return {
            "layout": self.layout,
            "relations": self.relations,
            "style": self.style,
            "negative_constraints": self.negative_constraints,
        }


def _region_label(session: LearningSession, element: CanvasElement) -> str:
    labels = []
    for tag in element.tags:
        node = session.map.node(tag)
        if node is not None:
            labels.append(node.label)
    return " + ".join(labels)


def build_image_request(session: LearningSession, style: str, gateway: "Gateway") -> ImageRequest:
    """Assemble the generation request once the recall path is fully active.

    Raises with the exact set of inactive nodes and links otherwise, so the
    caller can show the learner what is still missing.
    """
    if style not in available_styles(gateway):
        raise UnknownStyle(f"unknown style preset {style!r}")
    cov = compute_coverage(session)
    if not cov.is_complete:
        missing_nodes = []
        for node_id in cov.missing_nodes:
            node = session.map.node(node_id)
            missing_nodes.append(node.label if node else node_id)
        missing_links = []
        for link_id in cov.missing_links:
            link = session.map.link(link_id)
            assert link is not None
            a = session.map.node(link.endpoints[0])
            b = session.map.node(link.endpoints[1])
            missing_links.append([a.label if a else "", b.label if b else ""])
        raise RecallPathIncomplete(missing_nodes=missing_nodes, missing_links=missing_links)

    index_of = {e.element_id: i + 1 for i, e in enumerate(session.canvas.elements)}
    layout = [
        {
            "region": index_of[e.element_id],
            "bbox": e.bbox.to_dict(),
            "label": _region_label(session, e),
            "description": e.description,
        }
        for e in session.canvas.elements
    ]
    relations = [
        {
            "regions": [index_of[r.endpoints[0]], index_of[r.endpoints[1]]],
            "text": r.text,
        }
        for r in session.canvas.relations
    ]
    return ImageRequest(
        layout=layout,
        relations=relations,
        style=style,
        negative_constraints=gateway.constraint_block("image_compose"),
    )


def image_request_variables(request: ImageRequest, gateway: "Gateway") -> dict:
    """Render the request into the template variables of the compose prompt."""
    wireframe_lines = []
    description_lines = []
    for region in request.layout:
        b = region["bbox"]
        wireframe_lines.append(
            f"region {region['region']}: box=(x={b['x']:.3f}, y={b['y']:.3f}, "
            f"w={b['w']:.3f}, h={b['h']:.3f}) label=\"{region['label']}\""
        )
        description_lines.append(f"region {region['region']}: {region['description']}")
    relation_lines = [
        f"region {a} <-> region {b}: {text or '(implied by placement)'}"
        for (a, b), text in (((r["regions"][0], r["regions"][1]), r["text"]) for r in request.relations)
    ]
    styles = available_styles(gateway)
    return {
        "wireframe_spec": "\n".join(wireframe_lines),
        "region_descriptions": "\n".join(description_lines),
        "relations": "\n".join(relation_lines) if relation_lines else "(none)",
        "style": styles[request.style],
    }


def available_styles(gateway: "Gateway") -> dict[str, str]:
    styles = dict(STYLE_PRESETS)
    styles.update(gateway.extra_styles)
    return styles


# -- image attachment and the word card ---------------------------------------------------

def attach_image(
    session: LearningSession,
    *,
    image_id: str,
    image_ref: str,
    style: str,
    width: int,
    height: int,
    at: int = 0,
) -> ImageRecord:
    """Record a finished generation; the newest image becomes the default."""
    ensure_open(session)
    return emit(
        session,
        "image_attached",
        {
            "image_id": image_id,
            "image_ref": image_ref,
            "style": style,
            "width": width,
            "height": height,
        },
        at,
    )


@applier("image_attached")
def _apply_image_attached(session: LearningSession, event: SessionEvent) -> ImageRecord:
    p = event.payload
    record = ImageRecord(
        image_id=p["image_id"],
        image_ref=p["image_ref"],
        style=p["style"],
        width=p["width"],
        height=p["height"],
        at=event.at,
    )
    session.images.append(record)
    session.stage = "imagery"
    return record


def record_word_card(
    session: LearningSession,
    *,
    card_id: str,
    allow_missing_image: bool = False,
    at: int = 0,
) -> WordCard:
    """Freeze the session into an immutable word card and close it."""
    ensure_open(session)
    if not session.images and not allow_missing_image:
        raise NoImage("no generated image; pass allow_missing_image to record anyway")
    emit(session, "card_recorded", {"card_id": card_id}, at)
    return build_word_card(session, created_at=at)


@applier("card_recorded")
def _apply_card_recorded(session: LearningSession, event: SessionEvent) -> LearningSession:
    session.card_id = event.payload["card_id"]
    session.stage = "recorded"
    return session


def build_word_card(session: LearningSession, *, created_at: int) -> WordCard:
    """Derive the card content from session state; pure given the event log."""
    assert session.card_id is not None
    keywords = []
    for choice in session.keyword_choices:
        segment = session.segment(choice.segment_id, include_archived=True)
        keywords.append(
            {
                "keyword_id": choice.keyword_id,
                "keyword": choice.keyword,
                "explanation": choice.explanation,
                "origin": choice.origin,
                "chain": list(choice.chain),
                "segment": {
                    "start": segment.start if segment else None,
                    "end": segment.end if segment else None,
                    "ipa": session.segment_ipa(segment) if segment else None,
                },
            }
        )

    links = []
    latest_note: tuple[int, str] | None = None
    for link in session.map.links:
        note_texts = []
        for note in link.notes:
            note_texts.append(note.text)
            ordinal = int(note.note_id.split("-")[-1])
            if latest_note is None or ordinal > latest_note[0]:
                latest_note = (ordinal, note.text)
        a = session.map.node(link.endpoints[0])
        b = session.map.node(link.endpoints[1])
        links.append(
            {
                "endpoints": [a.label if a else "", b.label if b else ""],
                "chain": link.chain.text,
                "notes": note_texts,
            }
        )

    latest_image = session.images[-1] if session.images else None
    return WordCard(
        card_id=session.card_id,
        word=session.surface,
        sense={"sense_id": session.sense_id, "gloss": session.sense_gloss},
        keywords=keywords,
        association=latest_note[1] if latest_note else None,
        links=links,
        style=latest_image.style if latest_image else None,
        image_ref=f"cards/{session.card_id}.png" if latest_image else None,
        total_active_ms=session.total_active_ms,
        created_at=created_at,
        event_log_ref=f"sessions/{session.session_id}/events.jsonl",
    )
