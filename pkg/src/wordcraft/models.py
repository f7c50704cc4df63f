"""Domain objects shared across the session stages.

Everything here serializes to plain JSON dicts with stable key order so that
snapshots, golden files, and replays compare byte-for-byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

PALETTE_SIZE = 8


# -- phonological segments -----------------------------------------------------

@dataclass
class Segment:
    segment_id: str
    start: int  # half-open token range over the entry's phonemes
    end: int
    color_index: int
    state: str = "active"  # "active" | "archived"

    def overlaps(self, start: int, end: int) -> bool:
        return self.start < end and start < self.end

    def to_dict(self) -> dict:
        return {
            "segment_id": self.segment_id,
            "start": self.start,
            "end": self.end,
            "color_index": self.color_index,
            "state": self.state,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Segment":
        return cls(d["segment_id"], d["start"], d["end"], d["color_index"], d["state"])


# -- semantic brainstorming tree -------------------------------------------------

@dataclass
class SemanticAnchor:
    anchor_id: str
    concept: str
    kind: str  # "meaning" | "keyword"

    def to_dict(self) -> dict:
        return {"anchor_id": self.anchor_id, "concept": self.concept, "kind": self.kind}

    @classmethod
    def from_dict(cls, d: dict) -> "SemanticAnchor":
        return cls(d["anchor_id"], d["concept"], d["kind"])


@dataclass
class SemanticNode:
    node_id: str
    anchor_id: str
    parent_id: str | None
    concept: str
    cue: str = ""
    translation: str = ""
    origin: str = "user"  # "user" | "suggested"
    depth: int = 1

    def to_dict(self) -> dict:
        return {
            "node_id": self.node_id,
            "anchor_id": self.anchor_id,
            "parent_id": self.parent_id,
            "concept": self.concept,
            "cue": self.cue,
            "translation": self.translation,
            "origin": self.origin,
            "depth": self.depth,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SemanticNode":
        return cls(
            d["node_id"], d["anchor_id"], d["parent_id"], d["concept"],
            d["cue"], d["translation"], d["origin"], d["depth"],
        )


@dataclass
class SemanticTree:
    anchors: list[SemanticAnchor] = field(default_factory=list)
    nodes: list[SemanticNode] = field(default_factory=list)

    def anchor(self, anchor_id: str) -> SemanticAnchor | None:
        for a in self.anchors:
            if a.anchor_id == anchor_id:
                return a
        return None

    def node(self, node_id: str) -> SemanticNode | None:
        for n in self.nodes:
            if n.node_id == node_id:
                return n
        return None

    def concepts_under(self, anchor_id: str) -> set[str]:
        return {n.concept for n in self.nodes if n.anchor_id == anchor_id}

    def to_dict(self) -> dict:
        return {
            "anchors": [a.to_dict() for a in self.anchors],
            "nodes": [n.to_dict() for n in self.nodes],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SemanticTree":
        return cls(
            [SemanticAnchor.from_dict(a) for a in d["anchors"]],
            [SemanticNode.from_dict(n) for n in d["nodes"]],
        )


@dataclass(frozen=True)
class SemanticSuggestion:
    """Unattached candidate node; becomes a SemanticNode only on acceptance."""

    concept: str
    cue: str = ""
    translation: str = ""

    def to_dict(self) -> dict:
        return {"concept": self.concept, "cue": self.cue, "translation": self.translation}


# -- keyword selection ------------------------------------------------------------

@dataclass
class KeywordCard:
    card_id: str
    keyword: str
    explanation: str
    reasoning: str
    source_segment_id: str
    source_node_ids: list[str]
    batch_id: str

    def to_dict(self) -> dict:
        return {
            "card_id": self.card_id,
            "keyword": self.keyword,
            "explanation": self.explanation,
            "reasoning": self.reasoning,
            "source_segment_id": self.source_segment_id,
            "source_node_ids": list(self.source_node_ids),
            "batch_id": self.batch_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KeywordCard":
        return cls(
            d["card_id"], d["keyword"], d["explanation"], d["reasoning"],
            d["source_segment_id"], list(d["source_node_ids"]), d["batch_id"],
        )


@dataclass
class KeywordBatch:
    batch_id: str
    segment_id: str
    cards: list[KeywordCard]

    def to_dict(self) -> dict:
        return {
            "batch_id": self.batch_id,
            "segment_id": self.segment_id,
            "cards": [c.to_dict() for c in self.cards],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KeywordBatch":
        return cls(d["batch_id"], d["segment_id"], [KeywordCard.from_dict(c) for c in d["cards"]])


@dataclass
class KeywordChoice:
    keyword_id: str
    segment_id: str
    keyword: str
    explanation: str
    origin: str  # "user" | "card"
    chain: list[str] = field(default_factory=list)  # concepts, anchor first

    def to_dict(self) -> dict:
        return {
            "keyword_id": self.keyword_id,
            "segment_id": self.segment_id,
            "keyword": self.keyword,
            "explanation": self.explanation,
            "origin": self.origin,
            "chain": list(self.chain),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KeywordChoice":
        return cls(
            d["keyword_id"], d["segment_id"], d["keyword"],
            d["explanation"], d["origin"], list(d["chain"]),
        )


# -- association map ---------------------------------------------------------------

@dataclass
class ConceptNode:
    node_id: str
    kind: str  # "meaning" | "keyword"
    label: str
    color_index: int
    source_ref: str  # sense_id for the meaning node, keyword_id for keyword nodes

    def to_dict(self) -> dict:
        return {
            "node_id": self.node_id,
            "kind": self.kind,
            "label": self.label,
            "color_index": self.color_index,
            "source_ref": self.source_ref,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConceptNode":
        return cls(d["node_id"], d["kind"], d["label"], d["color_index"], d["source_ref"])


@dataclass
class ChainNode:
    text: str = ""

    def to_dict(self) -> dict:
        return {"text": self.text}


@dataclass
class Note:
    note_id: str
    text: str
    created_at: int

    def to_dict(self) -> dict:
        return {"note_id": self.note_id, "text": self.text, "created_at": self.created_at}

    @classmethod
    def from_dict(cls, d: dict) -> "Note":
        return cls(d["note_id"], d["text"], d["created_at"])


@dataclass
class AssociationLink:
    link_id: str
    endpoints: tuple[str, str]  # node ids, stored sorted
    chain: ChainNode = field(default_factory=ChainNode)
    notes: list[Note] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "link_id": self.link_id,
            "endpoints": list(self.endpoints),
            "chain": self.chain.to_dict(),
            "notes": [n.to_dict() for n in self.notes],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AssociationLink":
        return cls(
            d["link_id"],
            (d["endpoints"][0], d["endpoints"][1]),
            ChainNode(d["chain"]["text"]),
            [Note.from_dict(n) for n in d["notes"]],
        )


@dataclass
class AssociationMap:
    nodes: list[ConceptNode] = field(default_factory=list)
    links: list[AssociationLink] = field(default_factory=list)

    def node(self, node_id: str) -> ConceptNode | None:
        for n in self.nodes:
            if n.node_id == node_id:
                return n
        return None

    def meaning_node(self) -> ConceptNode:
        for n in self.nodes:
            if n.kind == "meaning":
                return n
        raise LookupError("map has no meaning node")

    def node_by_source(self, source_ref: str) -> ConceptNode | None:
        for n in self.nodes:
            if n.source_ref == source_ref:
                return n
        return None

    def link(self, link_id: str) -> AssociationLink | None:
        for l in self.links:
            if l.link_id == link_id:
                return l
        return None

    def link_for_pair(self, a: str, b: str) -> AssociationLink | None:
        pair = tuple(sorted((a, b)))
        for l in self.links:
            if l.endpoints == pair:
                return l
        return None

    def to_dict(self) -> dict:
        return {
            "nodes": [n.to_dict() for n in self.nodes],
            "links": [l.to_dict() for l in self.links],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AssociationMap":
        return cls(
            [ConceptNode.from_dict(n) for n in d["nodes"]],
            [AssociationLink.from_dict(l) for l in d["links"]],
        )


# -- imagery canvas -----------------------------------------------------------------

@dataclass
class BBox:
    """Rectangle in normalized canvas coordinates, origin top-left."""

    x: float
    y: float
    w: float
    h: float

    def valid(self) -> bool:
        return (
            self.w > 0 and self.h > 0
            and 0 <= self.x and 0 <= self.y
            and self.x + self.w <= 1 and self.y + self.h <= 1
        )

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}

    @classmethod
    def from_dict(cls, d: dict) -> "BBox":
        return cls(d["x"], d["y"], d["w"], d["h"])


@dataclass
class CanvasElement:
    element_id: str
    bbox: BBox
    tags: list[str]  # concept node ids, at least one
    description: str = ""

    def to_dict(self) -> dict:
        return {
            "element_id": self.element_id,
            "bbox": self.bbox.to_dict(),
            "tags": list(self.tags),
            "description": self.description,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CanvasElement":
        return cls(d["element_id"], BBox.from_dict(d["bbox"]), list(d["tags"]), d["description"])


@dataclass
class CanvasRelation:
    relation_id: str
    endpoints: tuple[str, str]  # element ids, stored sorted
    text: str = ""

    def to_dict(self) -> dict:
        return {
            "relation_id": self.relation_id,
            "endpoints": list(self.endpoints),
            "text": self.text,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CanvasRelation":
        return cls(d["relation_id"], (d["endpoints"][0], d["endpoints"][1]), d["text"])


@dataclass
class CanvasModel:
    elements: list[CanvasElement] = field(default_factory=list)
    relations: list[CanvasRelation] = field(default_factory=list)

    def element(self, element_id: str) -> CanvasElement | None:
        for e in self.elements:
            if e.element_id == element_id:
                return e
        return None

    def relation(self, relation_id: str) -> CanvasRelation | None:
        for r in self.relations:
            if r.relation_id == relation_id:
                return r
        return None

    def relation_for_pair(self, a: str, b: str) -> CanvasRelation | None:
        pair = tuple(sorted((a, b)))
        for r in self.relations:
            if r.endpoints == pair:
                return r
        return None

    def to_dict(self) -> dict:
        return {
            "elements": [e.to_dict() for e in self.elements],
            "relations": [r.to_dict() for r in self.relations],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CanvasModel":
        return cls(
            [CanvasElement.from_dict(e) for e in d["elements"]],
            [CanvasRelation.from_dict(r) for r in d["relations"]],
        )


# -- generated images and the recorded card ------------------------------------------

@dataclass
class ImageRecord:
    image_id: str
    image_ref: str  # path relative to the data dir
    style: str
    width: int
    height: int
    at: int

    def to_dict(self) -> dict:
        return {
            "image_id": self.image_id,
            "image_ref": self.image_ref,
            "style": self.style,
            "width": self.width,
            "height": self.height,
            "at": self.at,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ImageRecord":
        return cls(d["image_id"], d["image_ref"], d["style"], d["width"], d["height"], d["at"])


@dataclass
class WordCard:
    """Immutable record of one completed learning session."""

    card_id: str
    word: str
    sense: dict[str, Any]
    keywords: list[dict[str, Any]]
    association: str | None
    links: list[dict[str, Any]]
    style: str | None
    image_ref: str | None
    total_active_ms: int
    created_at: int
    event_log_ref: str

    def to_dict(self) -> dict:
        return {
            "card_id": self.card_id,
            "word": self.word,
            "sense": self.sense,
            "keywords": self.keywords,
            "association": self.association,
            "links": self.links,
            "style": self.style,
            "image_ref": self.image_ref,
            "total_active_ms": self.total_active_ms,
            "created_at": self.created_at,
            "event_log_ref": self.event_log_ref,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WordCard":
        return cls(
            d["card_id"], d["word"], d["sense"], d["keywords"], d["association"],
            d["links"], d["style"], d["image_ref"], d["total_active_ms"],
            d["created_at"], d["event_log_ref"],
        )
