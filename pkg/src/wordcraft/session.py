"""Per-word learning sessions.

A session is event-sourced: every mutating operation validates against the
current state, resolves all nondeterminism (ids come from per-session
counters, provider output and timestamps are captured in the payload), then
appends exactly one event and applies it. Replaying the event log from an
empty shell reproduces the exact session state, so snapshots are only a cache.

Stages may be revisited in any order until the session is recorded; the
``recorded`` stage is terminal and rejects every further mutation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import SessionClosed, UnknownKeyword, UnknownSense, ValidationError
from .lexicon import Lexicon
from .models import (
    AssociationMap,
    CanvasModel,
    ConceptNode,
    ImageRecord,
    KeywordBatch,
    KeywordChoice,
    PALETTE_SIZE,
    Segment,
    SemanticAnchor,
    SemanticTree,
)

STAGES = ("overview", "keyword_selection", "association", "imagery", "recorded")

MEANING_ANCHOR_ID = "meaning"


@dataclass
class SessionEvent:
    seq: int
    kind: str
    payload: dict[str, Any]
    at: int

    def to_dict(self) -> dict:
        return {"seq": self.seq, "kind": self.kind, "payload": self.payload, "at": self.at}

    @classmethod
    def from_dict(cls, d: dict) -> "SessionEvent":
        return cls(d["seq"], d["kind"], d["payload"], d["at"])


@dataclass
class LearningSession:
    session_id: str = ""
    word_id: str = ""
    sense_id: str = ""
    surface: str = ""
    phonemes: list[str] = field(default_factory=list)
    sense_gloss: str = ""
    stage: str = "overview"
    started_at: int = 0
    total_active_ms: int = 0
    segments: list[Segment] = field(default_factory=list)
    archived_segments: list[Segment] = field(default_factory=list)
    keyword_choices: list[KeywordChoice] = field(default_factory=list)
    archived_choices: list[KeywordChoice] = field(default_factory=list)
    tree: SemanticTree = field(default_factory=SemanticTree)
    map: AssociationMap = field(default_factory=AssociationMap)
    canvas: CanvasModel = field(default_factory=CanvasModel)
    batches: list[KeywordBatch] = field(default_factory=list)
    images: list[ImageRecord] = field(default_factory=list)
    card_id: str | None = None
    counters: dict[str, int] = field(default_factory=dict)
    events: list[SessionEvent] = field(default_factory=list)

    # -- helpers ---------------------------------------------------------------

    def alloc(self, prefix: str) -> str:
        """Allocate the next id for a prefix. Only event appliers may call this."""
        n = self.counters.get(prefix, 0) + 1
        self.counters[prefix] = n
        return f"{prefix}-{n}"

    def next_color(self, kind: str) -> int:
        n = self.counters.get(kind, 0)
        self.counters[kind] = n + 1
        return n % PALETTE_SIZE

    def next_segment_color(self) -> int:
        # Round-robin over the palette, skipping colors held by active segments.
        base = self.counters.get("segcolor", 0)
        used = {s.color_index for s in self.segments if s.state == "active"}
        for offset in range(PALETTE_SIZE):
            candidate = (base + offset) % PALETTE_SIZE
            if candidate not in used:
                self.counters["segcolor"] = base + offset + 1
                return candidate
        # All palette slots busy: fall back to a unique out-of-palette index.
        fallback = PALETTE_SIZE + base
        self.counters["segcolor"] = base + 1
        return fallback

    def segment(self, segment_id: str, include_archived: bool = False) -> Segment | None:
        for s in self.segments:
            if s.segment_id == segment_id:
                return s
        if include_archived:
            for s in self.archived_segments:
                if s.segment_id == segment_id:
                    return s
        return None

    def choice_for_segment(self, segment_id: str) -> KeywordChoice | None:
        for c in self.keyword_choices:
            if c.segment_id == segment_id:
                return c
        return None

    def choice(self, keyword_id: str) -> KeywordChoice | None:
        for c in self.keyword_choices:
            if c.keyword_id == keyword_id:
                return c
        return None

    def shown_keywords(self) -> set[str]:
        return {card.keyword for batch in self.batches for card in batch.cards}

    def segment_ipa(self, segment: Segment) -> str:
        return "".join(self.phonemes[segment.start:segment.end])

    # -- serialization -----------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "word_id": self.word_id,
            "sense_id": self.sense_id,
            "surface": self.surface,
            "phonemes": list(self.phonemes),
            "sense_gloss": self.sense_gloss,
            "stage": self.stage,
            "started_at": self.started_at,
            "total_active_ms": self.total_active_ms,
            "segments": [s.to_dict() for s in self.segments],
            "archived_segments": [s.to_dict() for s in self.archived_segments],
            "keyword_choices": [c.to_dict() for c in self.keyword_choices],
            "archived_choices": [c.to_dict() for c in self.archived_choices],
            "tree": self.tree.to_dict(),
            "map": self.map.to_dict(),
            "canvas": self.canvas.to_dict(),
            "batches": [b.to_dict() for b in self.batches],
            "images": [i.to_dict() for i in self.images],
            "card_id": self.card_id,
            "counters": dict(self.counters),
            "events": [e.to_dict() for e in self.events],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LearningSession":
        return cls(
            session_id=d["session_id"],
            word_id=d["word_id"],
            sense_id=d["sense_id"],
            surface=d["surface"],
            phonemes=list(d["phonemes"]),
            sense_gloss=d["sense_gloss"],
            stage=d["stage"],
            started_at=d["started_at"],
            total_active_ms=d["total_active_ms"],
            segments=[Segment.from_dict(s) for s in d["segments"]],
            archived_segments=[Segment.from_dict(s) for s in d["archived_segments"]],
            keyword_choices=[KeywordChoice.from_dict(c) for c in d["keyword_choices"]],
            archived_choices=[KeywordChoice.from_dict(c) for c in d["archived_choices"]],
            tree=SemanticTree.from_dict(d["tree"]),
            map=AssociationMap.from_dict(d["map"]),
            canvas=CanvasModel.from_dict(d["canvas"]),
            batches=[KeywordBatch.from_dict(b) for b in d["batches"]],
            images=[ImageRecord.from_dict(i) for i in d["images"]],
            card_id=d["card_id"],
            counters=dict(d["counters"]),
            events=[SessionEvent.from_dict(e) for e in d["events"]],
        )


# -- event machinery ------------------------------------------------------------

Applier = Callable[[LearningSession, SessionEvent], Any]

EVENT_APPLIERS: dict[str, Applier] = {}


def applier(kind: str) -> Callable[[Applier], Applier]:
    def register(fn: Applier) -> Applier:
        EVENT_APPLIERS[kind] = fn
        return fn

    return register


def emit(session: LearningSession, kind: str, payload: dict[str, Any], at: int) -> Any:
    """Apply one event to the session and append it to the log."""
    event = SessionEvent(seq=len(session.events), kind=kind, payload=payload, at=at)
    result = EVENT_APPLIERS[kind](session, event)
    session.events.append(event)
    return result


def ensure_open(session: LearningSession) -> None:
    if session.stage == "recorded":
        raise SessionClosed(f"session {session.session_id} is recorded and immutable")


def replay_events(events: list[SessionEvent]) -> LearningSession:
    """Rebuild a session from its event log alone."""
    session = LearningSession()
    for stored in events:
        event = SessionEvent(stored.seq, stored.kind, stored.payload, stored.at)
        EVENT_APPLIERS[event.kind](session, event)
        session.events.append(event)
    return session


# -- operations -------------------------------------------------------------------

def create_session(
    lexicon: Lexicon,
    word_id: str,
    sense_id: str,
    *,
    session_id: str,
    at: int = 0,
) -> LearningSession:
    """Open a session anchored on one sense of a known word.

    The payload snapshots the word data so replay never needs the lexicon.
    """
    entry = lexicon.get(word_id)
    sense = entry.sense(sense_id)
    if sense is None:
        raise UnknownSense(f"word {word_id!r} has no sense {sense_id!r}")
    session = LearningSession()
    emit(
        session,
        "session_created",
        {
            "session_id": session_id,
            "word_id": word_id,
            "sense_id": sense_id,
            "surface": entry.surface,
            "phonemes": list(entry.phonemes),
            "sense_gloss": sense.gloss_l1,
        },
        at,
    )
    return session


@applier("session_created")
def _apply_session_created(session: LearningSession, event: SessionEvent) -> LearningSession:
    p = event.payload
    session.session_id = p["session_id"]
    session.word_id = p["word_id"]
    session.sense_id = p["sense_id"]
    session.surface = p["surface"]
    session.phonemes = list(p["phonemes"])
    session.sense_gloss = p["sense_gloss"]
    session.stage = "overview"
    session.started_at = event.at
    node_id = session.alloc("cn")
    session.map.nodes.append(
        ConceptNode(
            node_id=node_id,
            kind="meaning",
            label=p["sense_gloss"],
            color_index=session.next_color("ncolor"),
            source_ref=p["sense_id"],
        )
    )
    # The brainstorming tree starts anchored on the target word itself.
    session.tree.anchors.append(
        SemanticAnchor(anchor_id=MEANING_ANCHOR_ID, concept=p["surface"], kind="meaning")
    )
    return session


def tick_active(session: LearningSession, delta_ms: int, *, at: int = 0) -> LearningSession:
    """Accumulate client-reported active time."""
    ensure_open(session)
    if delta_ms < 0:
        raise ValidationError("delta_ms must be >= 0")
    emit(session, "time_ticked", {"delta_ms": delta_ms}, at)
    return session


@applier("time_ticked")
def _apply_time_ticked(session: LearningSession, event: SessionEvent) -> LearningSession:
    session.total_active_ms += event.payload["delta_ms"]
    return session


def propagate_keyword_change(
    session: LearningSession,
    old_keyword_id: str,
    *,
    keyword: str,
    explanation: str = "",
    origin: str = "user",
    chain: list[str] | None = None,
    at: int = 0,
) -> KeywordChoice:
    """Replace a selected keyword and synchronize every surface that shows it.

    The keyword's concept-node label and its brainstorming anchor update in
    one step; links, chain nodes, notes, and canvas tags that reference the
    node are preserved untouched. The prior choice is retained in the event.
    """
    ensure_open(session)
    existing = session.choice(old_keyword_id)
    if existing is None:
        raise UnknownKeyword(f"no selected keyword {old_keyword_id!r}")
    if not keyword:
        raise ValidationError("keyword must be non-empty")
    return emit(
        session,
        "keyword_replaced",
        {
            "keyword_id": old_keyword_id,
            "keyword": keyword,
            "explanation": explanation,
            "origin": origin,
            "chain": list(chain) if chain is not None else None,
            "old": existing.to_dict(),
        },
        at,
    )


@applier("keyword_replaced")
def _apply_keyword_replaced(session: LearningSession, event: SessionEvent) -> KeywordChoice:
    p = event.payload
    choice = session.choice(p["keyword_id"])
    assert choice is not None
    choice.keyword = p["keyword"]
    choice.explanation = p["explanation"]
    choice.origin = p["origin"]
    if p["chain"] is not None:
        choice.chain = list(p["chain"])
    node = session.map.node_by_source(choice.keyword_id)
    if node is not None:
        node.label = p["keyword"]
    anchor = session.tree.anchor(choice.keyword_id)
    if anchor is not None:
        anchor.concept = p["keyword"]
    return choice
