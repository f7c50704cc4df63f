"""Filesystem persistence.

Layout under the data dir:
    sessions/<session_id>/events.jsonl   append-only event log (the truth)
    sessions/<session_id>/snapshot.json  rebuilt cache of the session state
    images/<session_id>/<image_id>.png   every generated image, all retained
    cards/<card_id>.json + <card_id>.png immutable word cards

All refs stored inside JSON documents are relative to the data dir so a data
directory can be moved or compared byte-for-byte across runs.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import NotFound, UnknownSession
from .models import WordCard
from .session import LearningSession, SessionEvent, replay_events


def _dump(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2) + "\n"


class SessionStore:
    def __init__(self, data_dir: str | Path) -> None:
        self.data_dir = Path(data_dir)
        self.sessions_dir = self.data_dir / "sessions"
        self.cards_dir = self.data_dir / "cards"
        self.images_dir = self.data_dir / "images"
        for directory in (self.sessions_dir, self.cards_dir, self.images_dir):
            directory.mkdir(parents=True, exist_ok=True)

    # -- sessions ------------------------------------------------------------

    def _session_dir(self, session_id: str) -> Path:
        return self.sessions_dir / session_id

    def save(self, session: LearningSession, new_events: list[SessionEvent]) -> None:
        """Append fresh events and rewrite the snapshot cache."""
        directory = self._session_dir(session.session_id)
        directory.mkdir(parents=True, exist_ok=True)
        if new_events:
            with open(directory / "events.jsonl", "a", encoding="utf-8") as fh:
                for event in new_events:
                    fh.write(json.dumps(event.to_dict(), ensure_ascii=False) + "\n")
        (directory / "snapshot.json").write_text(
            _dump(session.to_dict()), encoding="utf-8"
        )

    def load(self, session_id: str) -> LearningSession:
        directory = self._session_dir(session_id)
        snapshot = directory / "snapshot.json"
        if snapshot.is_file():
            return LearningSession.from_dict(json.loads(snapshot.read_text(encoding="utf-8")))
        events_file = directory / "events.jsonl"
        if events_file.is_file():
            return replay_events(self.load_events(session_id))
        raise UnknownSession(f"unknown session {session_id!r}")

    def load_events(self, session_id: str) -> list[SessionEvent]:
        events_file = self._session_dir(session_id) / "events.jsonl"
        if not events_file.is_file():
            raise UnknownSession(f"unknown session {session_id!r}")
        events = []
        with open(events_file, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    events.append(SessionEvent.from_dict(json.loads(line)))
        return events

    def list_sessions(self) -> list[str]:
        return sorted(p.name for p in self.sessions_dir.iterdir() if p.is_dir())

    # -- images ------------------------------------------------------------------

    def write_image(self, session_id: str, image_id: str, data: bytes) -> str:
        """Store image bytes; returns the data-dir-relative reference."""
        directory = self.images_dir / session_id
        directory.mkdir(parents=True, exist_ok=True)
        name = f"{image_id}.png"
        (directory / name).write_bytes(data)
        return f"images/{session_id}/{name}"

    def read_blob(self, relative_ref: str) -> bytes:
        path = (self.data_dir / relative_ref).resolve()
        if not str(path).startswith(str(self.data_dir.resolve())) or not path.is_file():
            raise NotFound(f"no stored file {relative_ref!r}")
        return path.read_bytes()

    # -- word cards -----------------------------------------------------------------

    def write_card(self, card: WordCard, image_data: bytes | None) -> Path:
        path = self.cards_dir / f"{card.card_id}.json"
        path.write_text(_dump(card.to_dict()), encoding="utf-8")
        if image_data is not None:
            (self.cards_dir / f"{card.card_id}.png").write_bytes(image_data)
        return path

    def read_card(self, card_id: str) -> WordCard:
        path = self.cards_dir / f"{card_id}.json"
        if not path.is_file():
            raise NotFound(f"unknown card {card_id!r}")
        return WordCard.from_dict(json.loads(path.read_text(encoding="utf-8")))

    def list_cards(self) -> list[WordCard]:
        """All recorded cards, newest first."""
        cards = [
            WordCard.from_dict(json.loads(p.read_text(encoding="utf-8")))
            for p in self.cards_dir.glob("*.json")
        ]
        cards.sort(key=lambda c: (c.created_at, c.card_id), reverse=True)
        return cards
