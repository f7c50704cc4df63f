"""Vocabulary entries: loading, validation, classification, and screening.

The lexicon file is UTF-8 newline-delimited JSON, one entry per line. Phoneme
transcriptions are stored pre-tokenized (one IPA symbol per list item), and
syllable counts are stored rather than derived; ``validate_syllables`` can
cross-check the stored count against vowel nuclei and warn on mismatch.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import DuplicateWordId, MissingResponse, ParseError, UnknownWord
from .profiles import LanguageProfile

logger = logging.getLogger(__name__)

DEFAULT_IMAGEABILITY_CUTOFF = 450.0
DEFAULT_SYLLABLE_CUTOFF = 2


@dataclass(frozen=True)
class Sense:
    sense_id: str
    gloss_l1: str
    gloss_l2: str = ""
    examples: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "sense_id": self.sense_id,
            "gloss_l1": self.gloss_l1,
            "gloss_l2": self.gloss_l2,
            "examples": list(self.examples),
        }


@dataclass(frozen=True)
class WordEntry:
    word_id: str
    surface: str
    phonemes: tuple[str, ...]
    syllable_count: int
    senses: tuple[Sense, ...]
    imageability: float | None = None
    audio_ref: str | None = None

    def sense(self, sense_id: str) -> Sense | None:
        for s in self.senses:
            if s.sense_id == sense_id:
                return s
        return None

    def to_dict(self) -> dict:
        return {
            "word_id": self.word_id,
            "surface": self.surface,
            "phonemes": list(self.phonemes),
            "syllable_count": self.syllable_count,
            "imageability": self.imageability,
            "senses": [s.to_dict() for s in self.senses],
            "audio_ref": self.audio_ref,
        }


@dataclass(frozen=True)
class WordCategory:
    imageability_class: str  # "high" | "low"
    length_class: str  # "short" | "long"


@dataclass
class Lexicon:
    entries: list[WordEntry] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._by_id = {e.word_id: e for e in self.entries}
        self._by_surface = {e.surface: e for e in self.entries}

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, word_id: str) -> WordEntry:
        try:
            return self._by_id[word_id]
        except KeyError:
            raise UnknownWord(f"unknown word {word_id!r}") from None

    def by_surface(self, surface: str) -> WordEntry | None:
        return self._by_surface.get(surface)

    def search(self, query: str, limit: int = 50) -> list[WordEntry]:
        q = query.strip().lower()
        hits = [e for e in self.entries if q in e.surface.lower()] if q else list(self.entries)
        return hits[:limit]

    def dump(self, path: str | Path) -> None:
        lines = [json.dumps(e.to_dict(), ensure_ascii=False) for e in self.entries]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_entry(record: Mapping, line_no: int, profile: LanguageProfile | None) -> WordEntry:
    def fail(reason: str) -> ParseError:
        return ParseError(line_no, reason)

    word_id = record.get("word_id")
    surface = record.get("surface")
    if not word_id or not isinstance(word_id, str):
        raise fail("missing or invalid word_id")
    if not surface or not isinstance(surface, str):
        raise fail("missing or invalid surface")

    phonemes = record.get("phonemes")
    if not isinstance(phonemes, list) or not phonemes:
        raise fail("phonemes must be a non-empty array")
    for tok in phonemes:
        if not isinstance(tok, str) or not tok:
            raise fail("phoneme tokens must be non-empty strings")
        if profile is not None and tok not in profile.ipa_tokens:
            raise fail(f"phoneme token {tok!r} not in profile {profile.profile_id!r}")

    syllable_count = record.get("syllable_count")
    if not isinstance(syllable_count, int) or syllable_count < 1:
        raise fail("syllable_count must be a positive integer")

    imageability = record.get("imageability")
    if imageability is not None:
        if not isinstance(imageability, (int, float)) or not 100 <= imageability <= 700:
            raise fail("imageability must be null or a number in [100, 700]")

    raw_senses = record.get("senses")
    if not isinstance(raw_senses, list) or not raw_senses:
        raise fail("senses must be a non-empty array")
    senses: list[Sense] = []
    seen_ids: set[str] = set()
    for raw in raw_senses:
        if not isinstance(raw, Mapping):
            raise fail("each sense must be an object")
        sid = raw.get("sense_id")
        gloss_l1 = raw.get("gloss_l1")
        if not sid or not isinstance(sid, str):
            raise fail("sense_id missing")
        if sid in seen_ids:
            raise fail(f"duplicate sense_id {sid!r}")
        seen_ids.add(sid)
        if not gloss_l1 or not isinstance(gloss_l1, str):
            raise fail(f"sense {sid!r}: gloss_l1 must be non-empty")
        senses.append(
            Sense(
                sense_id=sid,
                gloss_l1=gloss_l1,
                gloss_l2=raw.get("gloss_l2") or "",
                examples=tuple(raw.get("examples") or ()),
            )
        )

    return WordEntry(
        word_id=word_id,
        surface=surface,
        phonemes=tuple(phonemes),
        syllable_count=syllable_count,
        imageability=float(imageability) if imageability is not None else None,
        senses=tuple(senses),
        audio_ref=record.get("audio_ref"),
    )


def load_lexicon(path: str | Path, profile: LanguageProfile | None = None) -> Lexicon:
    """Load and validate a newline-delimited JSON lexicon file."""
    entries: list[WordEntry] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(line_no, f"invalid JSON: {exc.msg}") from None
            if not isinstance(record, dict):
                raise ParseError(line_no, "each line must be a JSON object")
            entry = _parse_entry(record, line_no, profile)
            if entry.word_id in seen:
                raise DuplicateWordId(f"duplicate word_id {entry.word_id!r}")
            seen.add(entry.word_id)
            entries.append(entry)
    return Lexicon(entries)


def classify_word(
    entry: WordEntry,
    imageability_cutoff: float = DEFAULT_IMAGEABILITY_CUTOFF,
    syllable_cutoff: int = DEFAULT_SYLLABLE_CUTOFF,
) -> WordCategory:
    """Split a word into one of four classes by imageability and syllable length.

    Entries without an imageability rating classify as low.
    """
    high = entry.imageability is not None and entry.imageability >= imageability_cutoff
    short = entry.syllable_count <= syllable_cutoff
    return WordCategory(
        imageability_class="high" if high else "low",
        length_class="short" if short else "long",
    )


def screen_words(
    candidates: Iterable[str],
    responses: Mapping[str, Mapping[str, str]],
) -> list[str]:
    """Keep only candidates every participant rated ``unknown``.

    ``responses`` maps participant id to a word_id -> rating map, where a
    rating is one of ``known``, ``recognized``, ``unknown``. Order of the
    input candidates is preserved.
    """
    retained: list[str] = []
    for word_id in candidates:
        unanimous = True
        for participant, ratings in responses.items():
            if word_id not in ratings:
                raise MissingResponse(word_id, participant)
            if ratings[word_id] != "unknown":
                unanimous = False
        if unanimous:
            retained.append(word_id)
    return retained


def validate_syllables(entry: WordEntry, profile: LanguageProfile) -> bool:
    """Compare the stored syllable count to the number of vowel-nucleus tokens.

    Returns True when they agree; logs a warning otherwise. Diphthongs are
    single tokens, so each vowel token counts as one nucleus.
    """
    nuclei = sum(1 for tok in entry.phonemes if tok in profile.ipa_vowels)
    if nuclei != entry.syllable_count:
        logger.warning(
            "word %s: stored syllable_count=%d but %d vowel nuclei found",
            entry.word_id,
            entry.syllable_count,
            nuclei,
        )
        return False
    return True
