"""Service error hierarchy with stable API codes.

Every error carries a ``code`` (stable string used on the wire) and an
``http_status`` so the API layer can map exceptions deterministically.
"""

from __future__ import annotations

from typing import Any


class WordcraftError(Exception):
    """Base class for all service errors."""

    code = "INTERNAL_ERROR"
    http_status = 500

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, "details": self.details}


# -- lexicon ----------------------------------------------------------------

class ParseError(WordcraftError):
    code = "PARSE_ERROR"
    http_status = 400

    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"line {line}: {reason}", line=line, reason=reason)


class DuplicateWordId(WordcraftError):
    code = "DUPLICATE_WORD_ID"
    http_status = 400


class MissingResponse(WordcraftError):
    code = "MISSING_RESPONSE"
    http_status = 422

    def __init__(self, word_id: str, participant: str) -> None:
        super().__init__(
            f"no response for word {word_id!r} from participant {participant!r}",
            word_id=word_id,
            participant=participant,
        )


class UnknownWord(WordcraftError):
    code = "UNKNOWN_WORD"
    http_status = 404


class UnknownSense(WordcraftError):
    code = "UNKNOWN_SENSE"
    http_status = 404


# -- sessions ---------------------------------------------------------------

class UnknownSession(WordcraftError):
    code = "UNKNOWN_SESSION"
    http_status = 404


class SessionClosed(WordcraftError):
    code = "SESSION_CLOSED"
    http_status = 409


class UnknownKeyword(WordcraftError):
    code = "UNKNOWN_KEYWORD"
    http_status = 404


# -- segments and the semantic tree ----------------------------------------

class RangeError(WordcraftError):
    code = "RANGE_ERROR"
    http_status = 422


class OverlapError(WordcraftError):
    code = "OVERLAP_ERROR"
    http_status = 422


class UnknownSegment(WordcraftError):
    code = "UNKNOWN_SEGMENT"
    http_status = 404


class UnknownAnchor(WordcraftError):
    code = "UNKNOWN_ANCHOR"
    http_status = 404


class UnknownSemanticNode(WordcraftError):
    code = "UNKNOWN_SEMANTIC_NODE"
    http_status = 404


class DepthExceeded(WordcraftError):
    code = "DEPTH_EXCEEDED"
    http_status = 422


class DuplicateConcept(WordcraftError):
    code = "DUPLICATE_CONCEPT"
    http_status = 409


class UnknownCard(WordcraftError):
    code = "UNKNOWN_CARD"
    http_status = 404


# -- association map ---------------------------------------------------------

class UnknownNode(WordcraftError):
    code = "UNKNOWN_NODE"
    http_status = 404


class SelfLink(WordcraftError):
    code = "SELF_LINK"
    http_status = 422


class UnknownLink(WordcraftError):
    code = "UNKNOWN_LINK"
    http_status = 404


class EmptyNote(WordcraftError):
    code = "EMPTY_NOTE"
    http_status = 422


# -- imagery canvas ----------------------------------------------------------

class BadBBox(WordcraftError):
    code = "BAD_BBOX"
    http_status = 422


class UnknownConceptTag(WordcraftError):
    code = "UNKNOWN_CONCEPT_TAG"
    http_status = 422


class UnknownElement(WordcraftError):
    code = "UNKNOWN_ELEMENT"
    http_status = 404


class SelfRelation(WordcraftError):
    code = "SELF_RELATION"
    http_status = 422


class UnknownRelation(WordcraftError):
    code = "UNKNOWN_RELATION"
    http_status = 404


class UnknownStyle(WordcraftError):
    code = "UNKNOWN_STYLE"
    http_status = 422


class RecallPathIncomplete(WordcraftError):
    code = "RECALL_PATH_INCOMPLETE"
    http_status = 409

    def __init__(self, missing_nodes: list[str], missing_links: list[list[str]]) -> None:
        super().__init__(
            "recall path is not fully activated",
            missing_nodes=missing_nodes,
            missing_links=missing_links,
        )


class NoImage(WordcraftError):
    code = "NO_IMAGE"
    http_status = 409


class UnknownJob(WordcraftError):
    code = "UNKNOWN_JOB"
    http_status = 404


class ImageJobPending(WordcraftError):
    code = "IMAGE_JOB_PENDING"
    http_status = 409


# -- generation gateway -------------------------------------------------------

class UnknownTemplate(WordcraftError):
    code = "UNKNOWN_TEMPLATE"
    http_status = 500


class MissingVariable(WordcraftError):
    code = "MISSING_VARIABLE"
    http_status = 500


class ProviderError(WordcraftError):
    code = "PROVIDER_ERROR"
    http_status = 502


class FormatError(WordcraftError):
    code = "FORMAT_ERROR"
    http_status = 502


class ProviderTimeout(WordcraftError):
    code = "TIMEOUT_ERROR"
    http_status = 504


class ContentPolicyRejection(WordcraftError):
    code = "CONTENT_POLICY_REJECTION"
    http_status = 422


class ScriptExhausted(WordcraftError):
    code = "SCRIPT_EXHAUSTED"
    http_status = 500


# -- configuration / generic --------------------------------------------------

class ConfigError(WordcraftError):
    code = "CONFIG_ERROR"
    http_status = 500


class PortInUse(WordcraftError):
    code = "PORT_IN_USE"
    http_status = 500


class ValidationError(WordcraftError):
    code = "VALIDATION_ERROR"
    http_status = 422


class NotFound(WordcraftError):
    code = "NOT_FOUND"
    http_status = 404


def _walk(cls: type) -> list[type]:
    out = []
    for sub in cls.__subclasses__():
        out.append(sub)
        out.extend(_walk(sub))
    return out


def error_registry() -> dict[str, int]:
    """Map every registered error code to its HTTP status."""
    registry = {WordcraftError.code: WordcraftError.http_status}
    for sub in _walk(WordcraftError):
        registry[sub.code] = sub.http_status
    return registry
