"""Uniform access to text and image generation providers.

Prompt templates are versioned files under ``<config_dir>/prompts/<profile>/``,
one per pipeline step. Every call renders deterministically, parses the raw
output against the template's contract (JSON arrays are extracted by bracket
matching so chatty providers still parse), validates cardinality and length
rules, and retries the same prompt on validation failure. No unvalidated
payload ever leaves this module.
"""

from __future__ import annotations

import json
import re
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping, Protocol

from .errors import (
    ConfigError,
    FormatError,
    MissingVariable,
    ProviderError,
    UnknownTemplate,
)
from .profiles import LanguageProfile

TEMPLATE_IDS = (
    "keyword_gen",
    "keyword_review",
    "semantic_assoc",
    "assoc_hints",
    "imagery_recommender",
    "scene_relation",
    "image_compose",
)

OUTPUT_CONTRACTS = (
    "json_array_of_objects",
    "json_array_of_strings",
    "plain_text",
    "image",
)

DEFAULT_TEMPERATURES = {"keyword_gen": 1.0, "keyword_review": 0.3}
FALLBACK_TEMPERATURE = 0.7

CONSTRAINT_MARKER = "-- Mandatory Constraints --"

_PLACEHOLDER_RE = re.compile(r"\{([a-z][a-z0-9_]*)\}")


@dataclass(frozen=True)
class GenerationParams:
    temperature: float
    max_retries: int = 1
    timeout_ms: int = 30000

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ConfigError("temperature must be >= 0")


@dataclass
class ProviderConfig:
    """Connection settings; the credential is an environment variable name,
    resolved at call time and never serialized."""

    base_url: str = ""
    credential_env: str = "WORDCRAFT_PROVIDER_KEY"
    text_model_id: str = ""
    image_model_id: str = ""
    profile: str = "zh-en"
    max_image_prompt_chars: int = 8000

    def to_dict(self) -> dict:
        return {
            "base_url": self.base_url,
            "credential_env": self.credential_env,
            "text_model_id": self.text_model_id,
            "image_model_id": self.image_model_id,
            "profile": self.profile,
            "max_image_prompt_chars": self.max_image_prompt_chars,
        }


@dataclass(frozen=True)
class PromptTemplate:
    template_id: str
    version: int
    body: str
    variables: tuple[str, ...]
    output_contract: str

    def render(self, variables: Mapping[str, Any]) -> str:
        rendered = self.body
        for name in self.variables:
            if name not in variables:
                raise MissingVariable(
                    f"template {self.template_id!r} requires variable {name!r}"
                )
            rendered = rendered.replace("{" + name + "}", _format_value(variables[name]))
        return rendered


def _format_value(value: Any) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (list, tuple, dict)):
        return json.dumps(value, ensure_ascii=False)
    return str(value)


def parse_template_file(text: str, path: str = "<memory>") -> PromptTemplate:
    """Parse a template file: a small header, ``---``, then the body."""
    if "\n---\n" not in text:
        raise ConfigError(f"{path}: missing '---' header separator")
    header_text, body = text.split("\n---\n", 1)
    header: dict[str, str] = {}
    for line in header_text.splitlines():
        line = line.strip()
        if not line:
            continue
        key, _, value = line.partition(":")
        header[key.strip()] = value.strip()
    try:
        template_id = header["template_id"]
        version = int(header["version"])
        output_contract = header["output"]
        declared = tuple(
            v.strip() for v in header["variables"].split(",") if v.strip()
        )
    except KeyError as exc:
        raise ConfigError(f"{path}: missing header field {exc}") from None
    if output_contract not in OUTPUT_CONTRACTS:
        raise ConfigError(f"{path}: unknown output contract {output_contract!r}")
    found = tuple(sorted(set(_PLACEHOLDER_RE.findall(body))))
    if found != tuple(sorted(set(declared))):
        raise ConfigError(
            f"{path}: declared variables {sorted(declared)} do not match "
            f"placeholders {sorted(found)}"
        )
    return PromptTemplate(
        template_id=template_id,
        version=version,
        body=body,
        variables=declared,
        output_contract=output_contract,
    )


def default_config_dir() -> Path:
    return Path(__file__).resolve().parent


class TemplateSet:
    """All templates for one language profile."""

    def __init__(self, templates: dict[str, PromptTemplate]) -> None:
        self._templates = templates

    @classmethod
    def load(cls, config_dir: Path | str, profile_id: str) -> "TemplateSet":
        root = Path(config_dir) / "prompts" / profile_id
        if not root.is_dir():
            raise ConfigError(f"no prompt directory for profile {profile_id!r}: {root}")
        templates: dict[str, PromptTemplate] = {}
        for template_id in TEMPLATE_IDS:
            path = root / f"{template_id}.txt"
            if not path.is_file():
                raise ConfigError(f"missing template file: {path}")
            template = parse_template_file(path.read_text(encoding="utf-8"), str(path))
            if template.template_id != template_id:
                raise ConfigError(
                    f"{path}: header names {template.template_id!r}, expected {template_id!r}"
                )
            templates[template_id] = template
        return cls(templates)

    def get(self, template_id: str) -> PromptTemplate:
        try:
            return self._templates[template_id]
        except KeyError:
            raise UnknownTemplate(f"unknown template {template_id!r}") from None

    def constraint_block(self, template_id: str) -> str:
        body = self.get(template_id).body
        marker = body.find(CONSTRAINT_MARKER)
        return body[marker:].strip() if marker >= 0 else ""


# -- providers --------------------------------------------------------------------------


class Provider(Protocol):
    def complete(self, messages: list[dict], params: GenerationParams, tag: str) -> str: ...

    def generate_image(self, prompt: str, tag: str) -> bytes: ...


@dataclass
class ImageResult:
    data: bytes
    width: int
    height: int


def png_dimensions(data: bytes) -> tuple[int, int]:
    if len(data) >= 24 and data[:8] == b"\x89PNG\r\n\x1a\n":
        width, height = struct.unpack(">II", data[16:24])
        return width, height
    return 0, 0


# -- output parsing ------------------------------------------------------------------------


def extract_json_array(text: str) -> list:
    """Locate and parse the first well-formed JSON array in free-form text."""
    for start, ch in enumerate(text):
        if ch != "[":
            continue
        depth = 0
        in_string = False
        escaped = False
        for end in range(start, len(text)):
            c = text[end]
            if in_string:
                if escaped:
                    escaped = False
                elif c == "\\":
                    escaped = True
                elif c == '"':
                    in_string = False
                continue
            if c == '"':
                in_string = True
            elif c in "[{":
                depth += 1
            elif c in "]}":
                depth -= 1
                if depth == 0:
                    try:
                        parsed = json.loads(text[start:end + 1])
                    except json.JSONDecodeError:
                        break
                    if isinstance(parsed, list):
                        return parsed
                    break
    raise ValueError("no JSON array found in provider output")


def _string_items(payload: list) -> list[str]:
    items: list[str] = []
    for raw in payload:
        if not isinstance(raw, str):
            continue
        text = raw.strip()
        if text and text not in items:
            items.append(text)
    return items


def _object_items(payload: list, required: tuple[str, ...]) -> list[dict]:
    items: list[dict] = []
    for raw in payload:
        if not isinstance(raw, dict):
            continue
        cleaned = {}
        ok = True
        for key in required:
            value = raw.get(key)
            if not isinstance(value, str) or not value.strip():
                ok = False
                break
            cleaned[key] = value.strip()
        if ok:
            for key, value in raw.items():
                if key not in cleaned and isinstance(value, str):
                    cleaned[key] = value.strip()
            items.append(cleaned)
    return items


def _validate_keyword_gen(payload: list, profile: LanguageProfile) -> list[dict]:
    items = _object_items(payload, ("keyword", "explanation"))
    if len(items) < 10:
        raise ValueError(f"only {len(items)} parseable candidates, need at least 10")
    return items[:20]


def _validate_keyword_review(payload: list, profile: LanguageProfile) -> list[dict]:
    items = _object_items(payload, ("keyword", "explanation", "reasoning"))
    if len(items) != 4 or len(payload) != 4:
        raise ValueError(f"reviewer must return exactly 4 keywords, got {len(payload)}")
    seen = set()
    for item in items:
        if item["keyword"] in seen:
            raise ValueError(f"duplicate keyword in review output: {item['keyword']!r}")
        seen.add(item["keyword"])
    return items


def _validate_semantic_assoc(payload: list, profile: LanguageProfile) -> list[dict]:
    coerced = [{"concept": item} if isinstance(item, str) else item for item in payload]
    items = _object_items(coerced, ("concept",))
    valid = []
    seen = set()
    for item in items:
        size = profile.measure(item["concept"])
        if 1 <= size <= profile.semantic_concept_max and item["concept"] not in seen:
            seen.add(item["concept"])
            valid.append(item)
    if not valid:
        raise ValueError("no concept within the profile length bound")
    return valid


def _validate_assoc_hints(payload: list, profile: LanguageProfile) -> list[str]:
    items = _string_items(payload)
    if not 3 <= len(items) <= 5:
        raise ValueError(f"need 3-5 hint sentences, got {len(items)}")
    return items


def _validate_imagery(payload: list, profile: LanguageProfile) -> list[str]:
    items = [
        s for s in _string_items(payload)
        if profile.visual_min <= profile.measure(s) <= profile.visual_max
    ]
    if not items:
        raise ValueError("no visual element within the profile length band")
    return items


def _validate_scene_relation(payload: list, profile: LanguageProfile) -> list[str]:
    items = [
        s for s in _string_items(payload)
        if profile.relation_min <= profile.measure(s) <= profile.relation_max
    ]
    if not items:
        raise ValueError("no relation sentence within the profile length band")
    return items


VALIDATORS: dict[str, Callable[[list, LanguageProfile], Any]] = {
    "keyword_gen": _validate_keyword_gen,
    "keyword_review": _validate_keyword_review,
    "semantic_assoc": _validate_semantic_assoc,
    "assoc_hints": _validate_assoc_hints,
    "imagery_recommender": _validate_imagery,
    "scene_relation": _validate_scene_relation,
}


# -- the gateway -------------------------------------------------------------------------------


@dataclass
class Gateway:
    provider: Provider
    templates: TemplateSet
    profile: LanguageProfile
    config: ProviderConfig = field(default_factory=ProviderConfig)
    temperatures: dict[str, float] = field(default_factory=dict)
    extra_styles: dict[str, str] = field(default_factory=dict)

    def default_params(self, template_id: str) -> GenerationParams:
        temperature = self.temperatures.get(
            template_id,
            DEFAULT_TEMPERATURES.get(template_id, FALLBACK_TEMPERATURE),
        )
        return GenerationParams(temperature=temperature)

    def render(self, template_id: str, variables: Mapping[str, Any]) -> list[dict]:
        """Render a template into its message sequence; pure and deterministic."""
        template = self.templates.get(template_id)
        return [{"role": "system", "content": template.render(variables)}]

    def render_text(self, template_id: str, variables: Mapping[str, Any]) -> str:
        return self.templates.get(template_id).render(variables)

    def constraint_block(self, template_id: str) -> str:
        return self.templates.constraint_block(template_id)

    def call_text(
        self,
        template_id: str,
        variables: Mapping[str, Any],
        params: GenerationParams | None = None,
        extra_check: Callable[[Any], None] | None = None,
    ) -> Any:
        """Call the provider and return a fully validated payload.

        Validation failures re-call with the same prompt and parameters up to
        ``max_retries`` times; transport errors propagate immediately.
        """
        template = self.templates.get(template_id)
        if template.output_contract == "image":
            raise UnknownTemplate(f"{template_id!r} is an image template")
        params = params or self.default_params(template_id)
        messages = self.render(template_id, variables)
        validator = VALIDATORS.get(template_id)
        last_reason = "unknown"
        for _attempt in range(params.max_retries + 1):
            raw = self.provider.complete(messages, params, tag=template_id)
            try:
                if template.output_contract == "plain_text":
                    payload: Any = raw.strip()
                    if not payload:
                        raise ValueError("empty output")
                else:
                    payload = extract_json_array(raw)
                    if validator is not None:
                        payload = validator(payload, self.profile)
                if extra_check is not None:
                    extra_check(payload)
            except ValueError as exc:
                last_reason = str(exc)
                continue
            return payload
        raise FormatError(
            f"{template_id}: {last_reason}",
            template_id=template_id,
            attempts=params.max_retries + 1,
        )

    def call_image(self, prompt: str, tag: str = "image_compose") -> ImageResult:
        """Send an image prompt and return the encoded bytes with dimensions."""
        limit = self.config.max_image_prompt_chars
        if len(prompt) > limit:
            raise ProviderError(
                f"image prompt exceeds provider limit: {len(prompt)} > {limit} chars",
                prompt_chars=len(prompt),
                limit=limit,
            )
        data = self.provider.generate_image(prompt, tag=tag)
        width, height = png_dimensions(data)
        return ImageResult(data=data, width=width, height=height)
