"""Service configuration.

Settings come from an optional JSON config file, overridden by CLI flags and
the ``WORDCRAFT_*`` environment variables. Mock-provider mode implies the
deterministic clock and sequential ids so scripted runs reproduce exactly.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .gateway import ProviderConfig, default_config_dir

ENV_PROVIDER_URL = "WORDCRAFT_PROVIDER_URL"
ENV_PROVIDER_KEY = "WORDCRAFT_PROVIDER_KEY"
ENV_MODEL_TEXT = "WORDCRAFT_MODEL_TEXT"
ENV_MODEL_IMAGE = "WORDCRAFT_MODEL_IMAGE"


@dataclass
class AppConfig:
    port: int = 8080
    host: str = "127.0.0.1"
    data_dir: str = "./data"
    config_dir: str | None = None  # template root; defaults to the packaged prompts
    profile: str = "zh-en"
    mock_provider: bool = False
    mock_script: str | None = None  # defaults to the bundled walkthrough script
    lexicon_path: str | None = None  # defaults to the bundled demo lexicon
    imageability_cutoff: float = 450.0
    syllable_cutoff: int = 2
    temperatures: dict[str, float] = field(default_factory=dict)
    extra_styles: dict[str, str] = field(default_factory=dict)
    image_workers: int = 2
    max_image_prompt_chars: int = 8000
    bearer_token_env: str | None = None  # reserved auth hook, unused in v1
    provider_base_url: str = ""
    provider_credential_env: str = ENV_PROVIDER_KEY
    text_model_id: str = ""
    image_model_id: str = ""

    def resolved_config_dir(self) -> Path:
        return Path(self.config_dir) if self.config_dir else default_config_dir()

    def resolved_lexicon_path(self) -> Path:
        if self.lexicon_path:
            return Path(self.lexicon_path)
        return default_config_dir() / "fixtures" / "demo_lexicon.jsonl"

    def resolved_mock_script(self) -> Path:
        if self.mock_script:
            return Path(self.mock_script)
        return default_config_dir() / "fixtures" / "scenario_script.json"

    def provider_config(self) -> ProviderConfig:
        return ProviderConfig(
            base_url=self.provider_base_url,
            credential_env=self.provider_credential_env,
            text_model_id=self.text_model_id,
            image_model_id=self.image_model_id,
            profile=self.profile,
            max_image_prompt_chars=self.max_image_prompt_chars,
        )

    @classmethod
    def load(cls, path: str | Path | None = None, **overrides) -> "AppConfig":
        values: dict = {}
        if path is not None:
            try:
                values = json.loads(Path(path).read_text(encoding="utf-8"))
            except FileNotFoundError:
                raise ConfigError(f"config file not found: {path}") from None
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config file is not valid JSON: {exc}") from None
            if not isinstance(values, dict):
                raise ConfigError("config file must hold a JSON object")
        env = {
            "provider_base_url": os.environ.get(ENV_PROVIDER_URL),
            "text_model_id": os.environ.get(ENV_MODEL_TEXT),
            "image_model_id": os.environ.get(ENV_MODEL_IMAGE),
        }
        values.update({k: v for k, v in env.items() if v})
        values.update({k: v for k, v in overrides.items() if v is not None})
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(values) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**values)
