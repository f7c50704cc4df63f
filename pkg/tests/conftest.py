from __future__ import annotations

import json
from pathlib import Path

import pytest

from wordcraft.gateway import Gateway, TemplateSet, default_config_dir
from wordcraft.lexicon import Lexicon, load_lexicon
from wordcraft.profiles import get_profile
from wordcraft.providers import MockProvider
from wordcraft.session import LearningSession, create_session

DATA_DIR = Path(__file__).parent / "data"
FIXTURES_DIR = default_config_dir() / "fixtures"


@pytest.fixture(scope="session")
def zh_profile():
    return get_profile("zh-en")


@pytest.fixture(scope="session")
def en_profile():
    return get_profile("en")


@pytest.fixture(scope="session")
def demo_lexicon(zh_profile) -> Lexicon:
    return load_lexicon(FIXTURES_DIR / "demo_lexicon.jsonl", zh_profile)


@pytest.fixture(scope="session")
def zh_templates() -> TemplateSet:
    return TemplateSet.load(default_config_dir(), "zh-en")


@pytest.fixture(scope="session")
def en_templates() -> TemplateSet:
    return TemplateSet.load(default_config_dir(), "en")


@pytest.fixture
def make_gateway(zh_templates, zh_profile):
    """Gateway factory bound to a fresh scripted mock provider."""

    def factory(script, profile=None, templates=None, **kwargs):
        mock = MockProvider(script)
        gateway = Gateway(
            provider=mock,
            templates=templates or zh_templates,
            profile=profile or zh_profile,
            **kwargs,
        )
        return gateway, mock

    return factory


@pytest.fixture
def labyrinth_session(demo_lexicon) -> LearningSession:
    return create_session(demo_lexicon, "labyrinth", "maze", session_id="s-test", at=0)


def scenario_script() -> list[dict]:
    with open(FIXTURES_DIR / "scenario_script.json", encoding="utf-8") as fh:
        return json.load(fh)["fixtures"]


def stage1_candidates(n: int = 20, prefix: str = "词") -> list[dict]:
    """Synthesize a parseable stage-one candidate list."""
    return [{"keyword": f"{prefix}{i}", "explanation": f"解释{i}"} for i in range(n)]


def stage2_cards(keywords: list[str]) -> list[dict]:
    return [
        {"keyword": k, "explanation": f"gloss {k}", "reasoning": f"sounds like {k}"}
        for k in keywords
    ]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = []
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            if getattr(report, "when", None) != "call":
                continue
            if "test_acceptance" not in report.nodeid:
                continue
            name = report.nodeid.split("::")[-1]
            rows.append((name, "PASS" if status == "passed" else "FAIL"))
    if rows:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, verdict in rows:
            terminalreporter.write_line(f"{verdict}: {name}")
