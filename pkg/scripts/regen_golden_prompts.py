"""Regenerate the frozen prompt renders under tests/data/golden/.

Run after intentionally editing a template, then review the diff:
    python scripts/regen_golden_prompts.py
"""

from __future__ import annotations

import sys
from pathlib import Path

from wordcraft.gateway import TemplateSet, default_config_dir

TESTS_DIR = Path(__file__).resolve().parent.parent / "tests"
GOLDEN_DIR = TESTS_DIR / "data" / "golden"

sys.path.insert(0, str(TESTS_DIR))
from golden_vars import GOLDEN_VARIABLES  # noqa: E402


def main() -> None:
    templates = TemplateSet.load(default_config_dir(), "zh-en")
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    for template_id, variables in GOLDEN_VARIABLES.items():
        rendered = templates.get(template_id).render(variables)
        path = GOLDEN_DIR / f"{template_id}.txt"
        path.write_text(rendered, encoding="utf-8")
        print(f"wrote {path} ({len(rendered)} chars)")


if __name__ == "__main__":
    main()
