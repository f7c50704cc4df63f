"""Drive the bundled labyrinth walkthrough against an in-process server.

Boots the app with the scripted mock provider, replays the whole flow
(segments, tree, keyword cards, map edits, canvas, image, card), and prints
the resulting word card.

    python scripts/run_walkthrough.py [--data-dir PATH]
"""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from scenario_driver import drive_walkthrough  # noqa: E402

from wordcraft.api import build_app  # noqa: E402
from wordcraft.config import AppConfig  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data-dir", default=None, help="where to write session data")
    args = parser.parse_args()

    data_dir = args.data_dir or tempfile.mkdtemp(prefix="wordcraft-demo-")
    app = build_app(AppConfig(data_dir=data_dir, mock_provider=True))
    client = TestClient(app)

    session_id, card, hints = drive_walkthrough(client)
    print(f"session: {session_id}")
    print(f"hints offered: {json.dumps(hints, ensure_ascii=False, indent=2)}")
    print("recorded card:")
    print(json.dumps(card, ensure_ascii=False, indent=2))
    print(f"\ndata dir: {data_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
