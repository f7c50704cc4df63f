"""Command-line entry point: ``wordcraft --port 8080 --data-dir ./data``."""

from __future__ import annotations

import argparse
import sys

from .api import serve
from .config import AppConfig
from .errors import WordcraftError


def parse_args(argv: list[str] | None = None) -> AppConfig:
    parser = argparse.ArgumentParser(
        prog="wordcraft",
        description="Keyword-mnemonic vocabulary learning service",
    )
    parser.add_argument("--port", type=int, default=None, help="listen port (default 8080)")
    parser.add_argument("--host", default=None, help="bind address (default 127.0.0.1)")
    parser.add_argument("--data-dir", default=None, help="writable data directory")
    parser.add_argument("--config", default=None, help="JSON config file")
    parser.add_argument(
        "--mock-provider",
        action="store_true",
        help="use the scripted mock provider and deterministic clock/ids",
    )
    parser.add_argument(
        "--mock-script",
        default=None,
        help="fixture script for the mock provider (default: bundled walkthrough)",
    )
    parser.add_argument("--profile", default=None, help="language-pair profile id")
    parser.add_argument("--lexicon", default=None, help="newline-delimited JSON lexicon file")
    args = parser.parse_args(argv)
    return AppConfig.load(
        args.config,
        port=args.port,
        host=args.host,
        data_dir=args.data_dir,
        mock_provider=args.mock_provider or None,
        mock_script=args.mock_script,
        profile=args.profile,
        lexicon_path=args.lexicon,
    )


def main(argv: list[str] | None = None) -> int:
    try:
        config = parse_args(argv)
        serve(config)
    except WordcraftError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
