"""Four-way classification report for a lexicon file.

Splits every entry by imageability and syllable length and prints the
per-class counts plus each class's members.

    python scripts/classify_lexicon.py [LEXICON] [--imageability-cutoff N] [--syllable-cutoff N]
"""

from __future__ import annotations

import argparse
from collections import defaultdict

from wordcraft.gateway import default_config_dir
from wordcraft.lexicon import classify_word, load_lexicon


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "lexicon",
        nargs="?",
        default=str(default_config_dir() / "fixtures" / "demo_lexicon.jsonl"),
    )
    parser.add_argument("--imageability-cutoff", type=float, default=450.0)
    parser.add_argument("--syllable-cutoff", type=int, default=2)
    args = parser.parse_args()

    lexicon = load_lexicon(args.lexicon)
    buckets: dict[tuple[str, str], list[str]] = defaultdict(list)
    for entry in lexicon.entries:
        category = classify_word(entry, args.imageability_cutoff, args.syllable_cutoff)
        buckets[(category.imageability_class, category.length_class)].append(entry.surface)

    print(f"{len(lexicon)} entries, cutoffs: imageability {args.imageability_cutoff}, "
          f"syllables {args.syllable_cutoff}\n")
    for imageability in ("high", "low"):
        for length in ("short", "long"):
            words = buckets.get((imageability, length), [])
            print(f"{imageability}-imageability {length}: {len(words)}")
            for word in words:
                print(f"  {word}")
    return 0


if __name__ == "__main__":
    import sys

    sys.exit(main())
