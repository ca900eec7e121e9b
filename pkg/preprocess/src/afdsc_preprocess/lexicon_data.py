"""Bundled starter opinion lexicon.

A compact list for smoke runs and tests; production runs should point the
CLI at full opinion-word files instead.
"""

from __future__ import annotations

import hashlib

from .emit import LexiconFiles

POSITIVE_WORDS = (
    "amazing", "awesome", "brilliant", "clean", "delicious", "delightful",
    "excellent", "fantastic", "fast", "fresh", "friendly", "good", "great",
    "happy", "healthy", "lovely", "nice", "pleasant", "quick", "superb",
    "tasty", "top", "wonderful",
)
NEGATIVE_WORDS = (
    "awful", "bad", "bland", "dirty", "disappointing", "dreadful", "heedless",
    "horrible", "lousy", "mediocre", "nasty", "poor", "rude", "sad", "slow",
    "stale", "terrible", "unpleasant",
)


def _canonical(words: tuple[str, ...]) -> bytes:
    return ("\n".join(sorted(words)) + "\n").encode("utf-8")


def builtin_lexicon_files() -> LexiconFiles:
    return LexiconFiles(
        positive=frozenset(POSITIVE_WORDS),
        negative=frozenset(NEGATIVE_WORDS),
        positive_sha256=hashlib.sha256(_canonical(POSITIVE_WORDS)).hexdigest(),
        negative_sha256=hashlib.sha256(_canonical(NEGATIVE_WORDS)).hexdigest(),
    )


def write_builtin_lexicons(positive_path, negative_path) -> None:
    with open(positive_path, "wb") as handle:
        handle.write(_canonical(POSITIVE_WORDS))
    with open(negative_path, "wb") as handle:
        handle.write(_canonical(NEGATIVE_WORDS))
