"""Token-masking policy for the masked-word objective.

Selection is POS-sensitive: nouns, proper nouns, adjectives, and adverbs are
picked at an elevated 30% rate (they carry the aspect/sentiment signal), all
other words at the standard 15%. Selected positions are then corrupted with
the usual 80/10/10 mask/random/keep split.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Document, MASK_ID, Vocabulary
from .errors import ConfigError

DEFAULT_BOOSTED_TAGS = frozenset({"NOUN", "PROPN", "ADJ", "ADV"})


@dataclass(frozen=True)
class MaskPolicy:
    boosted_tags: frozenset[str] = DEFAULT_BOOSTED_TAGS
    boosted_rate: float = 0.30
    base_rate: float = 0.15
    mask_prob: float = 0.8
    random_prob: float = 0.1
    keep_prob: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "boosted_tags", frozenset(self.boosted_tags))
        for name in ("boosted_rate", "base_rate"):
            rate = getattr(self, name)
            if not (0.0 <= rate <= 1.0):
                raise ConfigError(f"{name} must lie in [0, 1]: {rate}")
        split = (self.mask_prob, self.random_prob, self.keep_prob)
        if any(p < 0 for p in split) or abs(sum(split) - 1.0) > 1e-9:
            raise ConfigError(f"corruption split must be non-negative and sum to 1: {split}")


@dataclass(frozen=True)
class MaskedBatch:
    """Corruption result for one document's id sequence."""

    corrupted: np.ndarray  # int ids after corruption
    flags: np.ndarray      # bool, True where a position was selected
    originals: np.ndarray  # original id where flagged, -1 elsewhere

    def __post_init__(self):
        if not (self.corrupted.shape == self.flags.shape == self.originals.shape):
            raise ConfigError("masked batch arrays must share one shape")


def select_mask_positions(
    doc: Document, policy: MaskPolicy, rng: np.random.Generator
) -> np.ndarray:
    """Independent per-position selection at the POS-dependent rate."""
    rates = np.array(
        [policy.boosted_rate if t.pos in policy.boosted_tags else policy.base_rate
         for t in doc.tokens]
    )
    return rng.random(len(rates)) < rates


def corrupt(
    ids, flags: np.ndarray, rng: np.random.Generator, vocab: Vocabulary, policy: MaskPolicy = MaskPolicy()
) -> MaskedBatch:
    """Apply the mask/random/keep split at flagged positions.

    Random replacements are drawn uniformly from the non-reserved vocabulary;
    originals are recorded exactly where flagged.
    """
    ids = np.asarray(ids, dtype=int)
    flags = np.asarray(flags, dtype=bool)
    if ids.shape != flags.shape:
        raise ConfigError("ids/flags shape mismatch")
    n = ids.shape[0]
    draws = rng.random(n)
    num_words = len(vocab) - vocab.num_reserved
    if num_words > 0:
        randoms = rng.integers(vocab.num_reserved, len(vocab), size=n)
    else:
        randoms = ids  # degenerate vocabulary: nothing to substitute
    corrupted = ids.copy()
    to_mask = flags & (draws < policy.mask_prob)
    to_random = flags & ~to_mask & (draws < policy.mask_prob + policy.random_prob)
    corrupted[to_mask] = MASK_ID
    corrupted[to_random] = randoms[to_random]
    originals = np.where(flags, ids, -1)
    return MaskedBatch(corrupted=corrupted, flags=flags, originals=originals)
