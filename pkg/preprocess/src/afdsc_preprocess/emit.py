"""Turn raw reviews into the rated-corpus JSONL contract.

Each output line carries tokens, universal POS tags, the noun-rule aspect
mask, per-token lexicon polarity, the rating, and character offsets for
traceability. The first line of every file is a header object recording the
tagger name/version and the lexicon checksums, so downstream runs can verify
provenance; consumers skip any line whose object has a "header" key.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .tagger import Tagger, default_tagger

log = logging.getLogger(__name__)

NOUN_TAGS = frozenset({"NOUN", "PROPN"})


@dataclass(frozen=True)
class CharSpanAspect:
    """Gold aspect inside a raw review, addressed by character offsets."""

    start: int
    end: int
    polarity: str  # POS | NEG | NEU
    term: Optional[str] = None


@dataclass(frozen=True)
class RawReview:
    text: str
    rating: Optional[int] = None
    review_id: Optional[str] = None
    aspects: tuple[CharSpanAspect, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class LexiconFiles:
    """Opinion word lists: one lowercase word per line, ';' comments allowed."""

    positive: frozenset[str]
    negative: frozenset[str]
    positive_sha256: str
    negative_sha256: str

    @classmethod
    def load(cls, positive_path, negative_path) -> "LexiconFiles":
        def read(path):
            raw = Path(path).read_bytes()
            words = frozenset(
                line.strip().lower()
                for line in raw.decode("utf-8").splitlines()
                if line.strip() and not line.startswith(";")
            )
            return words, hashlib.sha256(raw).hexdigest()

        pos, pos_sha = read(positive_path)
        neg, neg_sha = read(negative_path)
        both = pos & neg
        if both:
            log.warning("dropping %d conflicting lexicon entries", len(both))
            pos, neg = pos - both, neg - both
        return cls(positive=pos, negative=neg, positive_sha256=pos_sha, negative_sha256=neg_sha)

    def polarity_of(self, word: str) -> Optional[str]:
        lowered = word.lower()
        if lowered in self.positive:
            return "P"
        if lowered in self.negative:
            return "N"
        return None


def header_line(tagger: Tagger, lexicon: LexiconFiles) -> dict:
    return {
        "header": {
            "tagger_name": tagger.name,
            "tagger_version": tagger.version,
            "positive_lexicon_sha256": lexicon.positive_sha256,
            "negative_lexicon_sha256": lexicon.negative_sha256,
        }
    }


def tag_and_align(
    review: RawReview, lexicon: LexiconFiles, tagger: Optional[Tagger] = None
) -> Optional[dict]:
    """One corpus record for one review; None when the text yields no tokens."""
    tagger = tagger or default_tagger()
    tagged = tagger.tag(review.text)
    if not tagged:
        log.warning("skipping untaggable review %s", review.review_id or "<unnamed>")
        return None
    if review.rating is not None and review.rating not in (1, 2, 3, 4, 5):
        raise ValueError(f"review {review.review_id or '<unnamed>'}: rating {review.rating} out of 1..5")
    record = {
        "tokens": [t.text for t in tagged],
        "pos": [t.tag for t in tagged],
        "rating": review.rating,
        "lex": [lexicon.polarity_of(t.text) for t in tagged],
        "aspect_mask": [1 if t.tag in NOUN_TAGS else 0 for t in tagged],
        "char_offsets": [[t.start, t.end] for t in tagged],
    }
    return record


def process_reviews(
    reviews: Iterable[RawReview], lexicon: LexiconFiles, tagger: Optional[Tagger] = None
) -> Iterator[dict]:
    tagger = tagger or default_tagger()
    for review in reviews:
        record = tag_and_align(review, lexicon, tagger)
        if record is not None:
            yield record


def write_jsonl(records: Iterable[dict], path, tagger: Tagger, lexicon: LexiconFiles) -> int:
    """Write header plus records; returns the number of data lines."""
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(json.dumps(header_line(tagger, lexicon), ensure_ascii=False) + "\n")
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
            count += 1
    return count
