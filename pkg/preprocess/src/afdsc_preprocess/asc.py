"""Convert char-span aspect annotations into token-span query lines.

Input reviews carry gold aspects as character ranges; a review with several
aspects becomes several query lines, one per aspect, each holding the full
tokenization plus the token span that covers the aspect's characters.
"""

from __future__ import annotations

import json
import logging
from typing import Iterable, Iterator, Optional

from .emit import LexiconFiles, RawReview, header_line
from .tagger import Tagger, default_tagger

log = logging.getLogger(__name__)

_POLARITY_ALIASES = {
    "pos": "POS", "positive": "POS", "POS": "POS",
    "neg": "NEG", "negative": "NEG", "NEG": "NEG",
    "neu": "NEU", "neutral": "NEU", "NEU": "NEU",
}


def char_span_to_token_span(
    offsets: list[tuple[int, int]], start: int, end: int
) -> Optional[tuple[int, int]]:
    """Smallest token range overlapping [start, end); None when nothing does."""
    first = last = None
    for i, (tok_start, tok_end) in enumerate(offsets):
        if tok_end > start and tok_start < end:
            if first is None:
                first = i
            last = i
    if first is None:
        return None
    return first, last + 1


def convert_review(
    review: RawReview, lexicon: LexiconFiles, tagger: Optional[Tagger] = None
) -> Iterator[dict]:
    """One query line per gold aspect of the review."""
    tagger = tagger or default_tagger()
    tagged = tagger.tag(review.text)
    if not tagged:
        log.warning("skipping untaggable review %s", review.review_id or "<unnamed>")
        return
    offsets = [(t.start, t.end) for t in tagged]
    base = {
        "tokens": [t.text for t in tagged],
        "pos": [t.tag for t in tagged],
        "lex": [lexicon.polarity_of(t.text) for t in tagged],
    }
    for aspect in review.aspects:
        polarity = _POLARITY_ALIASES.get(aspect.polarity)
        if polarity is None:
            log.warning(
                "skipping aspect with unknown polarity %r in review %s",
                aspect.polarity, review.review_id or "<unnamed>",
            )
            continue
        span = char_span_to_token_span(offsets, aspect.start, aspect.end)
        if span is None:
            log.warning(
                "skipping aspect at chars [%d, %d) outside tokenization of review %s",
                aspect.start, aspect.end, review.review_id or "<unnamed>",
            )
            continue
        if aspect.term is not None:
            covered = review.text[aspect.start : aspect.end]
            if covered.strip().lower() != aspect.term.strip().lower():
                log.warning(
                    "aspect term %r does not match chars %r in review %s",
                    aspect.term, covered, review.review_id or "<unnamed>",
                )
        yield {**base, "span": list(span), "polarity": polarity}


def convert_reviews(
    reviews: Iterable[RawReview], lexicon: LexiconFiles, tagger: Optional[Tagger] = None
) -> Iterator[dict]:
    tagger = tagger or default_tagger()
    for review in reviews:
        yield from convert_review(review, lexicon, tagger)


def write_query_jsonl(
    records: Iterable[dict], path, tagger: Tagger, lexicon: LexiconFiles
) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(json.dumps(header_line(tagger, lexicon), ensure_ascii=False) + "\n")
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
            count += 1
    return count
