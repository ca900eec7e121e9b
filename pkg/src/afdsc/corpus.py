"""Document data model, JSONL ingestion, aspect masks, lexicon, vocabulary.

Corpus line schema (one JSON object per line, UTF-8):

    {"tokens": [str...], "pos": [str...], "rating": int,
     "lex": [null|"P"|"N", ...]?, "aspect_mask": [0|1, ...]?}

Aspect-query line schema:

    {"tokens": [str...], "pos": [str...], "span": [start, end],
     "polarity": "POS"|"NEG"|"NEU"}

A leading line whose object contains a "header" key is producer metadata and
is skipped by both loaders.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import CorpusFormatError, CorpusValidationError

log = logging.getLogger(__name__)

# Reserved vocabulary entries, always occupying the first ids.
PAD, UNK, MASK, CLS = "[PAD]", "[UNK]", "[MASK]", "[CLS]"
RESERVED = (PAD, UNK, MASK, CLS)
PAD_ID, UNK_ID, MASK_ID, CLS_ID = range(4)

# POS tag assigned to the prepended classifier token; never an aspect tag.
CLS_TAG = "CLS"

DEFAULT_NOUN_TAGS = frozenset({"NOUN", "PROPN"})

POSITIVE, NEGATIVE = "P", "N"

POLARITIES = ("NEG", "NEU", "POS")


@dataclass(frozen=True)
class AspectRuleConfig:
    """POS tags whose tokens count as potential aspects."""

    noun_tags: frozenset[str] = DEFAULT_NOUN_TAGS

    def __post_init__(self):
        if not self.noun_tags:
            raise CorpusValidationError("noun_tags must be non-empty")
        object.__setattr__(self, "noun_tags", frozenset(self.noun_tags))


@dataclass(frozen=True)
class Token:
    surface: str
    pos: str
    vocab_id: int = UNK_ID
    aspect_mask: int = 0
    lex_flag: int = 0
    lex_polarity: Optional[str] = None

    def __post_init__(self):
        if self.vocab_id < 0:
            raise CorpusValidationError(f"vocab_id must be non-negative: {self.vocab_id}")
        if self.aspect_mask not in (0, 1) or self.lex_flag not in (0, 1):
            raise CorpusValidationError("aspect_mask and lex_flag must be 0 or 1")
        if (self.lex_polarity is not None) != (self.lex_flag == 1):
            raise CorpusValidationError("lex_polarity present iff lex_flag == 1")
        if self.lex_polarity not in (None, POSITIVE, NEGATIVE):
            raise CorpusValidationError(f"bad lexicon polarity: {self.lex_polarity!r}")


@dataclass(frozen=True)
class Document:
    """A token sequence with an optional 1..5 rating label.

    Training corpora carry ratings; aspect-query documents may omit them.
    """

    tokens: tuple[Token, ...]
    rating: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if len(self.tokens) == 0:
            raise CorpusValidationError("document must contain at least one token")
        if self.rating is not None and self.rating not in (1, 2, 3, 4, 5):
            raise CorpusValidationError(f"rating out of range 1..5: {self.rating}")

    def __len__(self):
        return len(self.tokens)

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def pos_tags(self) -> list[str]:
        return [t.pos for t in self.tokens]

    def vocab_ids(self) -> list[int]:
        return [t.vocab_id for t in self.tokens]

    def aspect_masks(self) -> list[int]:
        return [t.aspect_mask for t in self.tokens]


@dataclass(frozen=True)
class AspectQuery:
    """A document plus the half-open token span whose polarity is asked."""

    document: Document
    span: tuple[int, int]

    def __post_init__(self):
        start, end = self.span
        if not (0 <= start < end <= len(self.document)):
            raise CorpusValidationError(
                f"span {self.span} invalid for document of length {len(self.document)}"
            )


@dataclass(frozen=True)
class LabeledQuery:
    """An aspect query with its gold polarity and generator-side metadata."""

    query: AspectQuery
    gold: str
    doc_num_pos: int = 0
    doc_num_neg: int = 0

    def __post_init__(self):
        if self.gold not in POLARITIES:
            raise CorpusValidationError(f"bad gold polarity: {self.gold!r}")


@dataclass(frozen=True)
class Lexicon:
    """Positive/negative opinion word lists; conflicting entries are dropped."""

    positive: frozenset[str]
    negative: frozenset[str]

    def __post_init__(self):
        pos = frozenset(w.lower() for w in self.positive)
        neg = frozenset(w.lower() for w in self.negative)
        both = pos & neg
        if both:
            log.warning("dropping %d conflicting lexicon entries: %s", len(both), sorted(both))
            pos, neg = pos - both, neg - both
        object.__setattr__(self, "positive", pos)
        object.__setattr__(self, "negative", neg)

    @classmethod
    def from_files(cls, positive_path, negative_path) -> "Lexicon":
        """One word per line; blank lines and ';'-comments ignored."""

        def read(path):
            words = set()
            for line in Path(path).read_text(encoding="utf-8").splitlines():
                word = line.strip()
                if word and not word.startswith(";"):
                    words.add(word.lower())
            return words

        return cls(frozenset(read(positive_path)), frozenset(read(negative_path)))


@dataclass(frozen=True)
class Vocabulary:
    """Dense word->id map; ids 0..3 are reserved for PAD/UNK/MASK/CLS."""

    words: tuple[str, ...]
    index: dict[str, int] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if tuple(self.words[:4]) != RESERVED:
            raise CorpusValidationError("vocabulary must start with the reserved tokens")
        object.__setattr__(self, "index", {w: i for i, w in enumerate(self.words)})
        if len(self.index) != len(self.words):
            raise CorpusValidationError("vocabulary contains duplicate words")

    def __len__(self):
        return len(self.words)

    def id_of(self, word: str) -> int:
        return self.index.get(word, UNK_ID)

    def word_of(self, idx: int) -> str:
        return self.words[idx]

    @property
    def num_reserved(self) -> int:
        return len(RESERVED)


def compute_aspect_mask(pos: Sequence[str], rules: AspectRuleConfig = AspectRuleConfig()) -> list[int]:
    """1 for every position whose POS tag marks a potential aspect, else 0."""
    return [1 if tag in rules.noun_tags else 0 for tag in pos]


def annotate_lexicon(
    surfaces: Sequence[str], lex: Lexicon
) -> list[tuple[int, Optional[str]]]:
    """Per-surface (flag, polarity): (1,"P") / (1,"N") for lexicon hits, else (0, None)."""
    out = []
    for word in surfaces:
        lowered = word.lower()
        if lowered in lex.positive:
            out.append((1, POSITIVE))
        elif lowered in lex.negative:
            out.append((1, NEGATIVE))
        else:
            out.append((0, None))
    return out


def _document_from_record(
    rec: dict,
    rules: AspectRuleConfig,
    lexicon: Optional[Lexicon],
    require_rating: bool,
) -> Document:
    tokens = rec["tokens"]
    pos = rec["pos"]
    if not isinstance(tokens, list) or not isinstance(pos, list):
        raise ValueError("'tokens' and 'pos' must be arrays")
    if len(tokens) != len(pos):
        raise ValueError(f"tokens/pos length mismatch: {len(tokens)} vs {len(pos)}")

    mask = rec.get("aspect_mask")
    if mask is None:
        mask = compute_aspect_mask(pos, rules)
    elif len(mask) != len(tokens):
        raise ValueError("aspect_mask length mismatch")

    lex = rec.get("lex")
    if lex is None:
        if lexicon is not None:
            lex = [p for _, p in annotate_lexicon(tokens, lexicon)]
        else:
            lex = [None] * len(tokens)
    elif len(lex) != len(tokens):
        raise ValueError("lex length mismatch")

    rating = rec.get("rating")
    if require_rating and rating is None:
        raise ValueError("missing 'rating'")

    toks = tuple(
        Token(
            surface=str(s),
            pos=str(p),
            aspect_mask=int(m),
            lex_flag=0 if polarity is None else 1,
            lex_polarity=polarity,
        )
        for s, p, m, polarity in zip(tokens, pos, mask, lex)
    )
    return Document(tokens=toks, rating=rating)


def _iter_jsonl(path):
    """Yield (line_no, record) for every data line, skipping a header object."""
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(path, line_no, f"invalid JSON: {exc}") from exc
            if not isinstance(rec, dict):
                raise CorpusFormatError(path, line_no, "line is not a JSON object")
            if "header" in rec:
                continue
            yield line_no, rec


def load_corpus(
    path,
    rules: AspectRuleConfig = AspectRuleConfig(),
    lexicon: Optional[Lexicon] = None,
    require_rating: bool = True,
) -> list[Document]:
    """Load a rated-document JSONL corpus, recomputing masks/lex flags when absent."""
    docs = []
    for line_no, rec in _iter_jsonl(path):
        try:
            docs.append(_document_from_record(rec, rules, lexicon, require_rating))
        except CorpusValidationError as exc:
            raise CorpusValidationError(f"{path}:{line_no}: {exc}") from exc
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusFormatError(path, line_no, str(exc)) from exc
    return docs


def write_corpus(docs: Iterable[Document], path) -> None:
    """Inverse of load_corpus: one schema line per document."""
    with open(path, "w", encoding="utf-8") as handle:
        for doc in docs:
            rec = {
                "tokens": doc.surfaces(),
                "pos": doc.pos_tags(),
                "rating": doc.rating,
                "lex": [t.lex_polarity for t in doc.tokens],
                "aspect_mask": doc.aspect_masks(),
            }
            handle.write(json.dumps(rec, ensure_ascii=False) + "\n")


def load_queries(
    path,
    rules: AspectRuleConfig = AspectRuleConfig(),
    lexicon: Optional[Lexicon] = None,
    require_gold: bool = True,
) -> list[LabeledQuery]:
    """Load an aspect-query JSONL file; gold polarity optional for prediction inputs."""
    queries = []
    for line_no, rec in _iter_jsonl(path):
        try:
            doc = _document_from_record(rec, rules, lexicon, require_rating=False)
            span = rec["span"]
            if len(span) != 2:
                raise ValueError("'span' must be [start, end]")
            gold = rec.get("polarity")
            if require_gold and gold is None:
                raise ValueError("missing 'polarity'")
            queries.append(
                LabeledQuery(
                    query=AspectQuery(document=doc, span=(int(span[0]), int(span[1]))),
                    gold=gold if gold is not None else "NEU",
                    doc_num_pos=int(rec.get("doc_num_pos", 0)),
                    doc_num_neg=int(rec.get("doc_num_neg", 0)),
                )
            )
        except CorpusValidationError as exc:
            raise CorpusValidationError(f"{path}:{line_no}: {exc}") from exc
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusFormatError(path, line_no, str(exc)) from exc
    return queries


def write_queries(queries: Iterable[LabeledQuery], path, include_gold: bool = True) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for lq in queries:
            rec = {
                "tokens": lq.query.document.surfaces(),
                "pos": lq.query.document.pos_tags(),
                "span": list(lq.query.span),
            }
            if include_gold:
                rec["polarity"] = lq.gold
                rec["doc_num_pos"] = lq.doc_num_pos
                rec["doc_num_neg"] = lq.doc_num_neg
            handle.write(json.dumps(rec, ensure_ascii=False) + "\n")


def build_vocab(docs: Iterable[Document], min_count: int = 1) -> Vocabulary:
    """Frequency-then-lexicographic vocabulary over surfaces, reserved ids first."""
    if min_count < 1:
        raise CorpusValidationError(f"min_count must be >= 1: {min_count}")
    counts = Counter()
    for doc in docs:
        counts.update(doc.surfaces())
    kept = [w for w, c in counts.items() if c >= min_count and w not in RESERVED]
    kept.sort(key=lambda w: (-counts[w], w))
    return Vocabulary(words=RESERVED + tuple(kept))


def index_documents(docs: Sequence[Document], vocab: Vocabulary) -> list[Document]:
    """Return copies of docs with vocab ids assigned from `vocab` (UNK for misses)."""
    out = []
    for doc in docs:
        toks = tuple(replace(t, vocab_id=vocab.id_of(t.surface)) for t in doc.tokens)
        out.append(replace(doc, tokens=toks))
    return out
