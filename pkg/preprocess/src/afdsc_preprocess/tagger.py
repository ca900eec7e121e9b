"""Deterministic tokenizer and universal-POS tagger.

A small rule tagger (closed-class lexicons, suffix heuristics, idiom bigrams,
capitalization) standing in for an industrial pipeline: no model downloads,
bit-stable output, versioned so corpus headers can record provenance. The
downstream contract only sees universal tags, so a stronger tagger can be
swapped in behind the same interface.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Protocol

TAGGER_NAME = "builtin-rule-tagger"
TAGGER_VERSION = "1.0.0"

_TOKEN_RE = re.compile(r"[A-Za-z]+(?:'[A-Za-z]+)*|\d+(?:[.,]\d+)*|[^\sA-Za-z\d]")

_WORD_RE = re.compile(r"[A-Za-z]")

DETERMINERS = {
    "a", "an", "the", "this", "that", "these", "those", "some", "any", "no",
    "every", "each", "all", "both", "another", "such",
}
PRONOUNS = {
    "i", "me", "my", "mine", "we", "us", "our", "ours", "you", "your", "yours",
    "he", "him", "his", "she", "her", "hers", "it", "its", "they", "them",
    "their", "theirs", "who", "what", "which", "myself", "itself", "something",
    "anything", "nothing", "everything", "everyone", "nobody",
}
AUXILIARIES = {
    "is", "am", "are", "was", "were", "be", "been", "being", "do", "does",
    "did", "have", "has", "had", "will", "would", "can", "could", "shall",
    "should", "may", "might", "must", "isn't", "aren't", "wasn't", "weren't",
    "don't", "doesn't", "didn't", "can't", "couldn't", "won't", "wouldn't",
    "shouldn't", "haven't", "hasn't", "hadn't", "'s", "'re", "'m", "'ve", "'ll", "'d",
}
ADPOSITIONS = {
    "in", "on", "at", "of", "to", "with", "from", "by", "about", "for",
    "into", "over", "under", "between", "through", "during", "without",
    "within", "near", "after", "before", "against", "around", "behind",
}
COORDINATORS = {"and", "but", "or", "nor", "yet"}
SUBORDINATORS = {"if", "because", "while", "although", "though", "since", "unless", "whereas", "when"}
PARTICLES = {"not", "n't"}
ADVERBS = {
    "very", "really", "quite", "too", "so", "just", "only", "also", "even",
    "never", "always", "often", "sometimes", "again", "here", "there", "now",
    "then", "well", "still", "almost", "enough", "pretty", "rather", "however",
}
COMMON_VERBS = {
    "go", "went", "gone", "come", "came", "get", "got", "gotten", "make",
    "made", "take", "took", "eat", "ate", "eaten", "order", "ordered", "buy",
    "bought", "try", "tried", "love", "loved", "like", "liked", "hate",
    "hated", "recommend", "recommended", "return", "returned", "work",
    "worked", "works", "arrive", "arrived", "seem", "seemed", "feel", "felt",
    "think", "thought", "say", "said", "know", "knew", "want", "wanted",
    "use", "used", "visit", "visited", "serve", "served", "wait", "waited",
}
COMMON_ADJECTIVES = {
    "good", "great", "bad", "nice", "top", "fresh", "stale", "hot", "cold",
    "warm", "new", "old", "big", "small", "little", "large", "cheap",
    "expensive", "fast", "slow", "friendly", "rude", "clean", "dirty",
    "excellent", "amazing", "awful", "terrible", "horrible", "wonderful",
    "fantastic", "lovely", "pleasant", "unpleasant", "superb", "brilliant",
    "delightful", "poor", "mediocre", "lousy", "nasty", "dreadful",
    "disappointing", "tasty", "delicious", "bland", "quick", "healthy",
    "happy", "sad", "angry", "other", "same", "different", "fine", "ok", "okay",
}

# Multiword expressions whose parts would otherwise mis-tag; checked on
# lowercased adjacent pairs.
IDIOM_BIGRAMS = {
    ("top", "notch"): ("ADJ", "ADJ"),
}

_ADJ_SUFFIXES = ("less", "ful", "ous", "ive", "able", "ible", "ish", "ical", "ary")
_ADV_SUFFIX = "ly"
_VERB_SUFFIXES = ("ing", "ed")
_NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ity", "ship", "ism", "ist", "ers")


@dataclass(frozen=True)
class TaggedToken:
    text: str
    start: int  # character offset into the source text
    end: int
    tag: str


class Tagger(Protocol):
    name: str
    version: str

    def tag(self, text: str) -> list[TaggedToken]: ...


def tokenize(text: str) -> list[tuple[str, int, int]]:
    """Word/number/punctuation split with character offsets."""
    return [(m.group(0), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def _base_tag(word: str, lowered: str, sentence_initial: bool) -> str:
    if not _WORD_RE.search(word):
        return "NUM" if any(c.isdigit() for c in word) else "PUNCT"
    if any(c.isdigit() for c in word):
        return "NUM"
    if lowered in DETERMINERS:
        return "DET"
    if lowered in PRONOUNS:
        return "PRON"
    if lowered in AUXILIARIES:
        return "AUX"
    if lowered in ADPOSITIONS:
        return "ADP"
    if lowered in COORDINATORS:
        return "CCONJ"
    if lowered in SUBORDINATORS:
        return "SCONJ"
    if lowered in PARTICLES:
        return "PART"
    if lowered in ADVERBS:
        return "ADV"
    if lowered in COMMON_ADJECTIVES:
        return "ADJ"
    if lowered in COMMON_VERBS:
        return "VERB"
    if word[0].isupper() and not sentence_initial:
        return "PROPN"
    if lowered.endswith(_ADV_SUFFIX) and len(lowered) > 4:
        return "ADV"
    if lowered.endswith(_ADJ_SUFFIXES):
        return "ADJ"
    if lowered.endswith(_NOUN_SUFFIXES):
        return "NOUN"
    if lowered.endswith(_VERB_SUFFIXES) and len(lowered) > 4:
        return "VERB"
    return "NOUN"


class BuiltinTagger:
    """The default deterministic tagger."""

    name = TAGGER_NAME
    version = TAGGER_VERSION

    def tag(self, text: str) -> list[TaggedToken]:
        pieces = tokenize(text)
        tags: list[str] = []
        sentence_initial = True
        for word, _, _ in pieces:
            tags.append(_base_tag(word, word.lower(), sentence_initial))
            if _WORD_RE.search(word) or any(c.isdigit() for c in word):
                sentence_initial = False
            elif word in ".!?":
                sentence_initial = True
        for i in range(len(pieces) - 1):
            forced = IDIOM_BIGRAMS.get((pieces[i][0].lower(), pieces[i + 1][0].lower()))
            if forced is not None:
                tags[i], tags[i + 1] = forced
        return [
            TaggedToken(text=w, start=s, end=e, tag=t)
            for (w, s, e), t in zip(pieces, tags)
        ]


def default_tagger() -> BuiltinTagger:
    return BuiltinTagger()
