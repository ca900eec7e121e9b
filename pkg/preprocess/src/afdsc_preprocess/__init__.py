"""Raw-review preprocessing into the afdsc corpus contract."""

from .asc import char_span_to_token_span, convert_review, convert_reviews, write_query_jsonl
from .emit import (
    CharSpanAspect,
    LexiconFiles,
    RawReview,
    header_line,
    process_reviews,
    tag_and_align,
    write_jsonl,
)
from .lexicon_data import builtin_lexicon_files, write_builtin_lexicons
from .readers import read_reviews, read_reviews_csv, read_reviews_jsonl
from .tagger import BuiltinTagger, TaggedToken, default_tagger, tokenize

__version__ = "0.1.0"
