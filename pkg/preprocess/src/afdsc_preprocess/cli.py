"""CLI: `tag` emits the rated-corpus contract, `convert-asc` emits query lines."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .asc import convert_reviews, write_query_jsonl
from .emit import LexiconFiles, process_reviews, write_jsonl
from .lexicon_data import builtin_lexicon_files
from .readers import read_reviews
from .tagger import default_tagger


def _lexicon_from_args(args) -> LexiconFiles:
    if args.positive_lexicon or args.negative_lexicon:
        if not (args.positive_lexicon and args.negative_lexicon):
            raise ValueError("pass both --positive-lexicon and --negative-lexicon, or neither")
        return LexiconFiles.load(args.positive_lexicon, args.negative_lexicon)
    return builtin_lexicon_files()


def _cmd_tag(args) -> int:
    tagger = default_tagger()
    lexicon = _lexicon_from_args(args)
    reviews = read_reviews(args.input)
    count = write_jsonl(process_reviews(reviews, lexicon, tagger), args.out, tagger, lexicon)
    print(f"wrote {count} corpus lines to {args.out}")
    return 0


def _cmd_convert_asc(args) -> int:
    tagger = default_tagger()
    lexicon = _lexicon_from_args(args)
    reviews = read_reviews(args.input)
    count = write_query_jsonl(convert_reviews(reviews, lexicon, tagger), args.out, tagger, lexicon)
    print(f"wrote {count} query lines to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="afdsc-preprocess",
        description="POS-tag and lexicon-annotate raw reviews into training/evaluation JSONL",
    )
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tag", help="raw rated reviews -> corpus JSONL")
    p.add_argument("--input", required=True, help="JSONL ({'text','rating'}) or CSV (text,rating)")
    p.add_argument("--out", required=True)
    p.add_argument("--positive-lexicon", type=Path)
    p.add_argument("--negative-lexicon", type=Path)
    p.set_defaults(func=_cmd_tag)

    p = sub.add_parser("convert-asc", help="char-span aspect annotations -> query JSONL")
    p.add_argument("--input", required=True,
                   help="JSONL with 'text' and 'aspects':[{'from','to','polarity','term'?}]")
    p.add_argument("--out", required=True)
    p.add_argument("--positive-lexicon", type=Path)
    p.add_argument("--negative-lexicon", type=Path)
    p.set_defaults(func=_cmd_convert_asc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
