"""Raw-review input readers: JSONL, or CSV with text/rating columns."""

from __future__ import annotations

import csv
import json
from typing import Iterator

from .emit import CharSpanAspect, RawReview


def _review_from_obj(obj: dict, line_no: int, path) -> RawReview:
    text = obj.get("text")
    if not isinstance(text, str) or not text.strip():
        raise ValueError(f"{path}:{line_no}: missing or empty 'text'")
    rating = obj.get("rating")
    aspects = tuple(
        CharSpanAspect(
            start=int(a["from"]),
            end=int(a["to"]),
            polarity=str(a["polarity"]),
            term=a.get("term"),
        )
        for a in obj.get("aspects", [])
    )
    return RawReview(
        text=text,
        rating=int(rating) if rating is not None else None,
        review_id=str(obj["id"]) if "id" in obj else str(line_no),
        aspects=aspects,
    )


def read_reviews_jsonl(path) -> Iterator[RawReview]:
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            if "header" in obj:
                continue
            yield _review_from_obj(obj, line_no, path)


def read_reviews_csv(path) -> Iterator[RawReview]:
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or "text" not in reader.fieldnames:
            raise ValueError(f"{path}: CSV needs a 'text' column")
        for line_no, row in enumerate(reader, start=2):
            text = (row.get("text") or "").strip()
            if not text:
                continue
            rating = row.get("rating")
            yield RawReview(
                text=text,
                rating=int(rating) if rating not in (None, "") else None,
                review_id=row.get("id") or str(line_no),
            )


def read_reviews(path) -> Iterator[RawReview]:
    if str(path).endswith(".csv"):
        return read_reviews_csv(path)
    return read_reviews_jsonl(path)
