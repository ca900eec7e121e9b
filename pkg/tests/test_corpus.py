import json

import pytest
from hypothesis import given, strategies as st

from afdsc.corpus import (
    AspectRuleConfig,
    Document,
    Lexicon,
    Token,
    RESERVED,
    annotate_lexicon,
    build_vocab,
    compute_aspect_mask,
    index_documents,
    load_corpus,
    load_queries,
    write_corpus,
)
from afdsc.errors import CorpusFormatError, CorpusValidationError


def make_doc(surfaces, pos, rating=3):
    toks = tuple(
        Token(surface=s, pos=p, aspect_mask=m)
        for s, p, m in zip(surfaces, pos, compute_aspect_mask(pos))
    )
    return Document(tokens=toks, rating=rating)


class TestAspectMask:
    def test_noun_aux_adj(self):
        assert compute_aspect_mask(["NOUN", "AUX", "ADJ"]) == [1, 0, 0]

    def test_empty(self):
        assert compute_aspect_mask([]) == []

    def test_all_proper_nouns(self):
        assert compute_aspect_mask(["PROPN", "PROPN"]) == [1, 1]

    def test_custom_rules(self):
        rules = AspectRuleConfig(noun_tags=frozenset({"VERB"}))
        assert compute_aspect_mask(["VERB", "NOUN"], rules) == [1, 0]

    def test_empty_rules_rejected(self):
        with pytest.raises(CorpusValidationError):
            AspectRuleConfig(noun_tags=frozenset())

    @given(st.lists(st.sampled_from(["NOUN", "PROPN", "ADJ", "ADV", "VERB", "DET"])))
    def test_length_and_membership(self, tags):
        rules = AspectRuleConfig()
        mask = compute_aspect_mask(tags, rules)
        assert len(mask) == len(tags)
        for tag, bit in zip(tags, mask):
            assert bit == (1 if tag in rules.noun_tags else 0)


class TestLexicon:
    def test_positive_hit(self):
        lex = Lexicon(frozenset({"good"}), frozenset())
        assert annotate_lexicon(["good"], lex) == [(1, "P")]

    def test_absent_word(self):
        lex = Lexicon(frozenset({"good"}), frozenset({"bad"}))
        assert annotate_lexicon(["table"], lex) == [(0, None)]

    def test_negative_hit(self):
        lex = Lexicon(frozenset(), frozenset({"heedless"}))
        assert annotate_lexicon(["heedless"], lex) == [(1, "N")]

    def test_case_insensitive(self):
        lex = Lexicon(frozenset({"good"}), frozenset())
        assert annotate_lexicon(["Good", "GOOD"], lex) == [(1, "P"), (1, "P")]

    def test_conflicts_dropped(self):
        lex = Lexicon(frozenset({"odd", "fine"}), frozenset({"odd"}))
        assert "odd" not in lex.positive and "odd" not in lex.negative
        assert "fine" in lex.positive

    @given(st.lists(st.text(alphabet="abcxyz", min_size=1, max_size=6)))
    def test_flag_polarity_consistency(self, words):
        lex = Lexicon(frozenset({"abc"}), frozenset({"xyz"}))
        for flag, polarity in annotate_lexicon(words, lex):
            assert (flag, polarity) != (0, "P") and (flag, polarity) != (0, "N")
            assert not (flag == 1 and polarity is None)

    def test_from_files(self, tmp_path):
        (tmp_path / "pos.txt").write_text("good\nGreat\n\n; comment\n")
        (tmp_path / "neg.txt").write_text("bad\n")
        lex = Lexicon.from_files(tmp_path / "pos.txt", tmp_path / "neg.txt")
        assert lex.positive == {"good", "great"} and lex.negative == {"bad"}


class TestLoadCorpus:
    def test_schema_line(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"tokens":["good","food"],"pos":["ADJ","NOUN"],"rating":5}\n')
        docs = load_corpus(path)
        assert len(docs) == 1
        assert docs[0].aspect_masks() == [0, 1]
        assert docs[0].rating == 5

    def test_empty_file(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text("")
        assert load_corpus(path) == []

    def test_rating_out_of_range(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"tokens":["a"],"pos":["NOUN"],"rating":0}\n')
        with pytest.raises(CorpusValidationError):
            load_corpus(path)

    def test_malformed_line_reports_number(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"tokens":["a"],"pos":["NOUN"],"rating":3}\n{bad json\n')
        with pytest.raises(CorpusFormatError) as exc:
            load_corpus(path)
        assert exc.value.line_no == 2

    def test_length_mismatch(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"tokens":["a","b"],"pos":["NOUN"],"rating":3}\n')
        with pytest.raises(CorpusFormatError):
            load_corpus(path)

    def test_header_line_skipped(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text(
            '{"header":{"tagger_name":"x","tagger_version":"0"}}\n'
            '{"tokens":["a"],"pos":["NOUN"],"rating":3}\n'
        )
        assert len(load_corpus(path)) == 1

    def test_lex_annotation_applied_when_absent(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"tokens":["good","food"],"pos":["ADJ","NOUN"],"rating":4}\n')
        lex = Lexicon(frozenset({"good"}), frozenset())
        docs = load_corpus(path, lexicon=lex)
        assert [t.lex_polarity for t in docs[0].tokens] == ["P", None]

    def test_existing_lex_and_mask_respected(self, tmp_path):
        path = tmp_path / "c.jsonl"
        rec = {
            "tokens": ["good", "food"],
            "pos": ["ADJ", "NOUN"],
            "rating": 4,
            "lex": [None, "N"],
            "aspect_mask": [1, 0],
        }
        path.write_text(json.dumps(rec) + "\n")
        docs = load_corpus(path)
        assert docs[0].aspect_masks() == [1, 0]
        assert [t.lex_polarity for t in docs[0].tokens] == [None, "N"]

    def test_round_trip_identity(self, tmp_path):
        docs = [
            make_doc(["good", "food"], ["ADJ", "NOUN"], 5),
            make_doc(["bad", "service", "here"], ["ADJ", "NOUN", "ADV"], 1),
        ]
        lex = Lexicon(frozenset({"good"}), frozenset({"bad"}))
        docs = [
            Document(
                tuple(
                    Token(t.surface, t.pos, aspect_mask=t.aspect_mask, lex_flag=f, lex_polarity=p)
                    for t, (f, p) in zip(d.tokens, annotate_lexicon(d.surfaces(), lex))
                ),
                rating=d.rating,
            )
            for d in docs
        ]
        path = tmp_path / "c.jsonl"
        write_corpus(docs, path)
        assert load_corpus(path) == docs


class TestQueries:
    def test_load_and_span_validation(self, tmp_path):
        path = tmp_path / "q.jsonl"
        path.write_text('{"tokens":["good","food"],"pos":["ADJ","NOUN"],"span":[1,2],"polarity":"POS"}\n')
        queries = load_queries(path)
        assert queries[0].gold == "POS" and queries[0].query.span == (1, 2)

    def test_bad_span_rejected(self, tmp_path):
        path = tmp_path / "q.jsonl"
        path.write_text('{"tokens":["a"],"pos":["NOUN"],"span":[1,1],"polarity":"NEU"}\n')
        with pytest.raises(CorpusValidationError):
            load_queries(path)

    def test_missing_gold(self, tmp_path):
        path = tmp_path / "q.jsonl"
        path.write_text('{"tokens":["a"],"pos":["NOUN"],"span":[0,1]}\n')
        with pytest.raises(CorpusFormatError):
            load_queries(path)
        assert load_queries(path, require_gold=False)[0].gold == "NEU"


class TestVocabulary:
    def test_min_count_filters(self):
        docs = [make_doc(["a", "a", "a", "b"], ["NOUN"] * 4)]
        vocab = build_vocab(docs, min_count=2)
        assert vocab.words == RESERVED + ("a",)

    def test_empty_corpus_reserved_only(self):
        assert build_vocab([], min_count=1).words == RESERVED

    def test_tie_broken_lexicographically(self):
        docs = [make_doc(["z", "y", "z", "y"], ["NOUN"] * 4)]
        vocab = build_vocab(docs)
        assert vocab.words == RESERVED + ("y", "z")

    def test_frequency_order(self):
        docs = [make_doc(["b", "b", "a"], ["NOUN"] * 3)]
        assert build_vocab(docs).words == RESERVED + ("b", "a")

    def test_index_documents_assigns_ids(self):
        docs = [make_doc(["b", "b", "a"], ["NOUN"] * 3)]
        vocab = build_vocab(docs, min_count=2)
        indexed = index_documents(docs, vocab)
        assert indexed[0].vocab_ids() == [vocab.id_of("b"), vocab.id_of("b"), 1]  # 'a' -> UNK

    def test_min_count_zero_rejected(self):
        with pytest.raises(CorpusValidationError):
            build_vocab([], min_count=0)


class TestInvariants:
    def test_document_requires_tokens(self):
        with pytest.raises(CorpusValidationError):
            Document(tokens=(), rating=3)

    def test_token_flag_consistency(self):
        with pytest.raises(CorpusValidationError):
            Token(surface="x", pos="NOUN", lex_flag=1, lex_polarity=None)
        with pytest.raises(CorpusValidationError):
            Token(surface="x", pos="NOUN", lex_flag=0, lex_polarity="P")
