import numpy as np
import pytest

from afdsc.corpus import compute_aspect_mask
from afdsc.errors import ConfigError
from afdsc.synthetic import (
    ORACLE_SETTINGS,
    oracle_corpus,
    DOMAIN_A_NOUNS,
    DOMAIN_B_NOUNS,
    FILLER_WORDS,
    NEGATIVE_WORDS,
    POSITIVE_WORDS,
    builtin_lexicon,
    generate_mixed_polarity_queries,
    generate_synthetic_corpus,
    rating_from_counts,
)


def test_rating_formula_examples():
    assert rating_from_counts(1, 0) == 4
    assert rating_from_counts(1, 1) == 3
    assert rating_from_counts(2, 0) == 5
    assert rating_from_counts(0, 3) == 1  # clipped


def test_ratings_match_polarity_counts_exactly():
    docs, queries = generate_synthetic_corpus(200, seed=11, num_eval_docs=50)
    lex = builtin_lexicon()
    for doc in docs:
        num_pos = sum(1 for t in doc.tokens if t.lex_polarity == "P")
        num_neg = sum(1 for t in doc.tokens if t.lex_polarity == "N")
        assert doc.rating == rating_from_counts(num_pos, num_neg)
        # every surface-level lexicon hit is flagged; fillers/nouns never hit
        for t in doc.tokens:
            in_pos, in_neg = t.surface in lex.positive, t.surface in lex.negative
            assert t.lex_flag == int(in_pos or in_neg)
    for lq in queries:
        assert lq.gold in ("POS", "NEG", "NEU")


def test_query_spans_point_at_nouns_with_correct_gold():
    _, queries = generate_synthetic_corpus(0, seed=3, num_eval_docs=80)
    for lq in queries:
        start, end = lq.query.span
        token = lq.query.document.tokens[start]
        assert end == start + 1 and token.pos == "NOUN"
        if lq.gold == "NEU":
            assert start == 0 or lq.query.document.tokens[start - 1].lex_polarity is None
        else:
            expected = "P" if lq.gold == "POS" else "N"
            assert lq.query.document.tokens[start - 1].lex_polarity == expected


def test_masks_follow_noun_rule():
    docs, _ = generate_synthetic_corpus(50, seed=5, num_eval_docs=1)
    for doc in docs:
        assert doc.aspect_masks() == compute_aspect_mask(doc.pos_tags())


def test_deterministic_given_seed():
    a = generate_synthetic_corpus(40, seed=9, num_eval_docs=10)
    b = generate_synthetic_corpus(40, seed=9, num_eval_docs=10)
    assert a == b
    c = generate_synthetic_corpus(40, seed=10, num_eval_docs=10)
    assert a != c


def test_filler_vocabulary_is_neutral_and_disjoint():
    lex = builtin_lexicon()
    for word, tag in FILLER_WORDS:
        assert word not in lex.positive and word not in lex.negative
        assert tag not in ("NOUN", "PROPN")
    assert not set(POSITIVE_WORDS) & set(NEGATIVE_WORDS)
    nouns = set(DOMAIN_A_NOUNS) | set(DOMAIN_B_NOUNS)
    assert not nouns & (set(POSITIVE_WORDS) | set(NEGATIVE_WORDS))
    assert not nouns & {w for w, _ in FILLER_WORDS}
    assert not set(DOMAIN_A_NOUNS) & set(DOMAIN_B_NOUNS)


def test_domain_pools_are_disjoint_in_output():
    docs_a, _ = generate_synthetic_corpus(30, seed=1, num_eval_docs=1, domain="a")
    docs_b, _ = generate_synthetic_corpus(30, seed=1, num_eval_docs=1, domain="b")
    nouns_a = {t.surface for d in docs_a for t in d.tokens if t.pos == "NOUN"}
    nouns_b = {t.surface for d in docs_b for t in d.tokens if t.pos == "NOUN"}
    assert nouns_a <= set(DOMAIN_A_NOUNS) and nouns_b <= set(DOMAIN_B_NOUNS)


def test_mixed_polarity_probe_shape():
    queries = generate_mixed_polarity_queries(25, seed=4)
    assert len(queries) == 50
    golds = {q.gold for q in queries}
    assert golds == {"POS", "NEG"}
    for lq in queries:
        assert lq.query.document.rating == 3
        assert (lq.doc_num_pos, lq.doc_num_neg) == (1, 1)


def test_aspect_range_validated():
    with pytest.raises(ConfigError):
        generate_synthetic_corpus(10, aspects_per_doc_range=(0, 2))
    with pytest.raises(ConfigError):
        generate_synthetic_corpus(10, aspects_per_doc_range=(1, 4))


def test_polarity_probs_validated():
    with pytest.raises(ConfigError):
        generate_synthetic_corpus(10, polarity_probs=(0.5, 0.5, 0.5))


def test_mood_sharpness_validated():
    with pytest.raises(ConfigError):
        generate_synthetic_corpus(10, mood_sharpness=1.5)


def test_count_weights_validated():
    with pytest.raises(ConfigError):
        generate_synthetic_corpus(10, aspect_count_weights=(0.5, 0.5))  # needs 3 for range (1,3)
    with pytest.raises(ConfigError):
        generate_synthetic_corpus(10, aspect_count_weights=(0.9, 0.2, -0.1))


def test_mood_correlation_increases_uniform_docs():
    sharp_docs, _ = generate_synthetic_corpus(400, seed=5, num_eval_docs=1, mood_sharpness=0.9)
    iid_docs, _ = generate_synthetic_corpus(400, seed=5, num_eval_docs=1, mood_sharpness=0.0)

    def mixed_fraction(docs):
        mixed = 0
        for d in docs:
            pols = {t.lex_polarity for t in d.tokens if t.lex_polarity}
            mixed += int(pols == {"P", "N"})
        return mixed / len(docs)

    assert mixed_fraction(sharp_docs) < mixed_fraction(iid_docs)


def test_oracle_corpus_settings_and_determinism():
    docs_a, queries_a = oracle_corpus(num_docs=50, num_eval_docs=10, seed=3)
    docs_b, queries_b = oracle_corpus(num_docs=50, num_eval_docs=10, seed=3)
    assert docs_a == docs_b and queries_a == queries_b
    assert set(ORACLE_SETTINGS) == {
        "polarity_probs", "mood_sharpness", "aspect_count_weights", "max_fillers"
    }


def test_aspect_counts_respect_range():
    docs, _ = generate_synthetic_corpus(100, aspects_per_doc_range=(2, 2), seed=7, num_eval_docs=1)
    for doc in docs:
        assert sum(doc.aspect_masks()) == 2


def test_eval_docs_disjoint_from_train():
    docs, queries = generate_synthetic_corpus(30, seed=2, num_eval_docs=10)
    train_ids = {id(d) for d in docs}
    assert all(id(lq.query.document) not in train_ids for lq in queries)
    assert np.mean([len(lq.query.document) for lq in queries]) > 0
