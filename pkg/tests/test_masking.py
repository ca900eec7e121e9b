import numpy as np
import pytest

from afdsc.corpus import Document, MASK_ID, RESERVED, Token, Vocabulary
from afdsc.errors import ConfigError
from afdsc.masking import MaskPolicy, MaskedBatch, corrupt, select_mask_positions


def doc_with_tags(tags):
    toks = tuple(Token(surface=f"w{i}", pos=t) for i, t in enumerate(tags))
    return Document(tokens=toks, rating=3)


def big_vocab(n=1000):
    return Vocabulary(words=RESERVED + tuple(f"w{i}" for i in range(n)))


class TestSelect:
    def test_zero_rates_select_nothing(self):
        policy = MaskPolicy(boosted_rate=0.0, base_rate=0.0)
        doc = doc_with_tags(["NOUN"] * 20)
        flags = select_mask_positions(doc, policy, np.random.default_rng(0))
        assert not flags.any()

    def test_boosted_rate_empirical(self):
        # >= 100k noun positions: selection rate must sit at 0.30 +- 0.01
        policy = MaskPolicy()
        rng = np.random.default_rng(42)
        doc = doc_with_tags(["NOUN"] * 500)
        hits = sum(select_mask_positions(doc, policy, rng).sum() for _ in range(220))
        rate = hits / (500 * 220)
        assert abs(rate - 0.30) < 0.01

    def test_base_rate_empirical(self):
        policy = MaskPolicy()
        rng = np.random.default_rng(43)
        doc = doc_with_tags(["VERB"] * 500)
        hits = sum(select_mask_positions(doc, policy, rng).sum() for _ in range(220))
        rate = hits / (500 * 220)
        assert abs(rate - 0.15) < 0.01

    def test_all_boosted_tags_use_elevated_rate(self):
        policy = MaskPolicy()
        rng = np.random.default_rng(44)
        for tag in ("NOUN", "PROPN", "ADJ", "ADV"):
            doc = doc_with_tags([tag] * 400)
            hits = sum(select_mask_positions(doc, policy, rng).sum() for _ in range(80))
            assert abs(hits / (400 * 80) - 0.30) < 0.02

    def test_deterministic_given_seed(self):
        doc = doc_with_tags(["NOUN", "VERB"] * 10)
        a = select_mask_positions(doc, MaskPolicy(), np.random.default_rng(7))
        b = select_mask_positions(doc, MaskPolicy(), np.random.default_rng(7))
        np.testing.assert_array_equal(a, b)


class TestCorrupt:
    def test_no_flags_leaves_ids_unchanged(self):
        vocab = big_vocab(10)
        ids = np.arange(4, 10)
        batch = corrupt(ids, np.zeros(6, dtype=bool), np.random.default_rng(0), vocab)
        np.testing.assert_array_equal(batch.corrupted, ids)
        np.testing.assert_array_equal(batch.originals, -np.ones(6, dtype=int))

    def test_degenerate_split_all_mask(self):
        vocab = big_vocab(10)
        policy = MaskPolicy(mask_prob=1.0, random_prob=0.0, keep_prob=0.0)
        ids = np.arange(4, 10)
        flags = np.ones(6, dtype=bool)
        batch = corrupt(ids, flags, np.random.default_rng(0), vocab, policy)
        assert np.all(batch.corrupted == MASK_ID)
        np.testing.assert_array_equal(batch.originals, ids)

    def test_corruption_split_monte_carlo(self):
        # classify outcomes by comparing to MASK/original; with a 1000-word
        # vocabulary the random-collision bias is ~1e-3, well inside +-0.01
        vocab = big_vocab(1000)
        rng = np.random.default_rng(11)
        n = 120_000
        ids = rng.integers(vocab.num_reserved, len(vocab), size=n)
        batch = corrupt(ids, np.ones(n, dtype=bool), np.random.default_rng(12), vocab)
        masked = (batch.corrupted == MASK_ID).mean()
        kept = (batch.corrupted == ids).mean()
        randomized = 1.0 - masked - kept
        assert abs(masked - 0.8) < 0.01
        assert abs(kept - 0.1) < 0.01
        assert abs(randomized - 0.1) < 0.01

    def test_random_replacements_avoid_reserved_ids(self):
        vocab = big_vocab(50)
        policy = MaskPolicy(mask_prob=0.0, random_prob=1.0, keep_prob=0.0)
        ids = np.full(5000, 10)
        batch = corrupt(ids, np.ones(5000, dtype=bool), np.random.default_rng(3), vocab, policy)
        assert batch.corrupted.min() >= vocab.num_reserved

    def test_reproducible_given_seed(self):
        vocab = big_vocab(100)
        ids = np.arange(4, 44)
        flags = np.random.default_rng(1).random(40) < 0.5
        a = corrupt(ids, flags, np.random.default_rng(9), vocab)
        b = corrupt(ids, flags, np.random.default_rng(9), vocab)
        np.testing.assert_array_equal(a.corrupted, b.corrupted)
        np.testing.assert_array_equal(a.originals, b.originals)

    def test_originals_recorded_exactly_where_flagged(self):
        vocab = big_vocab(100)
        ids = np.arange(4, 24)
        flags = np.zeros(20, dtype=bool)
        flags[[2, 7, 11]] = True
        batch = corrupt(ids, flags, np.random.default_rng(2), vocab)
        assert np.all(batch.originals[flags] == ids[flags])
        assert np.all(batch.originals[~flags] == -1)


class TestPolicyValidation:
    def test_rate_bounds(self):
        with pytest.raises(ConfigError):
            MaskPolicy(boosted_rate=1.5)
        with pytest.raises(ConfigError):
            MaskPolicy(base_rate=-0.1)

    def test_split_must_sum_to_one(self):
        with pytest.raises(ConfigError):
            MaskPolicy(mask_prob=0.8, random_prob=0.3, keep_prob=0.1)

    def test_batch_shape_consistency(self):
        with pytest.raises(ConfigError):
            MaskedBatch(
                corrupted=np.zeros(3, dtype=int),
                flags=np.zeros(4, dtype=bool),
                originals=np.zeros(3, dtype=int),
            )
