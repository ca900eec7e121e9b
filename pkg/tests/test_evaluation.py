import numpy as np
import pytest

from afdsc.corpus import AspectQuery, Document, LabeledQuery, Token
from afdsc.errors import DataError
from afdsc.evaluation import (
    compare_poolers,
    config_hash,
    cross_domain,
    evaluate,
    metrics_from_confusion,
    render_table,
    results_to_json,
    run_ablation,
)
from afdsc.synthetic import generate_synthetic_corpus
from afdsc.trainer import EncoderSettings, TrainConfig, train_model


def tiny_cfg(**kw):
    base = dict(
        batch_size=4,
        epochs=1,
        seed=0,
        encoder=EncoderSettings(max_len=16, dim=16, num_layers=1, num_heads=2, ffn_dim=24),
    )
    base.update(kw)
    return TrainConfig(**base)


def trained_fixture():
    docs, queries = generate_synthetic_corpus(16, seed=0, num_eval_docs=4)
    model, _ = train_model(docs, tiny_cfg())
    return model, queries


class TestMetricsArithmetic:
    def test_identity_confusion_is_perfect(self):
        acc, f1, per_class = metrics_from_confusion(np.eye(3, dtype=int) * 7)
        assert acc == 1.0 and f1 == 1.0
        assert all(v["f1"] == 1.0 for v in per_class.values())

    def test_hand_built_six_query_confusion(self):
        # gold/pred counts: NEG->NEG 2, NEG->NEU 1, NEU->NEU 1, POS->POS 1, POS->NEG 1
        confusion = np.array([[2, 1, 0], [0, 1, 0], [1, 0, 1]])
        acc, macro_f1, per_class = metrics_from_confusion(confusion)
        assert acc == pytest.approx(4 / 6)
        # NEG: p=2/3, r=2/3, f1=2/3; NEU: p=1/2, r=1, f1=2/3; POS: p=1, r=1/2, f1=2/3
        assert per_class["NEG"]["f1"] == pytest.approx(2 / 3)
        assert per_class["NEU"]["f1"] == pytest.approx(2 / 3)
        assert per_class["POS"]["f1"] == pytest.approx(2 / 3)
        assert macro_f1 == pytest.approx(2 / 3)

    def test_absent_class_scores_zero(self):
        confusion = np.array([[3, 0, 0], [0, 2, 0], [0, 0, 0]])
        acc, macro_f1, per_class = metrics_from_confusion(confusion)
        assert acc == 1.0
        assert per_class["POS"]["f1"] == 0.0
        assert macro_f1 == pytest.approx(2 / 3)


class TestEvaluate:
    def test_accuracy_matches_confusion_trace(self):
        model, queries = trained_fixture()
        result = evaluate(model, queries)
        confusion = np.array(result.confusion)
        assert result.accuracy == pytest.approx(np.trace(confusion) / confusion.sum())
        assert result.num_queries == len(queries)

    def test_permutation_invariant(self):
        model, queries = trained_fixture()
        a = evaluate(model, queries)
        b = evaluate(model, list(reversed(queries)))
        assert a.accuracy == b.accuracy and a.confusion == b.confusion

    def test_does_not_mutate_model(self):
        model, queries = trained_fixture()
        before = {n: model.params[n].data.copy() for n in model.params.names()}
        evaluate(model, queries)
        for name, data in before.items():
            np.testing.assert_array_equal(model.params[name].data, data)

    def test_empty_queries_rejected(self):
        model, _ = trained_fixture()
        with pytest.raises(DataError):
            evaluate(model, [])

    def test_fallback_counter(self):
        model, _ = trained_fixture()
        doc = Document(
            tokens=(Token(surface="good", pos="ADJ"), Token(surface="bad", pos="ADJ")),
            rating=None,
        )
        queries = [LabeledQuery(query=AspectQuery(document=doc, span=(0, 1)), gold="NEU")]
        result = evaluate(model, queries)
        assert result.num_fallbacks == 1


class TestHarnesses:
    def test_ablation_variants_and_probe(self):
        docs, queries = generate_synthetic_corpus(12, seed=1, num_eval_docs=3)
        results = run_ablation(docs, queries, tiny_cfg())
        assert set(results) == {"full", "-wsp", "-mwp", "-pos_mask"}
        for r in results.values():
            assert 0.0 <= r.accuracy <= 1.0

    def test_pooler_comparison_variants(self):
        docs, queries = generate_synthetic_corpus(12, seed=2, num_eval_docs=3)
        results = compare_poolers(docs, queries, tiny_cfg())
        assert set(results) == {"pos_att", "cls", "avg"}

    def test_seed_list_pools_counts(self):
        docs, queries = generate_synthetic_corpus(10, seed=5, num_eval_docs=3)
        pooled = run_ablation(docs, queries, tiny_cfg(), seeds=[0, 1])
        assert pooled["full"].num_queries == 2 * len(queries)
        confusion = np.array(pooled["full"].confusion)
        assert confusion.sum() == 2 * len(queries)

    def test_cross_domain_plumbing(self):
        docs_a, _ = generate_synthetic_corpus(12, seed=3, num_eval_docs=1, domain="a")
        _, queries_b = generate_synthetic_corpus(0, seed=4, num_eval_docs=6, domain="b")
        result = cross_domain(docs_a, queries_b, tiny_cfg())
        assert result.num_queries == len(queries_b)

    def test_cross_domain_empty_eval_rejected(self):
        docs_a, _ = generate_synthetic_corpus(6, seed=3, num_eval_docs=1)
        with pytest.raises(DataError):
            cross_domain(docs_a, [], tiny_cfg())

    def test_cross_domain_above_chance_on_disjoint_nouns(self):
        # domains share the opinion lexicon but no aspect nouns; a properly
        # composed model transfers well above the 1/3 chance level
        from afdsc.synthetic import ORACLE_SETTINGS

        docs_a, _ = generate_synthetic_corpus(1500, seed=10, num_eval_docs=1,
                                              domain="a", **ORACLE_SETTINGS)
        _, queries_b = generate_synthetic_corpus(0, seed=11, num_eval_docs=250,
                                                 domain="b", **ORACLE_SETTINGS)
        cfg = TrainConfig(
            batch_size=8, learning_rate=1e-3, epochs=12, seed=0,
            encoder=EncoderSettings(max_len=16, dim=32, num_layers=2, num_heads=4, ffn_dim=64),
        )
        result = cross_domain(docs_a, queries_b, cfg)
        assert result.accuracy > 0.5, f"cross-domain accuracy {result.accuracy:.3f}"


class TestReporting:
    def test_config_hash_stable_and_sensitive(self):
        assert config_hash(tiny_cfg()) == config_hash(tiny_cfg())
        assert config_hash(tiny_cfg()) != config_hash(tiny_cfg(seed=1))

    def test_results_json_and_table(self):
        model, queries = trained_fixture()
        results = {"full": evaluate(model, queries)}
        payload = results_to_json(results, tiny_cfg())
        assert "config_hash" in payload and "full" in payload["results"]
        table = render_table(results)
        assert "full" in table and "acc" in table
