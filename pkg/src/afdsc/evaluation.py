"""Zero-shot aspect-polarity metrics and the comparison harnesses.

All harnesses train under identical seeds and data order, differing only in
the switch under study, and evaluate with the same query set. Class order in
confusion matrices and per-class metrics is (NEG, NEU, POS).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .corpus import LabeledQuery, POLARITIES
from .errors import DataError
from .model import Model, predict_aspect_polarity
from .trainer import TrainConfig, train_model

_CLASS_INDEX = {label: i for i, label in enumerate(POLARITIES)}


@dataclass
class EvalResult:
    accuracy: float
    macro_f1: float
    per_class: dict[str, dict[str, float]]
    confusion: list[list[int]]  # rows gold, columns predicted, order NEG/NEU/POS
    num_queries: int
    num_fallbacks: int

    def to_json(self) -> dict:
        return dataclasses.asdict(self)


def metrics_from_confusion(confusion: np.ndarray) -> tuple[float, float, dict]:
    """Accuracy, macro-F1, per-class P/R/F1; empty-denominator metrics are 0."""
    confusion = np.asarray(confusion, dtype=int)
    total = confusion.sum()
    accuracy = float(np.trace(confusion) / total) if total else 0.0
    per_class = {}
    f1s = []
    for i, label in enumerate(POLARITIES):
        tp = confusion[i, i]
        predicted = confusion[:, i].sum()
        actual = confusion[i, :].sum()
        precision = float(tp / predicted) if predicted else 0.0
        recall = float(tp / actual) if actual else 0.0
        f1 = 2 * precision * recall / (precision + recall) if (precision + recall) else 0.0
        per_class[label] = {"precision": precision, "recall": recall, "f1": f1}
        f1s.append(f1)
    return accuracy, float(np.mean(f1s)), per_class


def evaluate(model: Model, queries: Sequence[LabeledQuery]) -> EvalResult:
    """Score every query with the zero-shot polarity predictor."""
    if len(queries) == 0:
        raise DataError("query set is empty")
    confusion = np.zeros((3, 3), dtype=int)
    fallbacks = 0
    for lq in queries:
        result = predict_aspect_polarity(lq.query, model)
        confusion[_CLASS_INDEX[lq.gold], _CLASS_INDEX[result.polarity]] += 1
        fallbacks += int(result.no_aspect_fallback)
    accuracy, macro_f1, per_class = metrics_from_confusion(confusion)
    return EvalResult(
        accuracy=accuracy,
        macro_f1=macro_f1,
        per_class=per_class,
        confusion=confusion.tolist(),
        num_queries=len(queries),
        num_fallbacks=fallbacks,
    )


def _evaluate_over_seeds(
    corpus, queries: Sequence[LabeledQuery], cfg: TrainConfig, seeds: Sequence[int]
) -> EvalResult:
    """Train once per seed and pool the confusion counts across runs."""
    confusion = np.zeros((3, 3), dtype=int)
    fallbacks = 0
    for seed in seeds:
        model, _ = train_model(corpus, replace(cfg, seed=seed))
        result = evaluate(model, queries)
        confusion += np.asarray(result.confusion)
        fallbacks += result.num_fallbacks
    accuracy, macro_f1, per_class = metrics_from_confusion(confusion)
    return EvalResult(
        accuracy=accuracy,
        macro_f1=macro_f1,
        per_class=per_class,
        confusion=confusion.tolist(),
        num_queries=len(queries) * len(seeds),
        num_fallbacks=fallbacks,
    )


def run_ablation(
    corpus,
    queries: Sequence[LabeledQuery],
    cfg: TrainConfig,
    seeds: Optional[Sequence[int]] = None,
) -> dict[str, EvalResult]:
    """Train {full, -wsp, -mwp, -pos_mask} per seed and evaluate identically."""
    seeds = list(seeds) if seeds else [cfg.seed]
    variants = {
        "full": cfg,
        "-wsp": replace(cfg, use_wsp=False),
        "-mwp": replace(cfg, use_mwp=False),
        "-pos_mask": replace(cfg, use_pos_mask=False),
    }
    return {
        name: _evaluate_over_seeds(corpus, queries, variant, seeds)
        for name, variant in variants.items()
    }


def compare_poolers(
    corpus,
    queries: Sequence[LabeledQuery],
    cfg: TrainConfig,
    seeds: Optional[Sequence[int]] = None,
) -> dict[str, EvalResult]:
    """Train the attention pooler against the classifier-token and mean baselines."""
    seeds = list(seeds) if seeds else [cfg.seed]
    return {
        pooling: _evaluate_over_seeds(corpus, queries, replace(cfg, pooling=pooling), seeds)
        for pooling in ("pos_att", "cls", "avg")
    }


def cross_domain(
    train_corpus, eval_queries: Sequence[LabeledQuery], cfg: TrainConfig
) -> EvalResult:
    """Train on one domain's documents, evaluate on another's queries."""
    if len(eval_queries) == 0:
        raise DataError("cross-domain evaluation set is empty")
    model, _ = train_model(train_corpus, cfg)
    return evaluate(model, eval_queries)


def config_hash(cfg: TrainConfig) -> str:
    blob = json.dumps(cfg.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def results_to_json(results: dict[str, EvalResult], cfg: TrainConfig) -> dict:
    return {
        "config_hash": config_hash(cfg),
        "results": {name: r.to_json() for name, r in results.items()},
    }


def render_table(results: dict[str, EvalResult]) -> str:
    """Human-readable comparison table."""
    header = f"{'variant':<12} {'acc':>7} {'macro_f1':>9} {'queries':>8} {'fallbacks':>10}"
    lines = [header, "-" * len(header)]
    for name, r in results.items():
        lines.append(
            f"{name:<12} {r.accuracy:>7.4f} {r.macro_f1:>9.4f} "
            f"{r.num_queries:>8d} {r.num_fallbacks:>10d}"
        )
    return "\n".join(lines)
