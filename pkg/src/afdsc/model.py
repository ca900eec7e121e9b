"""Core rating-composition mechanism and zero-shot aspect polarity inference.

A document's rating representation is an attention-weighted sum of the hidden
states at aspect (noun) positions:

    score_i = t . h_i + b                      (raw attention score)
    alpha   = softmax over {i : m_i = 1}       (exact zeros elsewhere)
    rep     = sum_i alpha_i h_i

The same 5-way rating head is reused zero-shot on aspect spans: the span's
hidden states are averaged, classified, and the argmax rating is mapped to
NEG (< 3), NEU (= 3), or POS (> 3).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .corpus import CLS_ID, Document, AspectQuery, Vocabulary
from .encoder import EncoderConfig, HiddenStates, ParameterSet, encode, init_params
from .errors import AfdscError, ConfigError

POOLING_MODES = ("pos_att", "cls", "avg")

WSP_CLASSES = ("P", "N")


class NoAspectTokens(AfdscError):
    """Raised by mask_and_normalize when the aspect mask has empty support."""


@dataclass
class AttentionParams:
    """The trainable scoring vector and offset of the pooling attention."""

    t: Tensor
    b: Tensor


@dataclass
class AttentionWeights:
    raw: np.ndarray      # unmasked scores
    masked: np.ndarray   # scores with excluded positions at -inf
    alpha: Tensor        # normalized weights, exact zeros off-support


def score_aspects(h, p: AttentionParams) -> Tensor:
    """Per-position raw attention scores t.h_i + b over the last axis of h."""
    h = ad.tensor(h)
    return ad.tsum(h * p.t, axis=-1) + p.b


def mask_and_normalize(raw, aspect_mask) -> AttentionWeights:
    """Softmax restricted to mask support; positions with m_i = 0 get exactly 0.

    Raises NoAspectTokens when the mask has no support so the caller can apply
    its fallback policy.
    """
    raw = ad.tensor(raw)
    mask = np.asarray(aspect_mask, dtype=bool)
    if raw.shape != mask.shape:
        raise ConfigError(f"score/mask shape mismatch: {raw.shape} vs {mask.shape}")
    if not mask.any():
        raise NoAspectTokens("no aspect positions in mask")
    alpha = ad.masked_softmax(raw, mask)
    masked = np.where(mask, raw.data, -np.inf)
    return AttentionWeights(raw=raw.data, masked=masked, alpha=alpha)


def attention_weights_with_fallback(
    raw: Tensor,
    aspect_mask: np.ndarray,
    valid: np.ndarray,
    use_pos_mask: bool = True,
) -> tuple[Tensor, np.ndarray]:
    """Batched attention weights with the no-aspect fallback.

    Rows whose aspect support is empty (or every row, when use_pos_mask is
    off) attend over all non-padding positions instead; the returned flags
    mark rows where the fallback fired.
    """
    valid = np.asarray(valid, dtype=bool)
    if use_pos_mask:
        support = np.asarray(aspect_mask, dtype=bool) & valid
        fallback = ~support.any(axis=-1)
        support = np.where(fallback[..., None], valid, support)
    else:
        support = valid
        fallback = np.zeros(valid.shape[:-1], dtype=bool)
    return ad.masked_softmax(raw, support), fallback


def pool(h, alpha) -> Tensor:
    """Weighted sum of positions: sum_i alpha_i h_i."""
    h = ad.tensor(h)
    alpha = ad.tensor(alpha)
    expanded = ad.reshape(alpha, alpha.shape + (1,))
    return ad.tsum(h * expanded, axis=-2)


def pool_cls(hidden: HiddenStates) -> Tensor:
    """The classifier-token row (position 0 by construction)."""
    seq = hidden.states.shape[-2]
    weights = np.zeros(seq)
    weights[0] = 1.0
    return ad.tsum(hidden.states * ad.tensor(weights[:, None]), axis=-2)


def pool_avg(hidden: HiddenStates) -> Tensor:
    """Mean over non-padding positions."""
    valid = hidden.valid.astype(np.float64)
    weights = valid / valid.sum(axis=-1, keepdims=True)
    return ad.tsum(hidden.states * ad.tensor(weights[..., None]), axis=-2)


@dataclass
class RatingHead:
    """Affine map from the pooled representation to 5 rating logits."""

    w: Tensor
    b: Tensor


def rating_logits(rep: Tensor, head: RatingHead) -> Tensor:
    rep = ad.tensor(rep)
    if rep.ndim == 1:
        rep = ad.reshape(rep, (1,) + rep.shape)
    return rep @ head.w + head.b


def rating_loss(rep, head: RatingHead, ratings) -> tuple[Tensor, np.ndarray]:
    """Per-document cross-entropy of the true rating; also returns P(r | rep).

    `ratings` holds labels in 1..5; returns (losses of shape (batch,),
    distribution array of shape (batch, 5)).
    """
    ratings = np.atleast_1d(np.asarray(ratings, dtype=int))
    if np.any((ratings < 1) | (ratings > 5)):
        raise ConfigError(f"ratings must lie in 1..5: {ratings}")
    logits = rating_logits(rep, head)
    logp = ad.log_softmax(logits)
    onehot = np.eye(5)[ratings - 1]
    losses = -ad.tsum(logp * ad.tensor(onehot), axis=-1)
    return losses, np.exp(logp.data)


def rating_to_polarity(rating: int) -> str:
    if rating < 3:
        return "NEG"
    if rating > 3:
        return "POS"
    return "NEU"


@dataclass
class Model:
    """Everything needed for inference: parameters, vocab, pooling behavior."""

    params: ParameterSet
    vocab: Vocabulary
    pooling: str = "pos_att"
    use_pos_mask: bool = True

    def __post_init__(self):
        if self.pooling not in POOLING_MODES:
            raise ConfigError(f"pooling must be one of {POOLING_MODES}: {self.pooling!r}")

    @property
    def encoder_config(self) -> EncoderConfig:
        return self.params.config

    @property
    def attention(self) -> AttentionParams:
        return AttentionParams(t=self.params["attn.t"], b=self.params["attn.b"])

    @property
    def rating_head(self) -> RatingHead:
        return RatingHead(w=self.params["rating.w"], b=self.params["rating.b"])

    @property
    def wsp_head(self):
        return self.params["wsp.w"], self.params["wsp.b"]

    @property
    def mwp_head(self):
        return self.params["mwp.w"], self.params["mwp.b"]


def init_model(
    encoder_cfg: EncoderConfig,
    vocab: Vocabulary,
    pooling: str = "pos_att",
    use_pos_mask: bool = True,
) -> Model:
    """Encoder plus the attention, rating, word-sentiment, and masked-word heads."""
    if encoder_cfg.vocab_size != len(vocab):
        raise ConfigError(
            f"encoder vocab_size {encoder_cfg.vocab_size} != vocabulary size {len(vocab)}"
        )
    params = init_params(encoder_cfg)
    rng = np.random.default_rng(np.random.SeedSequence([encoder_cfg.seed, 7]))
    d, v = encoder_cfg.dim, len(vocab)

    def glorot(fan_in, fan_out):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-limit, limit, size=(fan_in, fan_out))

    params.add("attn.t", glorot(d, 1)[:, 0])
    params.add("attn.b", np.zeros(()))
    params.add("rating.w", glorot(d, 5))
    params.add("rating.b", np.zeros(5))
    params.add("wsp.w", glorot(d, 2))
    params.add("wsp.b", np.zeros(2))
    params.add("mwp.w", glorot(d, v))
    params.add("mwp.b", np.zeros(v))
    return Model(params=params, vocab=vocab, pooling=pooling, use_pos_mask=use_pos_mask)


def pooled_rating_rep(
    model: Model, hidden: HiddenStates, aspect_mask: np.ndarray
) -> tuple[Tensor, Optional[Tensor], np.ndarray]:
    """Document representation under the model's pooling mode.

    Returns (rep, alpha-or-None, fallback flags); alpha is only produced by
    the attention pooler.
    """
    if model.pooling == "pos_att":
        raw = score_aspects(hidden.states, model.attention)
        alpha, fallback = attention_weights_with_fallback(
            raw, aspect_mask, hidden.valid, model.use_pos_mask
        )
        return pool(hidden.states, alpha), alpha, fallback
    no_fallback = np.zeros(hidden.valid.shape[0], dtype=bool)
    if model.pooling == "cls":
        return pool_cls(hidden), None, no_fallback
    return pool_avg(hidden), None, no_fallback


@dataclass
class PredictionResult:
    span: tuple[int, int]
    rating_dist: list[float]
    pred_rating: int
    polarity: str
    no_aspect_fallback: bool

    def to_json(self) -> dict:
        return {
            "span": list(self.span),
            "rating_dist": self.rating_dist,
            "pred_rating": self.pred_rating,
            "polarity": self.polarity,
            "no_aspect_fallback": self.no_aspect_fallback,
        }


def document_batch(model: Model, doc: Document) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Single-document (ids, valid, aspect mask) arrays with CLS prepended."""
    ids = np.array([[CLS_ID] + [model.vocab.id_of(t.surface) for t in doc.tokens]])
    valid = np.ones_like(ids, dtype=bool)
    mask = np.array([[0] + doc.aspect_masks()], dtype=bool)
    return ids, valid, mask


def predict_aspect_polarity(query: AspectQuery, model: Model) -> PredictionResult:
    """Zero-shot aspect polarity: average the span's hidden states, reuse the
    rating head, and map the argmax rating onto NEG/NEU/POS."""
    doc = query.document
    start, end = query.span
    ids, valid, mask = document_batch(model, doc)
    with ad.no_grad():
        hidden = encode(model.params, ids, valid)
        seq = ids.shape[1]
        weights = np.zeros(seq)
        weights[start + 1 : end + 1] = 1.0 / (end - start)  # shift past CLS
        rep = ad.tsum(hidden.states * ad.tensor(weights[:, None]), axis=-2)
        logp = ad.log_softmax(rating_logits(rep, model.rating_head))
    dist = np.exp(logp.data[0])
    pred_rating = int(np.argmax(dist)) + 1
    return PredictionResult(
        span=(start, end),
        rating_dist=[float(x) for x in dist],
        pred_rating=pred_rating,
        polarity=rating_to_polarity(pred_rating),
        no_aspect_fallback=not bool(mask.any()),
    )
