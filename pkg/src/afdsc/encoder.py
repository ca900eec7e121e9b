"""Small trainable bidirectional self-attention encoder.

Pre-norm residual blocks over learned token + position embeddings. The
forward pass records a backward graph; `backward` pushes an upstream
gradient through it and returns per-parameter gradients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .errors import ConfigError, DataError, TrainingDivergedError


@dataclass(frozen=True)
class EncoderConfig:
    vocab_size: int
    max_len: int = 32
    dim: int = 64
    num_layers: int = 2
    num_heads: int = 4
    ffn_dim: int = 128
    dropout_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.vocab_size < 1 or self.max_len < 1 or self.dim < 1 or self.ffn_dim < 1:
            raise ConfigError("vocab_size, max_len, dim, and ffn_dim must be positive")
        if self.num_layers < 0:
            raise ConfigError("num_layers must be >= 0")
        if self.num_heads < 1 or self.dim % self.num_heads != 0:
            raise ConfigError(f"dim {self.dim} must be divisible by num_heads {self.num_heads}")
        if not (0.0 <= self.dropout_rate < 1.0):
            raise ConfigError(f"dropout_rate must lie in [0, 1): {self.dropout_rate}")


@dataclass
class ParameterSet:
    """Named trainable tensors, insertion-ordered; optionally tied to a config."""

    tensors: dict[str, Tensor] = field(default_factory=dict)
    config: Optional[EncoderConfig] = None

    def __getitem__(self, name: str) -> Tensor:
        return self.tensors[name]

    def __contains__(self, name: str) -> bool:
        return name in self.tensors

    def names(self) -> list[str]:
        return list(self.tensors)

    def items(self):
        return self.tensors.items()

    def add(self, name: str, data: np.ndarray) -> None:
        if name in self.tensors:
            raise ConfigError(f"duplicate parameter name: {name}")
        self.tensors[name] = ad.param(data)

    def zero_grads(self) -> None:
        for t in self.tensors.values():
            t.zero_grad()

    def grad_arrays(self) -> dict[str, np.ndarray]:
        """Per-parameter gradients, zeros where a parameter was untouched."""
        return {
            name: (t.grad if t.grad is not None else np.zeros_like(t.data))
            for name, t in self.tensors.items()
        }

    def data_arrays(self) -> dict[str, np.ndarray]:
        return {name: t.data for name, t in self.tensors.items()}

    def load_arrays(self, arrays: dict[str, np.ndarray]) -> None:
        if set(arrays) != set(self.tensors):
            missing = set(self.tensors) ^ set(arrays)
            raise ConfigError(f"parameter name mismatch: {sorted(missing)}")
        for name, value in arrays.items():
            if value.shape != self.tensors[name].data.shape:
                raise ConfigError(f"shape mismatch for {name}")
            self.tensors[name].data = np.asarray(value, dtype=np.float64)


@dataclass
class HiddenStates:
    """Per-token hidden vectors plus validity flags (False on padding)."""

    states: Tensor  # (batch, seq, dim)
    valid: np.ndarray  # (batch, seq) bool

    @property
    def dim(self) -> int:
        return self.states.shape[-1]


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def init_params(cfg: EncoderConfig) -> ParameterSet:
    """Scaled-uniform weights, unit layer-norm gains, zero biases; seed-deterministic."""
    rng = np.random.default_rng(cfg.seed)
    d, f = cfg.dim, cfg.ffn_dim
    params = ParameterSet(config=cfg)
    params.add("tok_emb", rng.uniform(-0.1, 0.1, size=(cfg.vocab_size, d)))
    params.add("pos_emb", rng.uniform(-0.1, 0.1, size=(cfg.max_len, d)))
    params.add("emb_ln_g", np.ones(d))
    params.add("emb_ln_b", np.zeros(d))
    for i in range(cfg.num_layers):
        p = f"l{i}."
        params.add(p + "ln1_g", np.ones(d))
        params.add(p + "ln1_b", np.zeros(d))
        for name in ("wq", "wk", "wv", "wo"):
            params.add(p + name, _glorot(rng, d, d))
            params.add(p + name[1] + "b", np.zeros(d))
        params.add(p + "ln2_g", np.ones(d))
        params.add(p + "ln2_b", np.zeros(d))
        params.add(p + "w1", _glorot(rng, d, f))
        params.add(p + "b1", np.zeros(f))
        params.add(p + "w2", _glorot(rng, f, d))
        params.add(p + "b2", np.zeros(d))
    return params


def _dropout(x: Tensor, rate: float, rng: np.random.Generator) -> Tensor:
    keep = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return x * ad.tensor(keep)


def encode(
    params: ParameterSet,
    ids: np.ndarray,
    valid: Optional[np.ndarray] = None,
    train_mode: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> HiddenStates:
    """Forward pass over a (batch, seq) id matrix.

    Padding positions are excluded from every attention softmax, so appending
    padding never changes the hidden states of real tokens. Dropout fires only
    in train mode and needs an explicit rng.
    """
    cfg = params.config
    if cfg is None:
        raise ConfigError("ParameterSet has no encoder config attached")
    ids = np.asarray(ids)
    if ids.ndim != 2:
        raise DataError(f"ids must be (batch, seq), got shape {ids.shape}")
    batch, seq = ids.shape
    if seq > cfg.max_len:
        raise DataError(f"sequence length {seq} exceeds max_len {cfg.max_len}")
    if ids.min(initial=0) < 0 or ids.max(initial=0) >= cfg.vocab_size:
        raise DataError("token id out of vocabulary range")
    if valid is None:
        valid = np.ones((batch, seq), dtype=bool)
    valid = np.asarray(valid, dtype=bool)

    drop = train_mode and cfg.dropout_rate > 0.0
    if drop and rng is None:
        raise ConfigError("train-mode encode with dropout requires an rng")

    x = ad.embedding(params["tok_emb"], ids) + ad.embedding(params["pos_emb"], np.arange(seq))
    x = ad.layer_norm(x, params["emb_ln_g"], params["emb_ln_b"])
    if drop:
        x = _dropout(x, cfg.dropout_rate, rng)

    heads, dk = cfg.num_heads, cfg.dim // cfg.num_heads
    key_support = valid[:, None, None, :]  # broadcast over heads and query rows
    scale = 1.0 / math.sqrt(dk)

    for i in range(cfg.num_layers):
        p = f"l{i}."
        h = ad.layer_norm(x, params[p + "ln1_g"], params[p + "ln1_b"])

        def split(t: Tensor) -> Tensor:
            return ad.swapaxes(ad.reshape(t, (batch, seq, heads, dk)), 1, 2)

        q = split(h @ params[p + "wq"] + params[p + "qb"])
        k = split(h @ params[p + "wk"] + params[p + "kb"])
        v = split(h @ params[p + "wv"] + params[p + "vb"])
        scores = (q @ ad.swapaxes(k, -1, -2)) * scale
        probs = ad.masked_softmax(scores, key_support)
        if drop:
            probs = _dropout(probs, cfg.dropout_rate, rng)
        ctx = ad.reshape(ad.swapaxes(probs @ v, 1, 2), (batch, seq, cfg.dim))
        attn_out = ctx @ params[p + "wo"] + params[p + "ob"]
        if drop:
            attn_out = _dropout(attn_out, cfg.dropout_rate, rng)
        x = x + attn_out

        h = ad.layer_norm(x, params[p + "ln2_g"], params[p + "ln2_b"])
        ffn = ad.gelu(h @ params[p + "w1"] + params[p + "b1"]) @ params[p + "w2"] + params[p + "b2"]
        if drop:
            ffn = _dropout(ffn, cfg.dropout_rate, rng)
        x = x + ffn

    return HiddenStates(states=x, valid=valid)


def backward(
    params: ParameterSet, hidden: HiddenStates, upstream: np.ndarray
) -> dict[str, np.ndarray]:
    """Push an upstream d(loss)/d(hidden) through the recorded forward pass."""
    upstream = np.asarray(upstream, dtype=np.float64)
    if not np.all(np.isfinite(upstream)):
        raise TrainingDivergedError(step=-1, components={"upstream": "non-finite"})
    params.zero_grads()
    hidden.states.backward(upstream)
    grads = params.grad_arrays()
    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise TrainingDivergedError(step=-1, components={name: "non-finite gradient"})
    return grads
