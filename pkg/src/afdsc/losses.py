"""Auxiliary objectives and the joint loss.

Word sentiment prediction (WSP) supervises only lexicon-flagged positions
with their P/N polarity; masked word prediction (MWP) reconstructs original
ids at selected positions. Both are per-document sums of token
cross-entropies; the joint objective is

    total = wsp + mwp_weight * mwp + rating
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .encoder import HiddenStates
from .errors import ConfigError


@dataclass(frozen=True)
class LossConfig:
    mwp_weight: float = 0.01

    def __post_init__(self):
        if self.mwp_weight < 0:
            raise ConfigError(f"mwp_weight must be >= 0: {self.mwp_weight}")


def sequence_class_loss(
    logits: Tensor, targets: np.ndarray, indicator: np.ndarray
) -> Tensor:
    """Sum over indicated positions of -log P(target); shape (batch,).

    `targets` holds class indices (any value where the indicator is off),
    `indicator` selects the supervised positions.
    """
    num_classes = logits.shape[-1]
    indicator = np.asarray(indicator, dtype=np.float64)
    targets = np.where(indicator.astype(bool), np.asarray(targets, dtype=int), 0)
    if targets.min(initial=0) < 0 or targets.max(initial=0) >= num_classes:
        raise ConfigError("class target out of range")
    logp = ad.log_softmax(logits)
    onehot = np.eye(num_classes)[targets] * indicator[..., None]
    return -ad.tsum(ad.tsum(logp * ad.tensor(onehot), axis=-1), axis=-1)


def wsp_loss(
    hidden: HiddenStates,
    head: tuple[Tensor, Tensor],
    lex_classes: np.ndarray,
    lex_flags: np.ndarray,
) -> Tensor:
    """Per-document word-sentiment loss over lexicon positions only.

    `lex_classes`: 0 for positive, 1 for negative (ignored off-flag).
    Documents without lexicon words contribute exactly 0.
    """
    w, b = head
    flags = np.asarray(lex_flags, dtype=bool) & hidden.valid
    return sequence_class_loss(hidden.states @ w + b, lex_classes, flags)


def mwp_loss(
    hidden: HiddenStates,
    head: tuple[Tensor, Tensor],
    targets: np.ndarray,
    mask_flags: np.ndarray,
) -> Tensor:
    """Per-document masked-word loss: -log P(original id) at flagged positions.

    The hidden states must come from the corrupted input. Pass all real
    (non-padding) positions as flags to get the all-token variant.
    """
    w, b = head
    flags = np.asarray(mask_flags, dtype=bool) & hidden.valid
    return sequence_class_loss(hidden.states @ w + b, targets, flags)


def joint_loss(wsp, mwp, rating, cfg: LossConfig = LossConfig()):
    """wsp + mwp_weight * mwp + rating; works on scalars and Tensors alike."""
    return wsp + cfg.mwp_weight * mwp + rating
