"""Zero-shot aspect sentiment from document ratings.

Train a 1-5 star rating classifier whose document representation is an
attention-weighted composition of aspect-position hidden states, then reuse
the same head on individual aspect spans to predict POS/NEG/NEU with no
aspect-labeled training data.
"""

from .corpus import (
    AspectQuery,
    AspectRuleConfig,
    Document,
    LabeledQuery,
    Lexicon,
    Token,
    Vocabulary,
    annotate_lexicon,
    build_vocab,
    compute_aspect_mask,
    index_documents,
    load_corpus,
    load_queries,
    write_corpus,
    write_queries,
)
from .encoder import EncoderConfig, HiddenStates, ParameterSet, encode, init_params
from .errors import (
    AfdscError,
    CheckpointError,
    ConfigError,
    CorpusFormatError,
    CorpusValidationError,
    DataError,
    TrainingDivergedError,
)
from .evaluation import EvalResult, compare_poolers, cross_domain, evaluate, run_ablation
from .losses import LossConfig, joint_loss, mwp_loss, wsp_loss
from .masking import MaskPolicy, MaskedBatch, corrupt, select_mask_positions
from .model import (
    Model,
    PredictionResult,
    init_model,
    mask_and_normalize,
    pool,
    pool_avg,
    pool_cls,
    predict_aspect_polarity,
    rating_loss,
    rating_to_polarity,
    score_aspects,
)
from .synthetic import (
    builtin_lexicon,
    generate_mixed_polarity_queries,
    generate_synthetic_corpus,
)
from .trainer import (
    EncoderSettings,
    TrainConfig,
    TrainState,
    clip_gradients,
    load_checkpoint,
    lr_schedule,
    save_checkpoint,
    train,
    train_model,
)

__version__ = "0.1.0"
