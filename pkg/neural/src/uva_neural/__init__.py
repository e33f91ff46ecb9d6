"""Toy-scale neural synonymy baselines over exported terminology files:
graph-embedding training (TransE, ComplEx), per-atom context vectors, and
Siamese recurrent models with Manhattan similarity."""

from .context import CONTEXT_VARIANTS, ContextVector, build_context_store, context_dim, derive_context
from .io import Metrics, PairRecord, compute_metrics, context_maps, metrics_csv, read_pairs_jsonl, read_triples
from .kge import ABSENT_SCUI, EntityEmbeddings, KgeConfig, train_kge
from .models import (
    MissingContextError,
    ModelConfig,
    SiameseEncoder,
    TrainedModel,
    Vocab,
    evaluate_model,
    load_word_vectors,
    manhattan_score,
    tokenize,
    train_model,
)

__version__ = "0.1.0"
