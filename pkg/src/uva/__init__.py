"""Vocabulary-alignment toolkit.

Build or synthesize a terminology corpus, index it for exact Jaccard
candidate retrieval, generate synonymy training/generalization datasets with
similarity-stratified negatives, run the rule-based baseline with transitive
closure, and score predictors per dataset variant.
"""

from .corpus import AtomRecord, Corpus, SynthParams, concept_members, atom_context, load_corpus, synth_corpus, write_corpus
from .datagen import DatasetBundle, GenConfig, LabeledPair, export_conkg, generate_bundle, negatives, positives, split
from .eval import ConfusionMatrix, MetricsReport, metrics, render_report, score_predictions
from .lexsim import SimIndex, build_index, candidates, jaccard, normalize
from .rba import SynonymyPartition, build_partition, predict, predict_lssc, predict_ss

__version__ = "0.1.0"

__all__ = [
    "AtomRecord",
    "Corpus",
    "SynthParams",
    "concept_members",
    "atom_context",
    "load_corpus",
    "synth_corpus",
    "write_corpus",
    "DatasetBundle",
    "GenConfig",
    "LabeledPair",
    "export_conkg",
    "generate_bundle",
    "negatives",
    "positives",
    "split",
    "ConfusionMatrix",
    "MetricsReport",
    "metrics",
    "render_report",
    "score_predictions",
    "SimIndex",
    "build_index",
    "candidates",
    "jaccard",
    "normalize",
    "SynonymyPartition",
    "build_partition",
    "predict",
    "predict_lssc",
    "predict_ss",
]
