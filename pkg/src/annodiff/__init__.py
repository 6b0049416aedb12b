"""Difficulty scoring and label-reliability simulation for hierarchically
labeled tweets."""

from annodiff.dataset import Annotation, Dataset, Worker, load_dataset, majority_labels, parse_dataset
from annodiff.difficulty import (
    DifficultyScore,
    ScoreConfig,
    agreement_score,
    difficulty_scores,
    knn_label_certainty,
    labeling_cost,
    predictor_certainty,
)
from annodiff.knn import PredictedPath, hierarchical_f1, predict, train
from annodiff.labels import LabelPath, label_set
from annodiff.simulation import (
    aggregate,
    build_strata,
    encode_outcome,
    run_config,
    test_proportions,
)
from annodiff.stats import fisher_exact_two_tailed, kmeans_1d
from annodiff.textsim import SimilarityMetric, nsim, tokenize

__version__ = "0.1.0"

__all__ = [
    "Annotation",
    "Dataset",
    "DifficultyScore",
    "LabelPath",
    "PredictedPath",
    "ScoreConfig",
    "SimilarityMetric",
    "Worker",
    "agreement_score",
    "aggregate",
    "build_strata",
    "difficulty_scores",
    "encode_outcome",
    "fisher_exact_two_tailed",
    "hierarchical_f1",
    "kmeans_1d",
    "knn_label_certainty",
    "label_set",
    "labeling_cost",
    "load_dataset",
    "majority_labels",
    "nsim",
    "parse_dataset",
    "predict",
    "predictor_certainty",
    "run_config",
    "test_proportions",
    "tokenize",
    "train",
]
