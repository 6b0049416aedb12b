"""Per-tweet difficulty scoring.

A tweet's difficulty score is the sum of three components, each in [0, 1]:
worker agreement on its labels, the certainty of per-worker label predictors,
and its normalized labeling cost. Higher scores mean easier tweets. Scores
are split into an easy and a difficult class by 1-D 2-means.
"""

from __future__ import annotations

import logging
import math
import random
import statistics
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from annodiff.config import stable_seed
from annodiff.dataset import Dataset, MajorityResult, majority_labels
from annodiff.errors import AnnodiffError
from annodiff.knn import rank_by_similarity
from annodiff.labels import LABEL_ORDER, LEVELS, LEVEL_LABELS
from annodiff.stats import kmeans_1d
from annodiff.textsim import PairSimilarity, SimilarityMetric

logger = logging.getLogger(__name__)

EASY = "easy"
DIFFICULT = "difficult"


@dataclass(frozen=True)
class ScoreConfig:
    """Knobs of the scoring pipeline.

    metric and k drive the per-worker certainty predictors; split_ratio is
    the fraction of each worker's tweets used to train them.
    """

    metric: SimilarityMetric = SimilarityMetric.SUBSTRING
    k: int = 3
    smoothing: float = 1.0
    split_ratio: float = 0.4
    seed: int = 0


@dataclass(frozen=True)
class DifficultyScore:
    tweet_id: str
    agreement: float
    certainty: float
    cost: float
    ds: float
    klass: str  # EASY or DIFFICULT


@dataclass
class ScoringResult:
    scores: list[DifficultyScore]
    imputed_certainty: list[str]  # tweets that received the population mean
    excluded: dict[str, str]  # tweet id -> reason it could not be scored


def agreement_score(majority: MajorityResult) -> float:
    """Worker agreement for one tweet from its per-level majorities.

    Each level contributes the fraction of its voters that chose the majority
    label, weighted by that majority's share of all majority votes across
    levels. A tied level contributes one extra count to the weight
    denominator, reflecting the extra plausible reading of the tweet.
    """
    levels = majority.levels
    if not levels:
        raise ValueError("agreement is undefined without any votes")
    total_maj = sum(lv.majority_count for lv in levels.values())
    total_maj += sum(1 for lv in levels.values() if lv.tie)
    return sum(
        (lv.majority_count / lv.voter_count) * (lv.majority_count / total_maj)
        for lv in levels.values()
    )


def knn_label_certainty(
    neighbor_labels: Sequence[str], k: int, smoothing: float, labels: Sequence[str]
) -> dict[str, float]:
    """Smoothed per-label certainty from the labels of the k nearest neighbors.

    certainty(j) = (n_j + smoothing) / (k + c) where n_j counts neighbors
    with label j and c is the number of candidate labels. With smoothing 1
    the certainties over all candidate labels sum to exactly 1.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if len(neighbor_labels) != k:
        raise ValueError(f"expected exactly {k} neighbor labels, got {len(neighbor_labels)}")
    if smoothing < 0:
        raise ValueError("smoothing must be non-negative")
    c = len(labels)
    if c < 2:
        raise ValueError("need at least two candidate labels")
    counts = Counter(neighbor_labels)
    unknown = set(counts) - set(labels)
    if unknown:
        raise ValueError(f"neighbor labels outside the candidate set: {sorted(unknown)}")
    return {lab: (counts.get(lab, 0) + smoothing) / (k + c) for lab in labels}


def aggregate_certainties(worker_rows: Sequence[Mapping[int, Mapping[str, float]]]) -> float:
    """Combine per-worker certainty rows for one tweet into a single value.

    Per level, the rows of all contributing workers are averaged label-wise,
    and the maximum average among the labels any worker actually predicted is
    kept. The level maxima are then averaged.
    """
    if not worker_rows:
        raise ValueError("need at least one worker row")
    level_maxima = []
    for level in LEVELS:
        rows = [r[level] for r in worker_rows if level in r]
        if not rows:
            continue
        labels = sorted({lab for r in rows for lab in r}, key=lambda lab: LABEL_ORDER.get(lab, len(LABEL_ORDER)))
        avg = {lab: sum(r.get(lab, 0.0) for r in rows) / len(rows) for lab in labels}
        predicted = set()
        for r in rows:
            best = max(r.values())
            candidates = sorted((lab for lab, v in r.items() if v == best), key=lambda lab: LABEL_ORDER.get(lab, len(LABEL_ORDER)))
            predicted.add(candidates[0])
        level_maxima.append(max(avg[lab] for lab in predicted))
    if not level_maxima:
        raise ValueError("no level carries a certainty row")
    return statistics.fmean(level_maxima)


@dataclass
class CertaintyResult:
    values: dict[str, float]
    imputed: list[str]


def predictor_certainties(
    dataset: Dataset,
    words_by_id: Mapping[str, Sequence[str]],
    *,
    metric: SimilarityMetric = SimilarityMetric.SUBSTRING,
    k: int = 3,
    smoothing: float = 1.0,
    split_ratio: float = 0.4,
    seed: int = 0,
) -> CertaintyResult:
    """Predictor certainty for every tweet of the dataset.

    Each worker's labeled tweets are split once into a training and a test
    partition (seeded, per worker). A k-nearest-neighbor predictor per
    hierarchy level, trained on the training partition, emits a certainty row
    for every test tweet. Rows are aggregated across workers per tweet.

    Labeled tweets that land in no worker's test partition get the population
    mean certainty; their ids are reported in the result.
    """
    if not 0 < split_ratio < 1:
        raise ValueError("split_ratio must be strictly between 0 and 1")
    sims = PairSimilarity(words_by_id, metric)
    rows_by_tweet: dict[str, list[dict[int, dict[str, float]]]] = {}
    for wid in dataset.worker_ids():
        annotations = dataset.workers[wid].annotations
        if not annotations:
            continue
        by_tweet = {a.tweet_id: a for a in annotations}
        ids = sorted(by_tweet)
        rng = random.Random(stable_seed(seed, "certainty-split", wid))
        rng.shuffle(ids)
        train_size = max(1, math.floor(split_ratio * len(ids)))
        train_ids, test_ids = ids[:train_size], ids[train_size:]

        level_train: dict[int, list[str]] = {level: [] for level in LEVELS}
        for tid in train_ids:
            for level in by_tweet[tid].labels.labels():
                level_train[level].append(tid)

        for tid in test_ids:
            row: dict[int, dict[str, float]] = {}
            for level in LEVELS:
                pool = level_train[level]
                if not pool:
                    continue
                k_eff = min(k, len(pool))
                sim_values = [sims.sim(tid, other) for other in pool]
                order_rng = random.Random(stable_seed(seed, "certainty-order", wid, tid, level))
                order = rank_by_similarity(sim_values, order_rng)
                neighbor_labels = [by_tweet[pool[i]].labels.label(level) for i in order[:k_eff]]
                row[level] = knn_label_certainty(neighbor_labels, k_eff, smoothing, LEVEL_LABELS[level])
            if row:
                rows_by_tweet.setdefault(tid, []).append(row)

    values = {tid: aggregate_certainties(rows_by_tweet[tid]) for tid in sorted(rows_by_tweet)}
    labeled = sorted(dataset.annotations_by_tweet())
    missing = [tid for tid in labeled if tid not in values]
    imputed: list[str] = []
    if missing and values:
        population_mean = statistics.fmean(values.values())
        for tid in missing:
            values[tid] = population_mean
        imputed = missing
        logger.warning("no certainty for %d tweet(s); imputed the population mean %.4f", len(missing), population_mean)
    return CertaintyResult(values=values, imputed=imputed)


def predictor_certainty(
    tweet_id: str,
    dataset: Dataset,
    split_ratio: float = 0.4,
    metric: SimilarityMetric = SimilarityMetric.SUBSTRING,
    k: int = 3,
    smoothing: float = 1.0,
    seed: int = 0,
) -> float:
    """Predictor certainty of a single tweet.

    Convenience wrapper around predictor_certainties, which is the efficient
    entry point when values for many tweets are needed.
    """
    result = predictor_certainties(
        dataset,
        dataset.word_sequences(),
        metric=metric,
        k=k,
        smoothing=smoothing,
        split_ratio=split_ratio,
        seed=seed,
    )
    if tweet_id not in result.values:
        raise AnnodiffError(f"no certainty available for tweet {tweet_id!r}")
    return result.values[tweet_id]


def labeling_costs(dataset: Dataset) -> dict[str, float]:
    """Normalized labeling-cost component per tweet.

    A tweet's raw cost is the median over its annotators of the summed
    per-level durations. Costs are rescaled so the cheapest tweet of the
    population scores 1 and the most expensive scores 0. When every tweet
    costs the same the component carries no signal and everything scores 1.

    Annotations with an incomplete duration record contribute nothing to the
    median; tweets where no annotation has complete durations are absent from
    the result.
    """
    medians: dict[str, float] = {}
    for tid, annotations in sorted(dataset.annotations_by_tweet().items()):
        durations = [d for d in (a.total_duration() for a in annotations) if d is not None]
        if durations:
            medians[tid] = statistics.median(durations)
    if not medians:
        return {}
    lo = min(medians.values())
    hi = max(medians.values())
    if hi == lo:
        return {tid: 1.0 for tid in medians}
    return {tid: 1.0 - (cost - lo) / (hi - lo) for tid, cost in medians.items()}


def labeling_cost(tweet_id: str, dataset: Dataset) -> float:
    """Normalized labeling cost of a single tweet."""
    costs = labeling_costs(dataset)
    if tweet_id not in costs:
        raise AnnodiffError(f"no labeling durations recorded for tweet {tweet_id!r}")
    return costs[tweet_id]


def difficulty_scores(dataset: Dataset, config: ScoreConfig = ScoreConfig()) -> ScoringResult:
    """Score every labeled tweet of the dataset and class it easy or difficult.

    The easy class is the 2-means cluster with the higher mean score. Tweets
    lacking a component (no recorded durations, or no certainty when nothing
    could be imputed) are excluded and reported, never silently dropped.
    """
    by_tweet = dataset.annotations_by_tweet()
    if not by_tweet:
        raise AnnodiffError("cannot score an empty dataset")
    certainty = predictor_certainties(
        dataset,
        dataset.word_sequences(),
        metric=config.metric,
        k=config.k,
        smoothing=config.smoothing,
        split_ratio=config.split_ratio,
        seed=config.seed,
    )
    costs = labeling_costs(dataset)

    rows: list[tuple[str, float, float, float, float]] = []
    excluded: dict[str, str] = {}
    for tid in sorted(by_tweet):
        majority = majority_labels(by_tweet[tid], stable_seed(config.seed, "majority", tid))
        agreement = agreement_score(majority)
        cert = certainty.values.get(tid)
        cost = costs.get(tid)
        if cert is None:
            excluded[tid] = "no predictor certainty"
            continue
        if cost is None:
            excluded[tid] = "no labeling durations"
            continue
        rows.append((tid, agreement, cert, cost, agreement + cert + cost))
    if not rows:
        raise AnnodiffError("no tweet has all three score components")
    if excluded:
        logger.warning("excluded %d tweet(s) from scoring: %s", len(excluded), excluded)

    clustering = kmeans_1d([r[4] for r in rows], seed=config.seed)
    scores = [
        DifficultyScore(
            tweet_id=tid,
            agreement=agreement,
            certainty=cert,
            cost=cost,
            ds=ds,
            klass=EASY if cluster == 1 else DIFFICULT,
        )
        for (tid, agreement, cert, cost, ds), cluster in zip(rows, clustering.labels)
    ]
    return ScoringResult(scores=scores, imputed_certainty=certainty.imputed, excluded=excluded)
