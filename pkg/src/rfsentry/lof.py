"""Local Outlier Factor novelty detector.

Semi-supervised protocol: the model is fitted on recognized fingerprints
only, and every query is scored against that fixed reference set (the query
never joins it). Scores hover around 1 inside the training distribution and
grow with isolation, so a fixed threshold separates inliers from outliers.

Definitions used throughout (k-distance, reachability distance, local
reachability density) are the classic density-based ones:

    kdist(p)      = distance from p to its k-th nearest training neighbor
    N_k(p)        = all training points within kdist(p)  (>= k under ties)
    reach(p, o)   = max(kdist(o), d(p, o))
    lrd(p)        = 1 / (mean_{o in N_k(p)} reach(p, o) + eps)
    score(p)      = mean_{o in N_k(p)} lrd(o) / lrd(p)

Neighbor search is exact brute force; at the few-hundred-point scale this
pipeline runs at, that is both trivial and required for oracle-level tests.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    NonFiniteFeature,
    NotEnoughTrainingData,
    ShapeError,
)

LRD_EPSILON = 1e-10

DEFAULT_K = 100
DEFAULT_THRESHOLD = 1.5

MODEL_FORMAT = "rfsentry-lof"
MODEL_FORMAT_VERSION = 1


class Label(Enum):
    INLIER = "inlier"
    OUTLIER = "outlier"


class Metric(Enum):
    MANHATTAN = "manhattan"
    EUCLIDEAN = "euclidean"


def _as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a 1-D feature vector, got shape {v.shape}")
    return v


def manhattan(a, b) -> float:
    """Sum of absolute coordinate differences."""
    va, vb = _as_vector(a), _as_vector(b)
    if va.shape != vb.shape:
        raise DimensionMismatch(f"dimension mismatch: {va.shape} vs {vb.shape}")
    return float(np.abs(va - vb).sum())


def euclidean(a, b) -> float:
    va, vb = _as_vector(a), _as_vector(b)
    if va.shape != vb.shape:
        raise DimensionMismatch(f"dimension mismatch: {va.shape} vs {vb.shape}")
    return float(np.sqrt(((va - vb) ** 2).sum()))


def _pairwise(a: np.ndarray, b: np.ndarray, metric: Metric) -> np.ndarray:
    """(len(a), len(b)) distance matrix."""
    diff = a[:, None, :] - b[None, :, :]
    if metric is Metric.MANHATTAN:
        return np.abs(diff).sum(axis=2)
    return np.sqrt((diff**2).sum(axis=2))


@dataclass(frozen=True)
class LofModel:
    """Immutable fitted detector state.

    ``train`` holds the (standardized) reference matrix; ``kdist`` and
    ``lrd`` are its per-point k-distances and local reachability densities.
    ``scaler_mean``/``scaler_std`` transform raw queries into the space the
    model was fitted in (identity when standardization is off).
    """

    train: np.ndarray
    k: int
    metric: Metric
    threshold: float
    kdist: np.ndarray
    lrd: np.ndarray
    scaler_mean: np.ndarray
    scaler_std: np.ndarray
    standardized: bool

    def __post_init__(self) -> None:
        for name in ("train", "kdist", "lrd", "scaler_mean", "scaler_std"):
            arr = getattr(self, name)
            arr.flags.writeable = False

    @property
    def dim(self) -> int:
        return self.train.shape[1]

    # -- scoring ------------------------------------------------------------

    def _transform(self, queries: np.ndarray) -> np.ndarray:
        q = np.asarray(queries, dtype=np.float64)
        if q.ndim == 1:
            q = q[None, :]
        if q.shape[1] != self.dim:
            raise DimensionMismatch(
                f"query dimension {q.shape[1]} != model dimension {self.dim}"
            )
        if not np.all(np.isfinite(q)):
            raise NonFiniteFeature("query features must be finite")
        return (q - self.scaler_mean) / self.scaler_std

    def score_batch(self, queries) -> np.ndarray:
        """LOF score of each query against the training reference set."""
        q = self._transform(np.asarray(queries, dtype=np.float64))
        dist = _pairwise(q, self.train, self.metric)
        kdist_q = np.partition(dist, self.k - 1, axis=1)[:, self.k - 1]
        neighborhood = dist <= kdist_q[:, None]
        counts = neighborhood.sum(axis=1)
        reach = np.maximum(self.kdist[None, :], dist)
        mean_reach = np.where(neighborhood, reach, 0.0).sum(axis=1) / counts
        lrd_q = 1.0 / (mean_reach + LRD_EPSILON)
        mean_neighbor_lrd = np.where(neighborhood, self.lrd[None, :], 0.0).sum(axis=1) / counts
        return mean_neighbor_lrd / lrd_q

    def score(self, x) -> float:
        return float(self.score_batch(_as_vector(x)[None, :])[0])

    def classify_batch(self, queries) -> list[Label]:
        return [
            Label.OUTLIER if s > self.threshold else Label.INLIER
            for s in self.score_batch(queries)
        ]

    def classify(self, x) -> Label:
        # boundary rule: a score exactly at the threshold stays an inlier
        return Label.OUTLIER if self.score(x) > self.threshold else Label.INLIER

    # -- persistence ----------------------------------------------------------

    def save(self, path: str | Path) -> None:
        doc = {
            "format": MODEL_FORMAT,
            "version": MODEL_FORMAT_VERSION,
            "k": self.k,
            "metric": self.metric.value,
            "threshold": self.threshold,
            "standardized": self.standardized,
            "scaler_mean": self.scaler_mean.tolist(),
            "scaler_std": self.scaler_std.tolist(),
            "train": self.train.tolist(),
            "kdist": self.kdist.tolist(),
            "lrd": self.lrd.tolist(),
        }
        with open(path, "w") as fh:
            json.dump(doc, fh)
            fh.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "LofModel":
        with open(path) as fh:
            doc = json.load(fh)
        if doc.get("format") != MODEL_FORMAT:
            raise ValueError(f"{path}: not a {MODEL_FORMAT} document")
        if doc.get("version") != MODEL_FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported model version {doc.get('version')}")
        return cls(
            train=np.array(doc["train"], dtype=np.float64),
            k=int(doc["k"]),
            metric=Metric(doc["metric"]),
            threshold=float(doc["threshold"]),
            kdist=np.array(doc["kdist"], dtype=np.float64),
            lrd=np.array(doc["lrd"], dtype=np.float64),
            scaler_mean=np.array(doc["scaler_mean"], dtype=np.float64),
            scaler_std=np.array(doc["scaler_std"], dtype=np.float64),
            standardized=bool(doc["standardized"]),
        )


def fit(
    train,
    k: int = DEFAULT_K,
    metric: Metric | str = Metric.MANHATTAN,
    threshold: float = DEFAULT_THRESHOLD,
    standardize: bool = True,
) -> LofModel:
    """Fit the reference densities on recognized fingerprints.

    Columns are z-scored with training statistics by default so no single
    feature dominates the Manhattan metric; pass standardize=False for raw
    distances.
    """
    metric = Metric(metric)
    x = np.asarray(train, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeError(f"training matrix must be 2-D, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteFeature("training features must be finite")
    n = x.shape[0]
    if k < 1 or n < k + 1:
        raise NotEnoughTrainingData(f"need at least k+1={k + 1} rows, got {n}")

    if standardize:
        mean = x.mean(axis=0)
        std = x.std(axis=0)
        std = np.where(std == 0.0, 1.0, std)  # constant columns contribute 0
    else:
        mean = np.zeros(x.shape[1])
        std = np.ones(x.shape[1])
    z = (x - mean) / std

    dist = _pairwise(z, z, metric)
    np.fill_diagonal(dist, np.inf)
    kdist = np.partition(dist, k - 1, axis=1)[:, k - 1]
    neighborhood = dist <= kdist[:, None]
    counts = neighborhood.sum(axis=1)
    reach = np.maximum(kdist[None, :], dist)
    mean_reach = np.where(neighborhood, reach, 0.0).sum(axis=1) / counts
    lrd = 1.0 / (mean_reach + LRD_EPSILON)

    return LofModel(
        train=z,
        k=k,
        metric=metric,
        threshold=threshold,
        kdist=kdist,
        lrd=lrd,
        scaler_mean=mean,
        scaler_std=std,
        standardized=standardize,
    )
