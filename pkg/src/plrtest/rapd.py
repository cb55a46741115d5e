"""Right/left reflex dissimilarity index and RAPD classification.

The index is one minus the absolute correlation (Spearman or Pearson)
between the paired radius series: matched reflexes score near zero, an
afferent defect weakens the relationship and pushes the index up.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateSeriesError
from .trace import PupilTrace, TraceConfig, median_smooth, motion_filter, pair_traces

MIN_PAIRED_LENGTH = 3


class DissimilarityKind(Enum):
    SRCC = "srcc"
    PLCC = "plcc"


@dataclass(frozen=True)
class PipelineConfig:
    """One cell of the crop x motion x smoothing x kind configuration grid."""

    crop: bool = True
    motion: bool = False
    smoothing: bool = False
    kind: DissimilarityKind = DissimilarityKind.PLCC

    @property
    def config_id(self) -> str:
        return "-".join([
            "crop" if self.crop else "full",
            "motion" if self.motion else "nomotion",
            "smooth" if self.smoothing else "nosmooth",
            self.kind.value,
        ])


@dataclass(frozen=True)
class RapdAssessment:
    index: float
    config: PipelineConfig
    classified_positive: bool | None
    threshold_used: float | None
    sample_count: int

    def to_json(self) -> str:
        return json.dumps({
            "index": self.index,
            "kind": self.config.kind.value,
            "crop": self.config.crop,
            "motion": self.config.motion,
            "smoothing": self.config.smoothing,
            "positive": self.classified_positive,
            "threshold": self.threshold_used,
            "samples": self.sample_count,
        })


def _check_series(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or len(a) != len(b):
        raise ValueError("series must be 1-D and equally long")
    if len(a) < MIN_PAIRED_LENGTH:
        raise DegenerateSeriesError(f"need at least {MIN_PAIRED_LENGTH} paired "
                                    f"samples, got {len(a)}")
    return a, b


def plcc(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson linear correlation coefficient."""
    a, b = _check_series(a, b)
    da = a - a.mean()
    db = b - b.mean()
    denom = np.sqrt((da * da).sum() * (db * db).sum())
    if denom == 0.0:
        raise DegenerateSeriesError("zero variance series has no linear correlation")
    if np.array_equal(a, b):
        return 1.0  # exact, so identical reflexes score dissimilarity 0 exactly
    return float(np.clip((da * db).sum() / denom, -1.0, 1.0))


def _average_ranks(x: np.ndarray) -> np.ndarray:
    """Ranks 1..n with tied values sharing the average of their positions."""
    order = np.argsort(x, kind="stable")
    sx = x[order]
    # rank of each sorted run = mean of the positions it occupies
    boundaries = np.flatnonzero(np.diff(sx) != 0) + 1
    starts = np.concatenate([[0], boundaries])
    ends = np.concatenate([boundaries, [len(x)]])
    ranks = np.empty(len(x), dtype=np.float64)
    for s, e in zip(starts, ends):
        ranks[order[s:e]] = (s + e + 1) / 2.0
    return ranks


def srcc(a: np.ndarray, b: np.ndarray) -> float:
    """Spearman rank correlation: Pearson correlation of average ranks."""
    a, b = _check_series(a, b)
    if len(np.unique(a)) < 2 or len(np.unique(b)) < 2:
        raise DegenerateSeriesError("constant series has no rank correlation")
    return plcc(_average_ranks(a), _average_ranks(b))


def dissimilarity(a: np.ndarray, b: np.ndarray, kind: DissimilarityKind) -> float:
    """1 - |corr|, in [0, 1]. Symmetric; near zero for matched reflexes."""
    corr = srcc(a, b) if kind is DissimilarityKind.SRCC else plcc(a, b)
    return 1.0 - abs(corr)


def assess(right: PupilTrace, left: PupilTrace, cfg: PipelineConfig,
           threshold: float | None = None,
           trace_cfg: TraceConfig | None = None) -> RapdAssessment:
    """Post-process both traces per the configuration, pair them, and score.

    ``classified_positive`` is index > threshold when a threshold is given
    (high dissimilarity means defect), else None.
    """
    trace_cfg = trace_cfg or TraceConfig()
    if cfg.motion:
        right = motion_filter(right, trace_cfg)
        left = motion_filter(left, trace_cfg)
    if cfg.smoothing:
        right = median_smooth(right, trace_cfg)
        left = median_smooth(left, trace_cfg)
    series_r, series_l = pair_traces(right, left)
    index = dissimilarity(series_r, series_l, cfg.kind)
    return RapdAssessment(
        index=index,
        config=cfg,
        classified_positive=(index > threshold) if threshold is not None else None,
        threshold_used=threshold,
        sample_count=len(series_r),
    )
