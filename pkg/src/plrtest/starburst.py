"""Starburst pupil-center localization.

Four stages: start from the frame center, march rays outward collecting
dark-to-bright gradient crossings, reiterate the ray cast over a descending
gradient-threshold sweep (re-centering on each accepted iteration), and
average every collected feature point into the final estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .frame import Frame


@dataclass(frozen=True)
class StarburstConfig:
    num_rays: int = 18
    ray_step: float = 1.0
    threshold_max: int = 255
    threshold_min: int = 0
    threshold_step: int = 5
    min_feature_points: int = 3

    def __post_init__(self):
        if self.num_rays < 4:
            raise ValueError("num_rays must be >= 4")
        if self.threshold_max <= self.threshold_min:
            raise ValueError("threshold_max must exceed threshold_min")
        if self.threshold_step < 1:
            raise ValueError("threshold_step must be >= 1")
        if self.ray_step <= 0:
            raise ValueError("ray_step must be positive")
        if self.min_feature_points < 1:
            raise ValueError("min_feature_points must be >= 1")


@dataclass(frozen=True)
class FeaturePoint:
    """Boundary crossing found along one ray."""

    x: float
    y: float
    gradient: int
    ray_angle: float


@dataclass(frozen=True)
class PupilCenterEstimate:
    x: float
    y: float
    valid: bool
    feature_count: int


def init_center(frame: Frame) -> tuple[int, int]:
    """Initial pupil guess: the frame center (pupils sit centrally in headset video)."""
    return frame.width // 2, frame.height // 2


def _max_steps(frame: Frame, step: float) -> int:
    return int(math.ceil(math.hypot(frame.width, frame.height) / step)) + 2


def _ray_angles(num_rays: int) -> np.ndarray:
    return np.arange(num_rays, dtype=np.float64) * (2.0 * math.pi / num_rays)


def _scan(diffs: np.ndarray, counts: np.ndarray, angles: np.ndarray,
          origin: tuple[float, float], step: float, threshold: int) -> list[FeaturePoint]:
    # padded entries past counts are zero and threshold >= 0, so they never trigger
    hits = diffs > threshold
    idx = hits.argmax(axis=1)
    rows = np.arange(diffs.shape[0])
    found = hits[rows, idx]
    ox, oy = origin
    out = []
    for r in np.flatnonzero(found):
        k = idx[r] + 1  # diff j belongs to sample j+1
        out.append(FeaturePoint(
            x=ox + k * step * math.cos(angles[r]),
            y=oy + k * step * math.sin(angles[r]),
            gradient=int(diffs[r, idx[r]]),
            ray_angle=float(angles[r]),
        ))
    return out


def cast_ray(frame: Frame, origin: tuple[float, float], angle: float,
             threshold: int, cfg: StarburstConfig | None = None) -> FeaturePoint | None:
    """March one ray; return the first point whose directional intensity step
    (current sample minus previous) exceeds ``threshold``, or None when the
    ray leaves the frame first."""
    cfg = cfg or StarburstConfig()
    if not frame.contains(*origin):
        raise ValueError(f"ray origin {origin} outside frame")
    if not 0 <= threshold <= 255:
        raise ValueError("threshold must lie in [0, 255]")
    angles = np.array([angle], dtype=np.float64)
    diffs, counts = backend.ray_profiles(frame.pixels, origin[0], origin[1],
                                         angles, cfg.ray_step, _max_steps(frame, cfg.ray_step))
    pts = _scan(diffs, counts, angles, origin, cfg.ray_step, threshold)
    return pts[0] if pts else None


def detect_features(frame: Frame, center: tuple[float, float], threshold: int,
                    cfg: StarburstConfig) -> list[FeaturePoint]:
    """Cast cfg.num_rays equally spaced rays from ``center`` (first at angle 0)
    and collect every crossing, in ray order."""
    if not frame.contains(*center):
        raise ValueError(f"ray origin {center} outside frame")
    angles = _ray_angles(cfg.num_rays)
    diffs, counts = backend.ray_profiles(frame.pixels, center[0], center[1],
                                         angles, cfg.ray_step, _max_steps(frame, cfg.ray_step))
    return _scan(diffs, counts, angles, center, cfg.ray_step, threshold)


def locate_pupil(frame: Frame, cfg: StarburstConfig | None = None) -> PupilCenterEstimate:
    estimate, _ = locate_pupil_features(frame, cfg)
    return estimate


def locate_pupil_features(
    frame: Frame, cfg: StarburstConfig | None = None,
) -> tuple[PupilCenterEstimate, list[FeaturePoint]]:
    """Run the full sweep and also return the collected feature points
    (for the CLI debug dump)."""
    cfg = cfg or StarburstConfig()
    angles = _ray_angles(cfg.num_rays)
    max_steps = _max_steps(frame, cfg.ray_step)
    init = init_center(frame)
    center: tuple[float, float] = (float(init[0]), float(init[1]))

    # ray samples depend only on the current center, not the threshold, so
    # profiles are recomputed only when an accepted iteration moves the center
    diffs, counts = backend.ray_profiles(frame.pixels, center[0], center[1],
                                         angles, cfg.ray_step, max_steps)
    collected: list[FeaturePoint] = []
    for t in range(cfg.threshold_max, cfg.threshold_min - 1, -cfg.threshold_step):
        feats = _scan(diffs, counts, angles, center, cfg.ray_step, t)
        if len(feats) < cfg.min_feature_points:
            continue
        collected.extend(feats)
        center = (float(np.mean([f.x for f in feats])),
                  float(np.mean([f.y for f in feats])))
        diffs, counts = backend.ray_profiles(frame.pixels, center[0], center[1],
                                             angles, cfg.ray_step, max_steps)

    if len(collected) >= cfg.min_feature_points:
        estimate = PupilCenterEstimate(
            x=float(np.mean([f.x for f in collected])),
            y=float(np.mean([f.y for f in collected])),
            valid=True,
            feature_count=len(collected),
        )
    else:
        estimate = PupilCenterEstimate(x=float(init[0]), y=float(init[1]),
                                       valid=False, feature_count=len(collected))
    return estimate, collected
