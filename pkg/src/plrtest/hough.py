"""Pupil sizing by Circular Hough Transform.

Edge pixels (Sobel magnitude over a threshold) vote for every (cx, cy, r)
cell whose circle passes through them; the best-supported cell is the
measurement. Runs full-frame or on the quarter crop around a Starburst hint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import backend
from .errors import HintRequiredError, NoCircleError
from .frame import CropWindow, Frame, quarter_crop


@dataclass(frozen=True)
class HoughConfig:
    # defaults pinned by the `calibrate` grid search over synthetic fixtures
    canny_threshold: float = 150.0
    accumulator_threshold: int = 20
    accumulator_bin: int = 1
    r_min_frac: float = 0.05
    r_max: float | None = None  # None = full-image rule: min(W, H) / 2

    def __post_init__(self):
        if not 0 < self.r_min_frac < 1:
            raise ValueError("r_min_frac must lie in (0, 1)")
        if self.accumulator_bin < 1:
            raise ValueError("accumulator_bin must be >= 1")
        if self.accumulator_threshold < 1:
            raise ValueError("accumulator_threshold must be >= 1")


@dataclass(frozen=True)
class CircleMeasure:
    cx: float
    cy: float
    radius: float
    votes: int


def edge_map(frame: Frame, cfg: HoughConfig) -> np.ndarray:
    """Binary edge map: Sobel gradient magnitude >= canny_threshold.

    Border pixels are never edges; zero-gradient pixels are never edges
    (so a threshold of 0 marks exactly the pixels with any gradient).
    """
    p = frame.pixels.astype(np.int32)
    edges = np.zeros(p.shape, dtype=bool)
    if p.shape[0] < 3 or p.shape[1] < 3:
        return edges
    gx = ((p[:-2, 2:] + 2 * p[1:-1, 2:] + p[2:, 2:])
          - (p[:-2, :-2] + 2 * p[1:-1, :-2] + p[2:, :-2]))
    gy = ((p[2:, :-2] + 2 * p[2:, 1:-1] + p[2:, 2:])
          - (p[:-2, :-2] + 2 * p[:-2, 1:-1] + p[:-2, 2:]))
    mag = np.hypot(gx, gy)
    edges[1:-1, 1:-1] = (mag >= cfg.canny_threshold) & (mag > 0)
    return edges


@lru_cache(maxsize=1024)
def _perimeter_offsets(radius: int) -> tuple[np.ndarray, np.ndarray]:
    """Distinct integer pixel offsets on the circle of ``radius``, in a fixed order."""
    n = max(8, int(math.ceil(4 * math.pi * radius)))  # ~0.5 px arc steps: no gaps
    theta = np.arange(n) * (2.0 * math.pi / n)
    dx = np.rint(radius * np.cos(theta)).astype(np.int64)
    dy = np.rint(radius * np.sin(theta)).astype(np.int64)
    span = 2 * radius + 1
    key = (dy + radius) * span + (dx + radius)
    key = np.unique(key)
    out_dy = (key // span - radius).astype(np.int32)
    out_dx = (key % span - radius).astype(np.int32)
    return out_dx, out_dy


def _candidate_radii(r_min: float, r_max: float, step: int) -> list[int]:
    lo = math.ceil(r_min)
    hi = math.floor(r_max)
    return list(range(max(lo, 1), hi + 1, step))


def cht_accumulator(edges: np.ndarray, radii: list[int], cell: int) -> np.ndarray:
    """Raw vote array acc[radius_index, y_cell, x_cell] (exposed for debugging)."""
    ys, xs = np.nonzero(edges)
    dxs, dys, starts = [], [], [0]
    for r in radii:
        dx, dy = _perimeter_offsets(r)
        dxs.append(dx)
        dys.append(dy)
        starts.append(starts[-1] + len(dx))
    return backend.cht_votes(
        ys.astype(np.int32), xs.astype(np.int32),
        edges.shape[0], edges.shape[1],
        np.concatenate(dxs), np.concatenate(dys),
        np.asarray(starts, dtype=np.int32), cell)


def cht_detect(edges: np.ndarray, r_min: float, r_max: float,
               cfg: HoughConfig) -> CircleMeasure:
    """Peak of the vote space, provided it reaches accumulator_threshold.

    Ties break toward the smaller radius, then smaller (cy, cx): the pupil is
    the innermost compact circle.
    """
    if r_min >= r_max:
        raise ValueError(f"need r_min < r_max, got [{r_min}, {r_max}]")
    if not edges.any():
        raise NoCircleError("no edge pixels to vote")
    radii = _candidate_radii(r_min, r_max, cfg.accumulator_bin)
    if not radii:
        raise NoCircleError(f"no integer radius candidates in [{r_min}, {r_max}]")
    acc = cht_accumulator(edges, radii, cfg.accumulator_bin)
    votes = int(acc.max())
    if votes < cfg.accumulator_threshold:
        raise NoCircleError(f"best cell has {votes} votes, "
                            f"below threshold {cfg.accumulator_threshold}")
    # argwhere is row-major: first hit is smallest radius index, then cy, then cx
    ri, cy, cx = np.argwhere(acc == votes)[0]
    half = cfg.accumulator_bin // 2
    return CircleMeasure(cx=float(cx * cfg.accumulator_bin + half),
                         cy=float(cy * cfg.accumulator_bin + half),
                         radius=float(radii[ri]), votes=votes)


def _search_range(width: int, height: int, cfg: HoughConfig) -> tuple[float, float]:
    r_max = cfg.r_max if cfg.r_max is not None else min(width, height) / 2
    return cfg.r_min_frac * r_max, r_max


def measure_pupil(frame: Frame, center_hint: tuple[float, float] | None,
                  cfg: HoughConfig, crop: bool) -> CircleMeasure:
    """Measure the pupil circle, optionally on the quarter crop around the hint.

    Cropping keeps surrounding structures out of the vote space; the result is
    always reported in parent-frame coordinates.
    """
    if not crop:
        r_min, r_max = _search_range(frame.width, frame.height, cfg)
        return cht_detect(edge_map(frame, cfg), r_min, r_max, cfg)
    if center_hint is None:
        raise HintRequiredError("cropped measurement needs a center hint")
    sub, window = quarter_crop(frame, center_hint)
    r_min, r_max = _search_range(sub.width, sub.height, cfg)
    local = cht_detect(edge_map(sub, cfg), r_min, r_max, cfg)
    px, py = window.to_parent(local.cx, local.cy)
    return CircleMeasure(cx=px, cy=py, radius=local.radius, votes=local.votes)


def accumulator_heatmap(edges: np.ndarray, r_min: float, r_max: float,
                        cfg: HoughConfig) -> Frame:
    """Max-over-radii vote projection rescaled to 8 bits (debug aid)."""
    radii = _candidate_radii(r_min, r_max, cfg.accumulator_bin)
    acc = cht_accumulator(edges, radii, cfg.accumulator_bin).max(axis=0)
    top = max(int(acc.max()), 1)
    return Frame(pixels=(acc * 255 // top).astype(np.uint8))
