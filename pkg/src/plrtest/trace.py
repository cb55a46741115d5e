"""Per-eye pupil trace assembly and post-processing.

Post-processing invalidates samples whose center strays outside the
allowed motion band around the mean location, then median-smooths the
radius series of the surviving samples. Samples are flagged, never
deleted, so right/left traces stay index-aligned for pairing.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.ndimage import median_filter

from .errors import EmptyTraceError, NoOverlapError
from .frame import Eye

TRACE_FIELDS = ["frame_index", "cx", "cy", "radius", "valid"]


@dataclass(frozen=True)
class PupilSample:
    frame_index: int
    cx: float
    cy: float
    radius: float
    valid: bool


@dataclass(frozen=True)
class PupilTrace:
    eye: Eye
    samples: tuple[PupilSample, ...]
    frame_rate: float = 30.0

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        idx = [s.frame_index for s in self.samples]
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("frame_index must be strictly increasing")

    def valid_samples(self) -> list[PupilSample]:
        return [s for s in self.samples if s.valid]


@dataclass(frozen=True)
class TraceConfig:
    motion_band_frac: float = 0.05
    smooth_window: int = 3
    motion_filter: bool = True
    smoothing: bool = True
    # alternative reading of the motion rule: invalidate only when BOTH axes
    # stray (default invalidates on either axis)
    motion_require_both: bool = False

    def __post_init__(self):
        if not 0 < self.motion_band_frac < 1:
            raise ValueError("motion_band_frac must lie in (0, 1)")
        if self.smooth_window < 1 or self.smooth_window % 2 == 0:
            raise ValueError("smooth_window must be odd and >= 1")


def motion_filter(trace: PupilTrace, cfg: TraceConfig) -> PupilTrace:
    """Invalidate samples outside the +/- motion_band_frac band around the
    mean center location (single pass: the mean is computed once, over the
    samples valid on entry)."""
    valid = trace.valid_samples()
    if not valid:
        raise EmptyTraceError("motion filter needs at least one valid sample")
    mean_x = float(np.mean([s.cx for s in valid]))
    mean_y = float(np.mean([s.cy for s in valid]))
    band_x = cfg.motion_band_frac * mean_x
    band_y = cfg.motion_band_frac * mean_y

    out = []
    for s in trace.samples:
        if s.valid:
            off_x = abs(s.cx - mean_x) > band_x
            off_y = abs(s.cy - mean_y) > band_y
            off = (off_x and off_y) if cfg.motion_require_both else (off_x or off_y)
            if off:
                s = replace(s, valid=False)
        out.append(s)
    return replace(trace, samples=tuple(out))


def median_smooth(trace: PupilTrace, cfg: TraceConfig) -> PupilTrace:
    """Median-filter the radius series of the valid samples (replicate-padded
    ends); invalid samples are untouched and excluded from every window."""
    valid_idx = [i for i, s in enumerate(trace.samples) if s.valid]
    if not valid_idx:
        return trace
    radii = np.array([trace.samples[i].radius for i in valid_idx], dtype=np.float64)
    smooth = median_filter(radii, size=cfg.smooth_window, mode="nearest")
    out = list(trace.samples)
    for i, r in zip(valid_idx, smooth):
        out[i] = replace(out[i], radius=float(r))
    return replace(trace, samples=tuple(out))


def postprocess(trace: PupilTrace, cfg: TraceConfig) -> PupilTrace:
    """Apply the configured steps in pipeline order: motion filter, then smoothing."""
    if cfg.motion_filter:
        trace = motion_filter(trace, cfg)
    if cfg.smoothing:
        trace = median_smooth(trace, cfg)
    return trace


def pair_traces(right: PupilTrace, left: PupilTrace) -> tuple[np.ndarray, np.ndarray]:
    """Radius series restricted to frame indices valid in BOTH traces,
    in index order (pairwise deletion)."""
    r_by_idx = {s.frame_index: s.radius for s in right.valid_samples()}
    l_by_idx = {s.frame_index: s.radius for s in left.valid_samples()}
    common = sorted(r_by_idx.keys() & l_by_idx.keys())
    if not common:
        raise NoOverlapError("no frame index is valid in both traces")
    return (np.array([r_by_idx[i] for i in common], dtype=np.float64),
            np.array([l_by_idx[i] for i in common], dtype=np.float64))


def save_trace_csv(trace: PupilTrace, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_FIELDS)
        for s in trace.samples:
            writer.writerow([s.frame_index, f"{s.cx:.3f}", f"{s.cy:.3f}",
                             f"{s.radius:.3f}", int(s.valid)])


def load_trace_csv(path: str | Path, eye: Eye = Eye.RIGHT,
                   frame_rate: float = 30.0) -> PupilTrace:
    samples = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            samples.append(PupilSample(
                frame_index=int(row["frame_index"]),
                cx=float(row["cx"]), cy=float(row["cy"]),
                radius=float(row["radius"]),
                valid=row["valid"].strip() in ("1", "true", "True"),
            ))
    return PupilTrace(eye=eye, samples=tuple(samples), frame_rate=frame_rate)
