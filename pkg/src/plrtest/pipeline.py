"""Frame-to-trace wiring: run Starburst + Hough over a sequence.

Detection failures become invalid samples, never exceptions: blinks and
glitches are data for the downstream filters, not fatal errors.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable

from .errors import NoCircleError
from .frame import Eye, Frame, load_sequence
from .hough import HoughConfig, measure_pupil
from .starburst import StarburstConfig, locate_pupil
from .trace import PupilSample, PupilTrace


def worker_count(requested: int | None = None) -> int:
    """Bounded pool size; the PLRTEST_THREADS environment variable caps it."""
    count = requested if requested and requested > 0 else (os.cpu_count() or 1)
    cap = os.environ.get("PLRTEST_THREADS")
    if cap:
        count = min(count, max(int(cap), 1))
    return max(count, 1)


def detect_frame(frame: Frame, index: int, crop: bool,
                 sb_cfg: StarburstConfig, hough_cfg: HoughConfig) -> PupilSample:
    """Measure one frame. Cropped mode needs a valid Starburst fix first;
    full-frame mode goes straight to the Hough transform."""
    hint = None
    if crop:
        est = locate_pupil(frame, sb_cfg)
        if not est.valid:
            return PupilSample(frame_index=index, cx=0.0, cy=0.0, radius=0.0, valid=False)
        hint = (est.x, est.y)
    try:
        circle = measure_pupil(frame, hint, hough_cfg, crop=crop)
    except NoCircleError:
        return PupilSample(frame_index=index, cx=0.0, cy=0.0, radius=0.0, valid=False)
    return PupilSample(frame_index=index, cx=circle.cx, cy=circle.cy,
                       radius=circle.radius, valid=True)


def _detect_chunk(args) -> list[PupilSample]:
    directory, eye_value, indices, crop, sb_cfg, hough_cfg = args
    seq = load_sequence(directory, Eye(eye_value))
    return [detect_frame(seq.frames[i], i, crop, sb_cfg, hough_cfg) for i in indices]


def detect_directory(directory: str | Path, eye: Eye, crop: bool,
                     sb_cfg: StarburstConfig | None = None,
                     hough_cfg: HoughConfig | None = None,
                     workers: int = 1,
                     progress: Callable[[int, int], None] | None = None) -> PupilTrace:
    """Detect every frame of one eye directory, in index order."""
    sb_cfg = sb_cfg or StarburstConfig()
    hough_cfg = hough_cfg or HoughConfig()
    seq = load_sequence(directory, eye)
    n = len(seq)
    if workers > 1 and n >= 2 * workers:
        chunk = -(-n // workers)
        jobs = [(str(directory), eye.value, list(range(lo, min(lo + chunk, n))),
                 crop, sb_cfg, hough_cfg) for lo in range(0, n, chunk)]
        samples: list[PupilSample] = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_detect_chunk, jobs):
                samples.extend(part)
                if progress:
                    progress(len(samples), n)
    else:
        samples = []
        for i, frame in enumerate(seq.frames):
            samples.append(detect_frame(frame, i, crop, sb_cfg, hough_cfg))
            if progress and (i + 1) % 100 == 0:
                progress(i + 1, n)
    return PupilTrace(eye=eye, samples=tuple(samples), frame_rate=seq.frame_rate)
