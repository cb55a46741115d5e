from __future__ import annotations

import numpy as np
import pytest

from plrtest.frame import Frame


def disc_frame(w: int, h: int, cx: float, cy: float, radius: float,
               fg: int = 30, bg: int = 200, noise_sigma: float = 0.0,
               seed: int = 0) -> Frame:
    """Dark disc on a bright field, optionally with clamped Gaussian noise."""
    yy, xx = np.ogrid[0:h, 0:w]
    img = np.full((h, w), bg, dtype=np.float64)
    img[(xx - cx) ** 2 + (yy - cy) ** 2 <= radius ** 2] = fg
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        img += rng.normal(0.0, noise_sigma, size=img.shape)
    return Frame(pixels=np.clip(np.rint(img), 0, 255).astype(np.uint8))


def brow_scene(w: int = 320, h: int = 240, cx: float = 160.0, cy: float = 180.0,
               radius: float = 35.0, noise_sigma: float = 0.0,
               seed: int = 0) -> Frame:
    """Disc plus a brow-like dark blob cut by the top border. The blob's
    boundary carries more coherent circle evidence than the pupil, so
    full-frame voting locks onto it while the quarter crop excludes it."""
    yy, xx = np.ogrid[0:h, 0:w]
    img = np.full((h, w), 200, dtype=np.float64)
    img[(xx - w / 2.0) ** 2 + (yy - 10.0) ** 2 <= 100.0 ** 2] = 40
    img[(xx - cx) ** 2 + (yy - cy) ** 2 <= radius ** 2] = 30
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        img += rng.normal(0.0, noise_sigma, size=img.shape)
    return Frame(pixels=np.clip(np.rint(img), 0, 255).astype(np.uint8))


@pytest.fixture
def disc_320x240() -> Frame:
    return disc_frame(320, 240, 160, 120, 40)
