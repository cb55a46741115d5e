from __future__ import annotations

import math

import numpy as np
import pytest

from plrtest.errors import HintRequiredError, NoCircleError
from plrtest.frame import Frame
from plrtest.hough import (
    HoughConfig,
    _perimeter_offsets,
    _search_range,
    cht_detect,
    edge_map,
    measure_pupil,
)
from plrtest.starburst import locate_pupil

from conftest import brow_scene, disc_frame


def rasterized_circle_edges(w, h, cx, cy, r):
    edges = np.zeros((h, w), dtype=bool)
    dx, dy = _perimeter_offsets(r)
    edges[cy + dy, cx + dx] = True
    return edges


def test_edge_map_uniform_is_empty():
    f = Frame(pixels=np.full((40, 60), 128, dtype=np.uint8))
    assert not edge_map(f, HoughConfig()).any()


def test_edge_map_disc_annulus():
    f = disc_frame(200, 200, 100, 100, 40)
    edges = edge_map(f, HoughConfig())
    ys, xs = np.nonzero(edges)
    assert len(ys) > 0
    dist = np.hypot(xs - 100, ys - 100)
    assert np.all(np.abs(dist - 40) <= 2.0)


def test_edge_map_threshold_floor_marks_any_gradient():
    f = disc_frame(50, 50, 25, 25, 10)
    cfg = HoughConfig(canny_threshold=1e-9)
    edges = edge_map(f, cfg)
    p = f.pixels.astype(np.int32)
    gx = ((p[:-2, 2:] + 2 * p[1:-1, 2:] + p[2:, 2:])
          - (p[:-2, :-2] + 2 * p[1:-1, :-2] + p[2:, :-2]))
    gy = ((p[2:, :-2] + 2 * p[2:, 1:-1] + p[2:, 2:])
          - (p[:-2, :-2] + 2 * p[:-2, 1:-1] + p[:-2, 2:]))
    expect = np.zeros_like(edges)
    expect[1:-1, 1:-1] = (gx != 0) | (gy != 0)
    assert np.array_equal(edges, expect)
    assert not edges[0].any() and not edges[-1].any()
    assert not edges[:, 0].any() and not edges[:, -1].any()


def test_edge_map_monotone_under_contrast_boost():
    f = disc_frame(100, 100, 50, 50, 20, fg=90, bg=140)
    cfg = HoughConfig(canny_threshold=120)
    before = edge_map(f, cfg)
    boosted = Frame(pixels=np.clip(f.pixels.astype(np.int32) * 2, 0, 255).astype(np.uint8))
    after = edge_map(boosted, cfg)
    assert np.all(after[before])  # scaling intensities never loses an edge


def test_cht_detect_perfect_circle():
    edges = rasterized_circle_edges(240, 200, 120, 100, 40)
    m = cht_detect(edges, 5, 100, HoughConfig(accumulator_threshold=10))
    assert abs(m.radius - 40) <= 1
    assert math.hypot(m.cx - 120, m.cy - 100) <= 1.0


def test_cht_detect_empty_edges():
    with pytest.raises(NoCircleError):
        cht_detect(np.zeros((50, 50), dtype=bool), 5, 20, HoughConfig())


def test_cht_detect_votes_below_threshold():
    edges = np.zeros((60, 60), dtype=bool)
    edges[30, 30] = True
    with pytest.raises(NoCircleError):
        cht_detect(edges, 5, 20, HoughConfig(accumulator_threshold=50))


def test_cht_detect_larger_concentric_circle_wins():
    edges = (rasterized_circle_edges(200, 200, 100, 100, 20)
             | rasterized_circle_edges(200, 200, 100, 100, 40))
    m = cht_detect(edges, 5, 80, HoughConfig(accumulator_threshold=10))
    assert m.radius == 40


def test_cht_detect_radius_within_range_and_votes():
    edges = rasterized_circle_edges(160, 160, 80, 80, 30)
    cfg = HoughConfig(accumulator_threshold=10)
    m = cht_detect(edges, 8, 60, cfg)
    assert 8 <= m.radius <= 60
    assert m.votes >= cfg.accumulator_threshold


def test_cht_detect_deterministic():
    rng = np.random.default_rng(4)
    edges = rng.random((80, 120)) < 0.03
    cfg = HoughConfig(accumulator_threshold=1)
    a = cht_detect(edges, 3, 30, cfg)
    b = cht_detect(edges, 3, 30, cfg)
    assert a == b


def test_cht_detect_tie_breaks_smaller_radius():
    # two disjoint perfect circles with equal support
    e1 = rasterized_circle_edges(300, 120, 60, 60, 20)
    dx, dy = _perimeter_offsets(20)
    e2 = np.zeros_like(e1)
    e2[60 + dy, 220 + dx] = True
    m = cht_detect(e1 | e2, 5, 50, HoughConfig(accumulator_threshold=10))
    assert m.radius == 20
    assert (m.cx, m.cy) == (60, 60)  # smaller (cy, cx) among equals


def test_search_range_full_image():
    assert _search_range(640, 480, HoughConfig()) == (12.0, 240.0)


def test_measure_pupil_requires_hint_for_crop(disc_320x240):
    with pytest.raises(HintRequiredError):
        measure_pupil(disc_320x240, None, HoughConfig(), crop=True)


def test_measure_pupil_crop_matches_full_without_distractors():
    f = disc_frame(320, 240, 150, 130, 35)
    est = locate_pupil(f)
    cropped = measure_pupil(f, (est.x, est.y), HoughConfig(), crop=True)
    full = measure_pupil(f, None, HoughConfig(), crop=False)
    assert abs(cropped.radius - 35) <= 2
    assert abs(full.radius - 35) <= 2
    assert math.hypot(cropped.cx - full.cx, cropped.cy - full.cy) <= 2.0


def test_measure_pupil_crop_beats_full_on_brow_distractor():
    f = brow_scene()
    est = locate_pupil(f)
    cropped = measure_pupil(f, (est.x, est.y), HoughConfig(), crop=True)
    full = measure_pupil(f, None, HoughConfig(), crop=False)
    assert abs(cropped.radius - 35) <= 2
    assert abs(full.radius - 35) > abs(cropped.radius - 35)


def test_crop_coordinate_roundtrip():
    from plrtest.frame import quarter_crop

    f = disc_frame(320, 240, 110, 95, 30)
    est = locate_pupil(f)
    m = measure_pupil(f, (est.x, est.y), HoughConfig(), crop=True)
    sub, win = quarter_crop(f, (est.x, est.y))
    lx, ly = win.to_local(m.cx, m.cy)
    assert 0 <= lx < sub.width and 0 <= ly < sub.height
    local = cht_detect(edge_map(sub, HoughConfig()),
                       *_search_range(sub.width, sub.height, HoughConfig()),
                       HoughConfig())
    assert (local.cx, local.cy) == (lx, ly)


def test_accumulator_bin_coarsens_but_still_finds_circle():
    f = disc_frame(320, 240, 160, 120, 40)
    m = measure_pupil(f, None, HoughConfig(accumulator_bin=2), crop=False)
    assert abs(m.radius - 40) <= 2
    assert math.hypot(m.cx - 160, m.cy - 120) <= 2.5


def test_config_validation():
    with pytest.raises(ValueError):
        HoughConfig(r_min_frac=0)
    with pytest.raises(ValueError):
        HoughConfig(accumulator_bin=0)
    with pytest.raises(ValueError):
        HoughConfig(accumulator_threshold=0)
