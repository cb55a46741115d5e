"""Backend parity: the compiled kernels and the numpy fallback must agree
bit for bit, so detection results do not depend on which one is loaded."""

from __future__ import annotations

import numpy as np
import pytest

from plrtest import _reference, backend

try:
    from plrtest import _native
except ImportError:
    _native = None

needs_native = pytest.mark.skipif(_native is None, reason="compiled kernels absent")


def random_offsets(rng, radii):
    from plrtest.hough import _perimeter_offsets

    dxs, dys, starts = [], [], [0]
    for r in radii:
        dx, dy = _perimeter_offsets(r)
        dxs.append(dx)
        dys.append(dy)
        starts.append(starts[-1] + len(dx))
    return (np.concatenate(dxs), np.concatenate(dys),
            np.asarray(starts, dtype=np.int32))


@needs_native
def test_ray_profiles_parity():
    rng = np.random.default_rng(1)
    for _ in range(20):
        h, w = int(rng.integers(4, 90)), int(rng.integers(4, 90))
        img = rng.integers(0, 256, size=(h, w), dtype=np.uint8)
        cx = float(rng.uniform(0, w - 1))
        cy = float(rng.uniform(0, h - 1))
        angles = rng.uniform(0, 2 * np.pi, size=int(rng.integers(1, 24)))
        step = float(rng.uniform(0.5, 2.0))
        max_steps = int(np.ceil(np.hypot(w, h) / step)) + 2
        d1, c1 = _native.ray_profiles(img, cx, cy, angles, step, max_steps)
        d2, c2 = _reference.ray_profiles(img, cx, cy, angles, step, max_steps)
        assert np.array_equal(c1, c2)
        assert np.array_equal(d1, d2)


@needs_native
def test_cht_votes_parity():
    rng = np.random.default_rng(2)
    for cell in (1, 2, 3):
        for _ in range(8):
            h, w = int(rng.integers(20, 120)), int(rng.integers(20, 120))
            edges = rng.random((h, w)) < 0.03
            ys, xs = np.nonzero(edges)
            ys = ys.astype(np.int32)
            xs = xs.astype(np.int32)
            radii = sorted(rng.choice(np.arange(2, min(h, w)), size=4, replace=False))
            dx, dy, starts = random_offsets(rng, [int(r) for r in radii])
            a1 = _native.cht_votes(ys, xs, h, w, dx, dy, starts, cell)
            a2 = _reference.cht_votes(ys, xs, h, w, dx, dy, starts, cell)
            assert np.array_equal(a1, a2)


def test_ray_profiles_stops_at_border():
    img = np.full((10, 40), 50, dtype=np.uint8)
    diffs, counts = backend.ray_profiles(img, 20.0, 5.0,
                                         np.array([0.0, np.pi]), 1.0, 100)
    assert counts[0] == 19  # 20 -> 39
    assert counts[1] == 20  # 20 -> 0
    assert not diffs.any()


def test_ray_profiles_reads_directional_step():
    img = np.full((5, 30), 10, dtype=np.uint8)
    img[:, 15:] = 210
    diffs, counts = backend.ray_profiles(img, 5.0, 2.0, np.array([0.0]), 1.0, 60)
    j = int(np.argmax(diffs[0] > 0))
    assert diffs[0, j] == 200
    assert j + 1 + 5 == 15  # sample j+1 sits on the bright side


def test_cht_votes_counts_total():
    # every vote lands somewhere: total votes = edges x offsets minus the
    # ones falling outside the frame
    edges = np.zeros((30, 30), dtype=bool)
    edges[15, 15] = True
    rng = np.random.default_rng(3)
    dx, dy, starts = random_offsets(rng, [5])
    acc = backend.cht_votes(np.array([15], np.int32), np.array([15], np.int32),
                            30, 30, dx, dy, starts, 1)
    assert acc.sum() == len(dx)  # radius 5 circle fits entirely
    ys, xs = np.nonzero(acc[0])
    assert np.allclose(np.hypot(xs - 15, ys - 15), 5, atol=0.8)


def test_pure_env_forces_reference_backend():
    import subprocess
    import sys

    out = subprocess.run(
        [sys.executable, "-c", "import plrtest; print(plrtest.NATIVE)"],
        capture_output=True, text=True, env={"PLRTEST_PURE": "1", "PATH": "/usr/bin:/bin"})
    assert out.stdout.strip() == "False"
