#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Runs the two hot per-frame kernels (Starburst ray profiling, Hough voting)
and the full per-frame detection path through both backends on a
representative synthetic eye frame.

Usage: python benchmarks/bench_kernels.py [--frame-size WxH] [--repeats N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from plrtest import _reference
from plrtest.frame import Frame
from plrtest.hough import HoughConfig, _perimeter_offsets, edge_map
from plrtest.synth import RenderParams, render_frame

try:
    from plrtest import _native
except ImportError:
    _native = None


def timeit(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def packed_offsets(radii):
    dxs, dys, starts = [], [], [0]
    for r in radii:
        dx, dy = _perimeter_offsets(r)
        dxs.append(dx)
        dys.append(dy)
        starts.append(starts[-1] + len(dx))
    return (np.concatenate(dxs), np.concatenate(dys),
            np.asarray(starts, dtype=np.int32))


def bench_backend(name, impl, frame: Frame, repeats: int) -> None:
    h, w = frame.pixels.shape
    angles = np.arange(18, dtype=np.float64) * (2 * np.pi / 18)
    max_steps = int(np.ceil(np.hypot(w, h))) + 2

    t_rays = timeit(lambda: impl.ray_profiles(
        frame.pixels, w / 2.0, h / 2.0, angles, 1.0, max_steps), repeats)

    cfg = HoughConfig()
    edges = edge_map(frame, cfg)
    ys, xs = np.nonzero(edges)
    ys = ys.astype(np.int32)
    xs = xs.astype(np.int32)
    radii = list(range(max(int(0.05 * min(w, h) / 2), 1), min(w, h) // 2 + 1))
    dx, dy, starts = packed_offsets(radii)
    t_votes = timeit(lambda: impl.cht_votes(ys, xs, h, w, dx, dy, starts, 1),
                     repeats)

    votes = len(ys) * len(dx) / len(radii) * len(radii)  # total vote count
    print(f"  {name:10s} ray_profiles {t_rays * 1e3:8.2f} ms   "
          f"cht_votes {t_votes * 1e3:8.2f} ms "
          f"({len(ys)} edges x {len(radii)} radii, "
          f"{votes / max(t_votes, 1e-9) / 1e6:.0f} Mvotes/s)")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--frame-size", default="320x240")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    w, h = (int(v) for v in args.frame_size.lower().split("x"))

    rp = RenderParams(noise_sigma=5.0, seed=1).scaled_to(w, h)
    frame = render_frame(0.6 * rp.iris_radius / 2, rp)
    print(f"synthetic eye frame {w}x{h}, best of {args.repeats}")

    if _native is not None:
        bench_backend("native", _native, frame, args.repeats)
    else:
        print("  native     (extension not built)")
    bench_backend("reference", _reference, frame, args.repeats)


if __name__ == "__main__":
    main()
