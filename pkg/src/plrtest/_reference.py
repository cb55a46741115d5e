"""Pure-numpy implementations of the hot per-frame kernels.

Wire-compatible with the compiled module ``plrtest._native``; both must
produce bit-identical outputs so that tie-breaking downstream stays
deterministic regardless of which backend is active.
"""

from __future__ import annotations

import numpy as np

NATIVE = False


def ray_profiles(img: np.ndarray, cx: float, cy: float, angles: np.ndarray,
                 step: float, max_steps: int) -> tuple[np.ndarray, np.ndarray]:
    """March each ray from (cx, cy) and record directional intensity steps.

    Sample k of ray r sits at (cx, cy) + k*step*(cos a_r, sin a_r),
    nearest-neighbor sampled. diffs[r, k-1] = I(sample_k) - I(sample_{k-1});
    counts[r] is the number of diffs recorded before the march left the frame.
    """
    h, w = img.shape
    n = len(angles)
    ks = np.arange(max_steps + 1, dtype=np.float64)  # sample 0 is the origin
    px = cx + np.cos(angles)[:, None] * ks[None, :] * step
    py = cy + np.sin(angles)[:, None] * ks[None, :] * step
    ix = np.rint(px).astype(np.int64)
    iy = np.rint(py).astype(np.int64)
    inside = (ix >= 0) & (ix <= w - 1) & (iy >= 0) & (iy <= h - 1)
    # first out-of-frame sample ends the march for that ray
    alive = np.logical_and.accumulate(inside, axis=1)
    counts = (alive.sum(axis=1) - 1).clip(min=0).astype(np.int32)
    samples = img[iy.clip(0, h - 1), ix.clip(0, w - 1)].astype(np.int16)
    diffs = samples[:, 1:] - samples[:, :-1]
    dead = ~alive[:, 1:]
    diffs[dead] = 0
    return np.ascontiguousarray(diffs), counts


def cht_votes(ys: np.ndarray, xs: np.ndarray, h: int, w: int,
              off_dx: np.ndarray, off_dy: np.ndarray, off_starts: np.ndarray,
              cell: int) -> np.ndarray:
    """Accumulate circle votes: acc[radius, y_cell, x_cell].

    Offsets are the precomputed perimeter pixels for each candidate radius,
    packed flat with off_starts delimiting radius slices. Votes land in a
    frame padded by the largest radius (so no bounds filtering is needed);
    out-of-frame votes disappear when the padding is sliced off, and
    in-frame votes bin into cells of ``cell`` pixels.
    """
    hc = -(-h // cell)
    wc = -(-w // cell)
    n_r = len(off_starts) - 1
    pad = max(1, int(np.abs(off_dx).max(initial=0)), int(np.abs(off_dy).max(initial=0)))
    h2, w2 = h + 2 * pad, w + 2 * pad
    acc = np.zeros((n_r, hc, wc), dtype=np.int32)
    base = (ys.astype(np.int64) + pad) * w2 + (xs.astype(np.int64) + pad)
    for ri in range(n_r):
        lo, hi = off_starts[ri], off_starts[ri + 1]
        doff = off_dy[lo:hi].astype(np.int64) * w2 + off_dx[lo:hi]
        flat = (base[:, None] + doff[None, :]).ravel()
        padded = np.bincount(flat, minlength=h2 * w2).reshape(h2, w2)
        inframe = padded[pad : pad + h, pad : pad + w]
        if cell == 1:
            acc[ri] = inframe
        else:
            tiled = np.zeros((hc * cell, wc * cell), dtype=np.int64)
            tiled[:h, :w] = inframe
            acc[ri] = tiled.reshape(hc, cell, wc, cell).sum(axis=(1, 3))
    return acc
