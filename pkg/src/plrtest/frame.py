"""Grayscale frame and sequence containers plus PGM (P5) ingestion/export.

Frames are 8-bit single-channel images stored as row-major numpy arrays.
Sequences are directories of ``frame_NNNNN.pgm`` files (zero-padded,
contiguous from 0) with an optional ``meta.json`` sidecar carrying the
frame rate and eye side.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import FormatError, GapError

DEFAULT_FRAME_RATE = 30.0

_FRAME_NAME = re.compile(r"frame_(\d{5})\.pgm$")


class Eye(Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class Frame:
    """One 8-bit grayscale image. ``pixels`` has shape (height, width)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.size == 0:
            raise ValueError(f"frame pixels must be a non-empty 2-D array, got shape {px.shape}")
        if px.dtype != np.uint8:
            if px.min() < 0 or px.max() > 255:
                raise ValueError("frame intensities must lie in [0, 255]")
            px = px.astype(np.uint8)
        # immutable after construction; safe to share across workers
        px = np.ascontiguousarray(px)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def contains(self, x: float, y: float) -> bool:
        return 0 <= x <= self.width - 1 and 0 <= y <= self.height - 1


@dataclass
class FrameSequence:
    """Ordered frames of one eye recording, all sharing one resolution."""

    frames: list[Frame]
    frame_rate: float = DEFAULT_FRAME_RATE
    eye: Eye = Eye.RIGHT

    def __post_init__(self):
        if self.frame_rate <= 0:
            raise ValueError("frame_rate must be positive")
        sizes = {(f.width, f.height) for f in self.frames}
        if len(sizes) > 1:
            raise FormatError(f"mixed frame dimensions in sequence: {sorted(sizes)}")

    def __len__(self) -> int:
        return len(self.frames)


@dataclass(frozen=True)
class CropWindow:
    """Axis-aligned sub-frame location, recorded in parent-frame pixels."""

    origin_x: int
    origin_y: int
    width: int
    height: int

    def to_parent(self, x: float, y: float) -> tuple[float, float]:
        return x + self.origin_x, y + self.origin_y

    def to_local(self, x: float, y: float) -> tuple[float, float]:
        return x - self.origin_x, y - self.origin_y


def load_frame(path: str | Path) -> Frame:
    """Read a binary 8-bit PGM (P5, maxval 255) without any rescaling."""
    data = Path(path).read_bytes()
    return _parse_pgm(data, str(path))


def save_frame(frame: Frame, path: str | Path) -> None:
    """Write ``frame`` as a binary PGM; load_frame round-trips bit-exactly."""
    header = f"P5\n{frame.width} {frame.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + frame.pixels.tobytes())


def _parse_pgm(data: bytes, name: str) -> Frame:
    if not data.startswith(b"P5"):
        raise FormatError(f"{name}: not a binary PGM (P5 magic missing)")
    pos = 2
    fields: list[int] = []
    while len(fields) < 3:
        # skip whitespace and '#' comment lines between header tokens
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        token = data[start:pos]
        if not token.isdigit():
            raise FormatError(f"{name}: malformed PGM header token {token!r}")
        fields.append(int(token))
    pos += 1  # single whitespace byte after maxval
    width, height, maxval = fields
    if maxval != 255:
        raise FormatError(f"{name}: unsupported maxval {maxval} (need 255)")
    if width <= 0 or height <= 0:
        raise FormatError(f"{name}: non-positive dimensions {width}x{height}")
    payload = data[pos : pos + width * height]
    if len(payload) != width * height:
        raise FormatError(f"{name}: truncated pixel payload "
                          f"({len(payload)} of {width * height} bytes)")
    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return Frame(pixels=pixels.copy())


def load_sequence(directory: str | Path, eye: Eye) -> FrameSequence:
    """Load ``frame_NNNNN.pgm`` files in index order.

    Raises GapError when an index is missing, FormatError on mixed
    dimensions. The frame rate comes from ``meta.json`` when present,
    otherwise 30 fps.
    """
    directory = Path(directory)
    indexed: dict[int, Path] = {}
    for p in directory.iterdir():
        m = _FRAME_NAME.match(p.name)
        if m:
            indexed[int(m.group(1))] = p
    if not indexed:
        raise FileNotFoundError(f"{directory}: no frame_NNNNN.pgm files")
    count = max(indexed) + 1
    missing = sorted(set(range(count)) - set(indexed))
    if missing:
        raise GapError(f"{directory}: missing frame indices {missing[:5]}"
                       + ("..." if len(missing) > 5 else ""))
    frames = [load_frame(indexed[i]) for i in range(count)]

    frame_rate = DEFAULT_FRAME_RATE
    meta_path = directory / "meta.json"
    if meta_path.exists():
        meta = json.loads(meta_path.read_text())
        frame_rate = float(meta.get("frame_rate", DEFAULT_FRAME_RATE))
    return FrameSequence(frames=frames, frame_rate=frame_rate, eye=eye)


def save_sequence_meta(directory: str | Path, frame_rate: float, eye: Eye) -> None:
    Path(directory, "meta.json").write_text(
        json.dumps({"frame_rate": frame_rate, "eye": eye.value}) + "\n")


def quarter_crop(frame: Frame, center: tuple[float, float]) -> tuple[Frame, CropWindow]:
    """Cut a quarter-area window (half of each dimension) around ``center``.

    The window is shifted, never shrunk, when it would spill past a border,
    so the crop size is the same for every frame of a sequence.
    """
    cx, cy = center
    if not frame.contains(cx, cy):
        raise ValueError(f"crop center ({cx}, {cy}) outside {frame.width}x{frame.height} frame")
    cw = math.ceil(frame.width / 2)
    ch = math.ceil(frame.height / 2)
    ox = min(max(int(cx) - cw // 2, 0), frame.width - cw)
    oy = min(max(int(cy) - ch // 2, 0), frame.height - ch)
    window = CropWindow(origin_x=ox, origin_y=oy, width=cw, height=ch)
    sub = frame.pixels[oy : oy + ch, ox : ox + cw]
    return Frame(pixels=sub.copy()), window
