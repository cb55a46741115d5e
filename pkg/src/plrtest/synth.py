"""Labeled synthetic eye sequences: a first-order pupillary-reflex model
driven by a swinging-light schedule, rendered as concentric-disc frames.

The model is deliberately simple; its one job is to produce right/left
recordings whose reflex traces match for healthy cases and diverge with
defect severity, so the detection pipeline can be scored end to end.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import GeometryError
from .frame import Eye, Frame, save_frame, save_sequence_meta
from .trace import PupilSample, PupilTrace, save_trace_csv


@dataclass(frozen=True)
class StimulusSchedule:
    """Sequence of (illuminated eye | None, duration in seconds) segments."""

    segments: tuple[tuple[Eye | None, float], ...]
    frame_rate: float = 30.0

    def __post_init__(self):
        if any(d <= 0 for _, d in self.segments):
            raise ValueError("segment durations must be positive")
        if self.total_frames < 30:
            raise ValueError("schedule too short: need at least 30 frames")

    @property
    def duration(self) -> float:
        return sum(d for _, d in self.segments)

    @property
    def total_frames(self) -> int:
        return int(self.duration * self.frame_rate)

    def eye_at(self, t: float) -> Eye | None:
        if t < 0:
            return None
        for eye, d in self.segments:
            if t < d:
                return eye
            t -= d
        return None


def swinging_schedule(frame_rate: float = 30.0, dark_lead: float = 2.0,
                      swings: int = 6, swing_duration: float = 3.0,
                      first: Eye = Eye.RIGHT) -> StimulusSchedule:
    """Default swinging-flashlight schedule: a dark lead-in, then alternating
    illuminations starting on ``first``."""
    other = Eye.LEFT if first is Eye.RIGHT else Eye.RIGHT
    segments: list[tuple[Eye | None, float]] = [(None, dark_lead)]
    for i in range(swings):
        segments.append((first if i % 2 == 0 else other, swing_duration))
    return StimulusSchedule(segments=tuple(segments), frame_rate=frame_rate)


@dataclass(frozen=True)
class PlrParams:
    r_base: float = 45.0        # dilated radius, px
    amplitude: float = 20.0     # max constriction, px
    tau_constrict: float = 0.4  # s
    tau_dilate: float = 1.2     # s
    latency: float = 0.2        # s
    rapd_factor: float = 1.0    # 1 = healthy; < 1 weakens the affected eye's
                                # response while the affected eye is illuminated
    affected_eye: Eye = Eye.LEFT

    def __post_init__(self):
        if not 0 < self.amplitude < self.r_base:
            raise ValueError("need 0 < amplitude < r_base")
        if self.tau_constrict <= 0 or self.tau_dilate <= 0:
            raise ValueError("time constants must be positive")
        if not 0 <= self.rapd_factor <= 1:
            raise ValueError("rapd_factor must lie in [0, 1]")


def plr_trace(params: PlrParams, schedule: StimulusSchedule, eye: Eye) -> np.ndarray:
    """Radius series for one eye under the schedule.

    First-order relaxation toward target = r_base - amplitude * k while light
    is on either eye (after the latency), with the constriction time constant
    on the way down and the dilation one on the way up. k drops to rapd_factor
    for the affected eye whenever the affected eye is the one illuminated.
    """
    dt = 1.0 / schedule.frame_rate
    n = schedule.total_frames
    out = np.empty(n, dtype=np.float64)
    r = params.r_base
    for i in range(n):
        out[i] = r
        lit = schedule.eye_at(i * dt - params.latency)
        if lit is None:
            target = params.r_base
        else:
            k = params.rapd_factor if (lit is params.affected_eye
                                       and eye is params.affected_eye) else 1.0
            target = params.r_base - params.amplitude * k
        tau = params.tau_constrict if target < r else params.tau_dilate
        r += dt * (target - r) / tau
    return out


@dataclass(frozen=True)
class RenderParams:
    frame_w: int = 640
    frame_h: int = 480
    pupil_center: tuple[float, float] | None = None  # None = frame center
    sclera: int = 200
    iris: int = 100
    pupil: int = 30
    glint: int = 250
    # larger than the quarter-crop half-diagonal (~0.42 min(w,h)), so the
    # iris boundary stays outside the crop and cannot out-vote a small pupil
    iris_radius: float = 216.0
    glint_offset: tuple[float, float] | None = (12.0, -12.0)
    glint_radius: float = 4.0
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.pupil < self.iris < self.sclera:
            raise ValueError("need pupil < iris < sclera intensity")

    def center(self) -> tuple[float, float]:
        if self.pupil_center is not None:
            return self.pupil_center
        return self.frame_w / 2.0, self.frame_h / 2.0

    def scaled_to(self, frame_w: int, frame_h: int) -> "RenderParams":
        """Same eye geometry proportionally resized to another frame size."""
        s = min(frame_w, frame_h) / min(self.frame_w, self.frame_h)
        return replace(
            self, frame_w=frame_w, frame_h=frame_h, pupil_center=None,
            iris_radius=round(self.iris_radius * s),
            glint_offset=None if self.glint_offset is None else
            (round(self.glint_offset[0] * s), round(self.glint_offset[1] * s)),
            glint_radius=max(round(self.glint_radius * s), 1.0),
        )


def render_frame(radius: float, rp: RenderParams,
                 rng: np.random.Generator | None = None) -> Frame:
    """Rasterize sclera/iris/pupil discs (hard edges) plus the optional glint,
    then add clamped Gaussian noise."""
    if radius >= rp.iris_radius:
        raise GeometryError(f"pupil radius {radius} must stay below "
                            f"iris radius {rp.iris_radius}")
    cx, cy = rp.center()
    yy, xx = np.ogrid[0:rp.frame_h, 0:rp.frame_w]
    d2 = (xx - cx) ** 2 + (yy - cy) ** 2
    img = np.full((rp.frame_h, rp.frame_w), rp.sclera, dtype=np.float64)
    img[d2 <= rp.iris_radius ** 2] = rp.iris
    img[d2 <= radius ** 2] = rp.pupil
    if rp.glint_offset is not None and rp.glint_radius > 0:
        gx, gy = cx + rp.glint_offset[0], cy + rp.glint_offset[1]
        g2 = (xx - gx) ** 2 + (yy - gy) ** 2
        img[g2 <= rp.glint_radius ** 2] = rp.glint
    if rp.noise_sigma > 0:
        rng = rng if rng is not None else np.random.default_rng(rp.seed)
        img = img + rng.normal(0.0, rp.noise_sigma, size=img.shape)
    return Frame(pixels=np.clip(np.rint(img), 0, 255).astype(np.uint8))


@dataclass(frozen=True)
class CaseManifest:
    case_id: str
    label: bool
    severity: float
    seed: int
    case_dir: Path


def _truth_trace(radii: np.ndarray, center: tuple[float, float], eye: Eye,
                 frame_rate: float) -> PupilTrace:
    samples = tuple(
        PupilSample(frame_index=i, cx=center[0], cy=center[1],
                    radius=float(r), valid=True)
        for i, r in enumerate(radii))
    return PupilTrace(eye=eye, samples=samples, frame_rate=frame_rate)


def generate_case(label: bool, severity: float, seed: int, out_dir: str | Path,
                  schedule: StimulusSchedule | None = None,
                  plr: PlrParams | None = None,
                  render: RenderParams | None = None,
                  case_id: str | None = None) -> CaseManifest:
    """Write one labeled case: right/left frame dirs (PGM + meta.json) and
    ground-truth trace CSVs.

    For positive cases ``severity`` is applied as the rapd_factor; the
    affected eye and a small pupil offset are drawn deterministically from
    ``seed``.
    """
    if not 0 <= severity <= 1:
        raise ValueError("severity must lie in [0, 1]")
    if label and severity >= 1:
        raise ValueError("positive cases need severity < 1")
    schedule = schedule or swinging_schedule()
    plr = plr or PlrParams()
    render = render or RenderParams()
    rng = np.random.default_rng(seed)

    affected = Eye.LEFT if rng.integers(2) else Eye.RIGHT
    plr = replace(plr, rapd_factor=severity if label else 1.0, affected_eye=affected)
    # pupils sit near the frame center; wobble a little per case
    cx = render.frame_w / 2.0 + float(rng.integers(-4, 5))
    cy = render.frame_h / 2.0 + float(rng.integers(-4, 5))
    render = replace(render, pupil_center=(cx, cy))

    case_dir = Path(out_dir) / (case_id or f"case_{seed:05d}")
    for eye in (Eye.RIGHT, Eye.LEFT):
        eye_dir = case_dir / eye.value
        eye_dir.mkdir(parents=True, exist_ok=True)
        radii = plr_trace(plr, schedule, eye)
        eye_rng = np.random.default_rng([seed, 0 if eye is Eye.RIGHT else 1])
        for i, r in enumerate(radii):
            frame = render_frame(float(r), render, rng=eye_rng)
            save_frame(frame, eye_dir / f"frame_{i:05d}.pgm")
        save_sequence_meta(eye_dir, schedule.frame_rate, eye)
        save_trace_csv(_truth_trace(radii, (cx, cy), eye, schedule.frame_rate),
                       eye_dir / "truth.csv")
    return CaseManifest(case_id=case_dir.name, label=label, severity=severity,
                        seed=seed, case_dir=case_dir)


def save_case_manifest(cases: list[CaseManifest], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["case_id", "label", "severity", "seed"])
        for c in cases:
            writer.writerow([c.case_id, int(c.label), f"{c.severity:.3f}", c.seed])


def load_case_manifest(path: str | Path) -> list[tuple[str, bool]]:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append((row["case_id"], row["label"].strip() in ("1", "true", "True")))
    return rows
