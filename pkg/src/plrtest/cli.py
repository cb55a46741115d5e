"""Command-line surface: synth, detect, assess, evaluate, calibrate.

Exit codes: 0 on success, 1 on I/O or data errors, 2 on bad flags.
The PLRTEST_THREADS environment variable caps the worker pool.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import metrics, synth
from .errors import PlrError
from .frame import Eye
from .hough import HoughConfig
from .pipeline import detect_directory, detect_frame, worker_count
from .rapd import DissimilarityKind, PipelineConfig, assess
from .starburst import StarburstConfig, locate_pupil_features
from .trace import TraceConfig, load_trace_csv, save_trace_csv


def config_grid() -> list[PipelineConfig]:
    """All 16 crop x motion x smoothing x kind configurations."""
    return [
        PipelineConfig(crop=crop, motion=motion, smoothing=smoothing, kind=kind)
        for crop in (False, True)
        for motion in (False, True)
        for smoothing in (False, True)
        for kind in (DissimilarityKind.SRCC, DissimilarityKind.PLCC)
    ]


def _parse_frame_size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad frame size {text!r}, want WxH") from exc


def _add_detect_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rays", type=int, default=18, help="Starburst ray count")
    p.add_argument("--ray-step", type=float, default=1.0, help="ray march step, px")
    p.add_argument("--threshold-step", type=int, default=5,
                   help="gradient sweep decrement")
    p.add_argument("--min-features", type=int, default=3,
                   help="feature points needed to accept an iteration")
    p.add_argument("--canny-threshold", type=float, default=150.0,
                   help="edge binarization level")
    p.add_argument("--accumulator-threshold", type=int, default=20,
                   help="votes needed to accept a circle")
    p.add_argument("--accumulator-bin", type=int, default=1,
                   help="pixels per accumulator cell")
    p.add_argument("--r-min-frac", type=float, default=0.05,
                   help="min radius as a fraction of the max")


def _detect_configs(args) -> tuple[StarburstConfig, HoughConfig]:
    sb = StarburstConfig(num_rays=args.rays, ray_step=args.ray_step,
                         threshold_step=args.threshold_step,
                         min_feature_points=args.min_features)
    hough = HoughConfig(canny_threshold=args.canny_threshold,
                        accumulator_threshold=args.accumulator_threshold,
                        accumulator_bin=args.accumulator_bin,
                        r_min_frac=args.r_min_frac)
    return sb, hough


def _add_trace_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--motion-band", type=float, default=0.05,
                   help="motion limit as a fraction of the mean location")
    p.add_argument("--smooth-window", type=int, default=3,
                   help="median smoothing window (odd)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plrtest",
        description="Automated swinging-flashlight test analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate labeled synthetic cases")
    p.add_argument("--out", required=True, help="output dataset directory")
    p.add_argument("--cases", type=int, required=True, help="number of cases")
    p.add_argument("--rapd-fraction", type=float, default=0.5,
                   help="fraction of positive cases")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--severity-min", type=float, default=0.2,
                   help="strongest defect (rapd factor lower bound)")
    p.add_argument("--severity-max", type=float, default=0.5)
    p.add_argument("--frame-size", type=_parse_frame_size, default=(640, 480),
                   metavar="WxH")
    p.add_argument("--fps", type=float, default=30.0)
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--dark-lead", type=float, default=2.0,
                   help="initial dark segment, seconds")
    p.add_argument("--swings", type=int, default=6,
                   help="number of alternating illuminations")
    p.add_argument("--swing-duration", type=float, default=3.0, help="seconds")
    p.add_argument("--pupil-base", type=float, default=None,
                   help="dilated pupil radius, px (default scales with frame)")
    p.add_argument("--pupil-amplitude", type=float, default=None,
                   help="max constriction, px (default scales with frame)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("detect", help="measure one frame directory into a trace CSV")
    p.add_argument("--frames", required=True, help="directory of frame_NNNNN.pgm")
    p.add_argument("--out", required=True, help="trace CSV path")
    p.add_argument("--crop", action="store_true",
                   help="measure on the quarter crop around the Starburst fix")
    p.add_argument("--eye", choices=["right", "left"], default=None,
                   help="eye side (default: meta.json, else right)")
    p.add_argument("--jobs", type=int, default=None, help="worker processes")
    p.add_argument("--debug-dir", default=None,
                   help="dump per-frame Starburst feature points as CSV here")
    _add_detect_flags(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("assess", help="dissimilarity index for a right/left trace pair")
    p.add_argument("--right", required=True, help="right-eye trace CSV")
    p.add_argument("--left", required=True, help="left-eye trace CSV")
    p.add_argument("--kind", choices=["srcc", "plcc"], default="plcc")
    p.add_argument("--crop", action="store_true",
                   help="record that traces came from cropped measurement")
    p.add_argument("--motion", action="store_true", help="apply the motion filter")
    p.add_argument("--smoothing", action="store_true", help="apply median smoothing")
    p.add_argument("--threshold", type=float, default=None,
                   help="classify positive when index exceeds this")
    _add_trace_flags(p)
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("evaluate",
                       help="score a labeled dataset over the configuration grid")
    p.add_argument("--data", required=True, help="dataset dir with manifest.csv")
    p.add_argument("--out", required=True, help="report output directory")
    p.add_argument("--configs", default="all",
                   help="'all' or comma-separated config ids like crop-nomotion-nosmooth-plcc")
    p.add_argument("--f-variant", choices=["eq1", "table2"], default="eq1",
                   help="F-score formula (table2 only for archaeology)")
    p.add_argument("--plot", action="store_true", help="write SVG ROC/scatter plots")
    p.add_argument("--jobs", type=int, default=None, help="worker processes")
    _add_detect_flags(p)
    _add_trace_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("calibrate",
                       help="grid-search Hough parameters against truth fixtures")
    p.add_argument("--data", required=True, help="synth dataset dir")
    p.add_argument("--out", default=None,
                   help="calibration JSON path (default <data>/calibration.json)")
    p.add_argument("--canny-grid", default="100,150,200,250",
                   help="comma list of canny thresholds")
    p.add_argument("--accumulator-grid", default="10,20,40",
                   help="comma list of accumulator thresholds")
    p.add_argument("--bin-grid", default="1,2", help="comma list of accumulator bins")
    p.add_argument("--full-frame", action="store_true",
                   help="calibrate full-frame instead of cropped measurement")
    p.add_argument("--frames-per-eye", type=int, default=8,
                   help="frames sampled per eye per tuple")
    p.add_argument("--rays", type=int, default=18)
    p.add_argument("--r-min-frac", type=float, default=0.05)
    p.set_defaults(func=cmd_calibrate)
    return parser


def cmd_synth(args, parser) -> int:
    if args.cases <= 0:
        parser.error("--cases must be positive")
    if not 0 <= args.rapd_fraction <= 1:
        parser.error("--rapd-fraction must lie in [0, 1]")
    if not 0 < args.severity_min <= args.severity_max < 1:
        parser.error("need 0 < severity-min <= severity-max < 1")
    w, h = args.frame_size
    render = synth.RenderParams(noise_sigma=args.noise_sigma).scaled_to(w, h)
    scale = min(w, h) / 480.0
    plr = synth.PlrParams(
        r_base=args.pupil_base if args.pupil_base else round(45.0 * scale),
        amplitude=args.pupil_amplitude if args.pupil_amplitude else round(20.0 * scale),
    )
    schedule = synth.swinging_schedule(frame_rate=args.fps, dark_lead=args.dark_lead,
                                       swings=args.swings,
                                       swing_duration=args.swing_duration)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    n_pos = round(args.cases * args.rapd_fraction)
    cases = []
    for i in range(args.cases):
        label = i < n_pos
        severity = float(rng.uniform(args.severity_min, args.severity_max)) if label else 1.0
        cases.append(synth.generate_case(
            label=label, severity=severity if label else 0.0, seed=args.seed * 100000 + i,
            out_dir=out, schedule=schedule, plr=plr, render=render,
            case_id=f"case_{i:03d}"))
    manifest = out / "manifest.csv"
    synth.save_case_manifest(cases, manifest)
    print(manifest)
    return 0


def _resolve_eye(frames_dir: Path, flag: str | None) -> Eye:
    if flag:
        return Eye(flag)
    meta = frames_dir / "meta.json"
    if meta.exists():
        side = json.loads(meta.read_text()).get("eye")
        if side in ("left", "right"):
            return Eye(side)
    return Eye.RIGHT


def cmd_detect(args, parser) -> int:
    sb_cfg, hough_cfg = _detect_configs(args)
    frames_dir = Path(args.frames)
    eye = _resolve_eye(frames_dir, args.eye)

    def progress(done: int, total: int) -> None:
        print(f"detect: {done}/{total} frames", file=sys.stderr)

    trace = detect_directory(frames_dir, eye, args.crop, sb_cfg, hough_cfg,
                             workers=worker_count(args.jobs), progress=progress)
    if args.debug_dir:
        _dump_features(frames_dir, eye, sb_cfg, Path(args.debug_dir))
    save_trace_csv(trace, args.out)
    return 0


def _dump_features(frames_dir: Path, eye: Eye, sb_cfg: StarburstConfig,
                   debug_dir: Path) -> None:
    from .frame import load_sequence

    debug_dir.mkdir(parents=True, exist_ok=True)
    seq = load_sequence(frames_dir, eye)
    for i, frame in enumerate(seq.frames):
        _, feats = locate_pupil_features(frame, sb_cfg)
        with open(debug_dir / f"frame_{i:05d}_features.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "y", "gradient", "ray_angle"])
            for f in feats:
                writer.writerow([f"{f.x:.3f}", f"{f.y:.3f}", f.gradient,
                                 f"{f.ray_angle:.6f}"])


def cmd_assess(args, parser) -> int:
    cfg = PipelineConfig(crop=args.crop, motion=args.motion,
                         smoothing=args.smoothing,
                         kind=DissimilarityKind(args.kind))
    trace_cfg = TraceConfig(motion_band_frac=args.motion_band,
                            smooth_window=args.smooth_window)
    right = load_trace_csv(args.right, Eye.RIGHT)
    left = load_trace_csv(args.left, Eye.LEFT)
    result = assess(right, left, cfg, threshold=args.threshold, trace_cfg=trace_cfg)
    print(result.to_json())
    return 0


def _parse_config_selection(text: str, parser) -> list[PipelineConfig]:
    grid = {c.config_id: c for c in config_grid()}
    if text == "all":
        return list(grid.values())
    chosen = []
    for token in text.split(","):
        token = token.strip()
        if token not in grid:
            parser.error(f"unknown config id {token!r}; "
                         f"valid ids look like {next(iter(grid))!r}")
        chosen.append(grid[token])
    return chosen


def _detect_job(args_tuple):
    case_dir, eye_value, crop, sb_cfg, hough_cfg = args_tuple
    eye = Eye(eye_value)
    trace = detect_directory(Path(case_dir) / eye.value, eye, crop, sb_cfg, hough_cfg)
    return case_dir, eye_value, crop, trace


def cmd_evaluate(args, parser) -> int:
    data = Path(args.data)
    out = Path(args.out)
    configs = _parse_config_selection(args.configs, parser)
    sb_cfg, hough_cfg = _detect_configs(args)
    trace_cfg = TraceConfig(motion_band_frac=args.motion_band,
                            smooth_window=args.smooth_window)
    cases = synth.load_case_manifest(data / "manifest.csv")
    if len({label for _, label in cases}) < 2:
        print("evaluate: manifest needs both classes", file=sys.stderr)
        return 1

    crops = sorted({c.crop for c in configs})
    jobs = [(str(data / case_id), eye.value, crop, sb_cfg, hough_cfg)
            for case_id, _ in cases
            for crop in crops
            for eye in (Eye.RIGHT, Eye.LEFT)]
    workers = worker_count(args.jobs)
    traces = {}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for case_dir, eye_value, crop, trace in pool.map(_detect_job, jobs):
                traces[(Path(case_dir).name, eye_value, crop)] = trace
    else:
        for job in jobs:
            case_dir, eye_value, crop, trace = _detect_job(job)
            traces[(Path(case_dir).name, eye_value, crop)] = trace

    (out / "reports").mkdir(parents=True, exist_ok=True)
    (out / "roc").mkdir(exist_ok=True)
    (out / "scores").mkdir(exist_ok=True)
    reports = []
    score_rows_by_config = {}
    for cfg in configs:
        rows = []
        for case_id, label in cases:
            try:
                result = assess(traces[(case_id, "right", cfg.crop)],
                                traces[(case_id, "left", cfg.crop)],
                                cfg, trace_cfg=trace_cfg)
                score = result.index
            except PlrError as exc:
                # an unassessable case is a guaranteed misclassification
                score = 0.0 if label else 1.0
                print(f"evaluate: {case_id} [{cfg.config_id}] failed: {exc}",
                      file=sys.stderr)
            rows.append((case_id, score, label))
        score_rows_by_config[cfg.config_id] = rows
        metrics.save_score_manifest(rows, out / "scores" / f"{cfg.config_id}.csv")
        report = metrics.evaluate_manifest([(s, y) for _, s, y in rows],
                                           cfg.config_id,
                                           f_variant=(args.f_variant == "table2"))
        metrics.save_report_json(report, out / "reports" / f"{cfg.config_id}.json")
        metrics.save_roc_csv(report.roc, out / "roc" / f"{cfg.config_id}.csv")
        reports.append((cfg, report))

    _write_summary(reports, out)
    if args.plot:
        from . import plots
        (out / "plots").mkdir(exist_ok=True)
        plots.plot_roc_curves(reports, out / "plots")
        best_cfg, _ = max(reports, key=lambda item: item[1].auc)
        plots.plot_index_scatter(score_rows_by_config[best_cfg.config_id],
                                 best_cfg.config_id,
                                 out / "plots" / "index_scatter.svg")
    print(out / "summary.csv")
    return 0


def _write_summary(reports, out: Path) -> None:
    header = ["config_id", "crop", "motion", "smoothing", "kind", "sensitivity",
              "specificity", "precision", "auc", "f0.5", "f1", "f2",
              "operating_threshold"]
    with open(out / "summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for cfg, rep in reports:
            writer.writerow([
                cfg.config_id, int(cfg.crop), int(cfg.motion), int(cfg.smoothing),
                cfg.kind.value, f"{rep.sensitivity:.4f}", f"{rep.specificity:.4f}",
                f"{rep.precision:.4f}", f"{rep.auc:.4f}",
                f"{rep.f_scores[0.5]:.4f}", f"{rep.f_scores[1.0]:.4f}",
                f"{rep.f_scores[2.0]:.4f}", f"{rep.operating_threshold:.4f}",
            ])
    lines = [f"{'config':34s} {'sens':>6s} {'spec':>6s} {'prec':>6s} "
             f"{'auc':>6s} {'f0.5':>6s} {'f1':>6s} {'f2':>6s}"]
    for cfg, rep in reports:
        lines.append(f"{cfg.config_id:34s} {rep.sensitivity:6.3f} "
                     f"{rep.specificity:6.3f} {rep.precision:6.3f} {rep.auc:6.3f} "
                     f"{rep.f_scores[0.5]:6.3f} {rep.f_scores[1.0]:6.3f} "
                     f"{rep.f_scores[2.0]:6.3f}")
    (out / "summary.txt").write_text("\n".join(lines) + "\n")


def cmd_calibrate(args, parser) -> int:
    data = Path(args.data)
    case_dirs = sorted(d for d in data.iterdir()
                       if d.is_dir() and (d / "right" / "truth.csv").exists())
    if not case_dirs:
        print(f"calibrate: no truth fixtures under {data}", file=sys.stderr)
        return 1
    try:
        canny_grid = [float(v) for v in args.canny_grid.split(",")]
        acc_grid = [int(v) for v in args.accumulator_grid.split(",")]
        bin_grid = [int(v) for v in args.bin_grid.split(",")]
    except ValueError:
        parser.error("grids must be comma-separated numbers")
    sb_cfg = StarburstConfig(num_rays=args.rays)
    crop = not args.full_frame

    from .frame import load_sequence

    sampled = []  # (frame, index, truth_radius, penalty) tuples reused per tuple
    for case_dir in case_dirs:
        for side in ("right", "left"):
            eye_dir = case_dir / side
            truth = {s.frame_index: s.radius
                     for s in load_trace_csv(eye_dir / "truth.csv").samples}
            seq = load_sequence(eye_dir, Eye(side))
            step = max(len(seq) // args.frames_per_eye, 1)
            for i in range(0, len(seq), step):
                if i in truth:
                    half = min(seq.frames[i].width, seq.frames[i].height) / 2
                    penalty = half / 2 if crop else half
                    sampled.append((seq.frames[i], i, truth[i], penalty))

    best = None
    for canny, acc_thr, cell in itertools.product(canny_grid, acc_grid, bin_grid):
        cfg = HoughConfig(canny_threshold=canny, accumulator_threshold=acc_thr,
                          accumulator_bin=cell, r_min_frac=args.r_min_frac)
        errors = []
        for frame, i, truth_radius, penalty in sampled:
            sample = detect_frame(frame, i, crop, sb_cfg, cfg)
            errors.append(abs(sample.radius - truth_radius) if sample.valid
                          else penalty)
        mean_err = float(np.mean(errors))
        if best is None or mean_err < best[3]:
            best = (canny, acc_thr, cell, mean_err)
    canny, acc_thr, cell, mean_err = best
    result = {"canny_threshold": canny, "accumulator_threshold": acc_thr,
              "accumulator_bin": cell, "mean_abs_radius_error": mean_err,
              "crop": crop, "frames_scored": len(sampled)}
    out = Path(args.out) if args.out else data / "calibration.json"
    out.write_text(json.dumps(result, indent=2) + "\n")
    print(json.dumps(result))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (OSError, PlrError) as exc:
        print(f"plrtest {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
