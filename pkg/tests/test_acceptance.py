"""Acceptance suite: one test per criterion, each printing a PASS line with
its runtime (run with ``pytest tests/test_acceptance.py -v -s``)."""

from __future__ import annotations

import csv
import math
import time

import numpy as np
import pytest

from plrtest.cli import main
from plrtest.hough import HoughConfig, measure_pupil
from plrtest.metrics import (
    ConfusionCounts,
    auc,
    evaluate_manifest,
    f_beta,
    f_beta_table_variant,
    rates,
    roc_curve,
)
from plrtest.rapd import DissimilarityKind, dissimilarity
from plrtest.starburst import locate_pupil
from plrtest.trace import TraceConfig, median_smooth, motion_filter

from conftest import brow_scene, disc_frame
from test_metrics import pair_statistic
from test_trace import make_trace


def report(criterion: int, started: float, budget: float, detail: str) -> None:
    elapsed = time.perf_counter() - started
    assert elapsed < budget, f"criterion {criterion} took {elapsed:.1f}s (budget {budget}s)"
    print(f"\nACCEPTANCE {criterion} PASS ({elapsed:.1f}s): {detail}")


def test_criterion_1_reference_metric_arithmetic():
    t0 = time.perf_counter()
    counts = ConfusionCounts(tp=15, fn=1, tn=14, fp=2)
    sens, spec, prec = rates(counts)
    assert sens == pytest.approx(0.938, abs=1e-3)
    assert spec == pytest.approx(0.875, abs=1e-3)
    assert prec == pytest.approx(0.882, abs=1e-3)
    assert f_beta(prec, sens, 1.0) == pytest.approx(0.909, abs=1e-3)
    # 2 false detections, 1 missed detection, out of 32 test cases
    assert counts.fp == 2 and counts.fn == 1 and counts.total == 32
    report(1, t0, 1.0, "reference confusion rates 93.8/87.5/88.2 and F1=0.909 reproduced")


def test_criterion_2_f_beta_sanity_and_variant():
    t0 = time.perf_counter()
    rng = np.random.default_rng(12)
    for _ in range(100):
        p = float(rng.uniform(0.01, 1.0))
        beta = float(rng.uniform(0.1, 4.0))
        assert f_beta(p, p, beta) == pytest.approx(p, abs=1e-12)
    prec, rec = 15 / 17, 15 / 16
    assert f_beta_table_variant(prec, rec, 0.5) == pytest.approx(2.273, abs=1e-3)
    assert f_beta_table_variant(prec, rec, 2.0) == pytest.approx(0.568, abs=1e-3)
    report(2, t0, 1.0, "F-score fixed point x100 and variant-formula cells 2.273/0.568")


def test_criterion_3_auc_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(77)
    checked = 0
    while checked < 500:
        n = int(rng.integers(2, 11))
        labels = (rng.random(n) < 0.5).tolist()
        if True not in labels or False not in labels:
            continue
        scores = rng.choice([0.0, 0.2, 0.4, 0.6, 0.8, 1.0], size=n).tolist()
        got = auc(roc_curve(scores, labels))
        want = pair_statistic(scores, labels)
        assert got == pytest.approx(want, abs=1e-9)
        checked += 1
    report(3, t0, 5.0, "trapezoidal AUC == pair statistic on 500 random manifests")


@pytest.fixture(scope="module")
def disc_fixtures():
    """100 discs on 160x160 frames: center >= 60 px from every border,
    radius in [20, 60]; one noiseless and one sigma=8 rendering each."""
    rng = np.random.default_rng(42)
    out = []
    for i in range(100):
        cx = float(rng.uniform(60, 100))
        cy = float(rng.uniform(60, 100))
        r = float(rng.uniform(20, 60))
        out.append((cx, cy, r,
                    disc_frame(160, 160, cx, cy, r),
                    disc_frame(160, 160, cx, cy, r, noise_sigma=8, seed=1000 + i)))
    return out


def test_criterion_4_starburst_accuracy(disc_fixtures):
    t0 = time.perf_counter()
    clean_ok = noisy_ok = 0
    for cx, cy, r, clean, noisy in disc_fixtures:
        e0 = locate_pupil(clean)
        if e0.valid and math.hypot(e0.x - cx, e0.y - cy) <= 2.0:
            clean_ok += 1
        e8 = locate_pupil(noisy)
        if e8.valid and math.hypot(e8.x - cx, e8.y - cy) <= 3.0:
            noisy_ok += 1
    assert clean_ok == 100
    assert noisy_ok >= 95
    report(4, t0, 30.0,
           f"center error <=2px in {clean_ok}/100 noiseless, <=3px in {noisy_ok}/100 at sigma=8")


def test_criterion_5_cht_accuracy_and_crop_advantage(disc_fixtures):
    t0 = time.perf_counter()
    cfg = HoughConfig()
    clean_ok = noisy_ok = 0
    for cx, cy, r, clean, noisy in disc_fixtures:
        if abs(measure_pupil(clean, None, cfg, crop=False).radius - r) <= 1.0:
            clean_ok += 1
        if abs(measure_pupil(noisy, None, cfg, crop=False).radius - r) <= 2.0:
            noisy_ok += 1
    assert clean_ok == 100
    assert noisy_ok >= 95

    rng = np.random.default_rng(7)
    crop_wins = 0
    for i in range(100):
        r = float(rng.uniform(25, 45))
        cx = 160 + float(rng.uniform(-10, 10))
        cy = 180 + float(rng.uniform(-8, 8))
        scene = brow_scene(cx=cx, cy=cy, radius=r, noise_sigma=8, seed=i)
        est = locate_pupil(scene)
        cropped = measure_pupil(scene, (est.x, est.y), cfg, crop=True)
        full = measure_pupil(scene, None, cfg, crop=False)
        if abs(cropped.radius - r) < abs(full.radius - r):
            crop_wins += 1
    assert crop_wins >= 95
    report(5, t0, 60.0,
           f"radius <=1px in {clean_ok}/100, <=2px in {noisy_ok}/100 at sigma=8; "
           f"crop beat full-frame on {crop_wins}/100 brow-distractor trials")


def test_criterion_6_end_to_end_separation(tmp_path):
    t0 = time.perf_counter()
    data = tmp_path / "data"
    out = tmp_path / "out"
    rc = main(["synth", "--out", str(data), "--cases", "40",
               "--rapd-fraction", "0.5", "--seed", "1",
               "--severity-min", "0.2", "--severity-max", "0.5",
               "--noise-sigma", "5", "--frame-size", "240x180", "--fps", "3"])
    assert rc == 0
    rc = main(["evaluate", "--data", str(data), "--out", str(out),
               "--configs", "all"])
    assert rc == 0
    with open(out / "summary.csv", newline="") as fh:
        rows = {r["config_id"]: r for r in csv.DictReader(fh)}
    assert len(rows) == 16
    best_auc = float(rows["crop-nomotion-nosmooth-plcc"]["auc"])
    assert best_auc >= 0.9
    report(6, t0, 300.0,
           f"40-case crop+PLCC AUC={best_auc:.3f} (>=0.9); 16 summary rows emitted")


def test_criterion_7_trace_postprocessing_properties():
    t0 = time.perf_counter()
    out = motion_filter(make_trace([200, 201, 199, 200, 230]), TraceConfig())
    assert [s.valid for s in out.samples] == [True, True, True, True, False]
    out = motion_filter(make_trace([200] * 4, cys=[240, 240, 240, 280]), TraceConfig())
    assert [s.valid for s in out.samples] == [True, True, True, False]
    out = median_smooth(make_trace([200] * 5, radii=[2, 100, 3, 4, 5]), TraceConfig())
    assert [s.radius for s in out.samples] == [2, 3, 4, 4, 5]

    rng = np.random.default_rng(99)
    for _ in range(1000):
        n = int(rng.integers(3, 40))
        a = rng.normal(size=n)
        b = rng.normal(size=n)
        kind = DissimilarityKind.PLCC if rng.random() < 0.5 else DissimilarityKind.SRCC
        assert dissimilarity(a, a, kind) == 0.0
        assert dissimilarity(a, b, kind) == dissimilarity(b, a, kind)
    report(7, t0, 5.0,
           "motion/median hand values exact; self-dissimilarity 0 and symmetry x1000")
