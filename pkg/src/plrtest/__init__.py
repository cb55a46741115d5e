"""Automated swinging-flashlight test analysis.

Per-frame pupil localization (Starburst) and sizing (Circular Hough
Transform), trace post-processing, a right/left dissimilarity index for
RAPD detection, an evaluation harness, and a synthetic labeled-data
generator. See the CLI (``plrtest --help``) for the end-to-end pipeline.
"""

from .backend import NATIVE
from .frame import CropWindow, Eye, Frame, FrameSequence, load_frame, load_sequence, quarter_crop, save_frame
from .hough import CircleMeasure, HoughConfig, cht_detect, edge_map, measure_pupil
from .metrics import ConfusionCounts, EvalReport, RocPoint, auc, confusion, evaluate_manifest, f_beta, operating_point, rates, roc_curve
from .rapd import DissimilarityKind, PipelineConfig, RapdAssessment, assess, dissimilarity, plcc, srcc
from .starburst import FeaturePoint, PupilCenterEstimate, StarburstConfig, cast_ray, detect_features, init_center, locate_pupil
from .synth import CaseManifest, PlrParams, RenderParams, StimulusSchedule, generate_case, plr_trace, render_frame, swinging_schedule
from .trace import PupilSample, PupilTrace, TraceConfig, median_smooth, motion_filter, pair_traces

__version__ = "0.1.0"
