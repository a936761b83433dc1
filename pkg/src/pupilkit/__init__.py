"""Iris and pupil detection for low-resolution visible-light eye images.

Detection scores every candidate iris circle with zero-sum three-region
masks (dark iris, bright sclera, neutral skin) over luminance, chroma and
horizontal symmetry, finds the pupil by its perimeter luminance gradient,
and keeps the most confident frame of a stream. The evaluation half loads
eye-center datasets, computes relative-error and pixel-overlap metrics,
and generates ground-truthed synthetic eyes.
"""

from .errors import (BothZero, DegenerateAnnotation, EmptyDataset, EmptyRing,
                     InvalidSpec, MalformedAnnotation, NoPupilContrast,
                     NoValidCandidate, OutOfBounds, PupilkitError,
                     RadiusTooSmall, RegionOutsideFrame, TooFewAnnotators,
                     UnreadableFile, UnsupportedFormat)
from .evaluation import (Circle, EvalRecord, EyeAnnotation, aggregate_errors,
                         circle_overlap, diameter_accuracy, inter_annotator,
                         load_bioid, pupil_prf, relative_errors, roi_provider,
                         tolerance_accuracy)
from .image import EyeRegion, Frame, RegionView, load_frame, region_view, to_luma_satv
from .iris import (IrisEstimate, ScoreAccumulators, accumulate,
                   default_radius_range, detect_iris, luminosity_score,
                   saturation_score, symmetry_score, total_score)
from .masks import MaskSet, build_mask, classify_cell, mask_bank, render_mask_text
from .pipeline import RunConfig, analyze_frame
from .pupil import (PupilEstimate, RadialProfile, detect_pupil, gradient_score,
                    radial_profile)
from .selector import (BestFrameState, FrameResult, confidence, disparity,
                       equality_factor, reset, score_frame, update_best)
from .synth import (SynthEyeSpec, SynthTruth, add_pupil_highlight, compose_face,
                    random_spec, synth_eye, write_dataset)

__version__ = "0.1.0"
