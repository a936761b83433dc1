"""Glue between the detectors and the CLI: one frame in, one result out."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NoPupilContrast, NoValidCandidate, OutOfBounds
from .image import EyeRegion, Frame
from .iris import IrisEstimate, detect_iris
from .pupil import PupilEstimate, detect_pupil
from .selector import DEFAULT_WINDOW, FrameResult, score_frame

DEFAULT_TOLERANCES = (0.05, 0.1, 0.25)


@dataclass
class RunConfig:
    """Knobs shared by the CLI subcommands; None means per-module default."""

    r_min: int | None = None
    r_max: int | None = None
    stride: int = 1
    neighborhood: int | None = None
    window: int = DEFAULT_WINDOW
    roi_mode: str = "centered"
    roi_pad: int = 0
    jitter_seed: int = 0
    frame_stride: int = 1
    workers: int = 1
    fmt: str = "csv"
    tolerances: tuple = DEFAULT_TOLERANCES

    def __post_init__(self):
        for name in ("stride", "frame_stride", "workers", "window"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.roi_pad < 0:
            raise ValueError("roi_pad must be >= 0")


def _detect_eye(frame: Frame, roi: EyeRegion,
                cfg: RunConfig) -> tuple[IrisEstimate | None, PupilEstimate | None]:
    try:
        iris = detect_iris(frame, roi, cfg.r_min, cfg.r_max, cfg.stride)
    except NoValidCandidate:
        return None, None
    try:
        pupil = detect_pupil(frame, iris, cfg.neighborhood)
    except (NoPupilContrast, OutOfBounds):
        return iris, None
    return iris, pupil


def analyze_frame(frame: Frame, left_roi: EyeRegion, right_roi: EyeRegion,
                  cfg: RunConfig | None = None) -> FrameResult:
    """Detect both eyes and pupils and fold them into a scored FrameResult.

    A failed iris detection leaves that eye empty (and the pupil stage is
    skipped); the frame then carries zero confidence rather than an error.
    """
    cfg = cfg or RunConfig()
    left, left_pupil = _detect_eye(frame, left_roi, cfg)
    right, right_pupil = _detect_eye(frame, right_roi, cfg)
    return score_frame(frame.frame_index, left, right, left_pupil, right_pupil)
