"""Per-frame confidence scoring and streaming best-frame retention.

The confidence of a frame is the product of five factors: the rectified
iris scores of both eyes and three left/right equality factors (iris
radius, iris center height, pupil center height). A missing detection or
a zero factor zeroes the whole frame, so the running maximum is only ever
taken over frames where both eyes agree.

The raw relative disparity |l - r| / max(l, r) behind each equality factor
is kept as a diagnostic on the frame result, as is the left/right pupil
radius disparity (reported, but never part of the confidence product).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BothZero
from .iris import IrisEstimate
from .pupil import PupilEstimate

DEFAULT_WINDOW = 300


def disparity(l: float, r: float) -> float:
    """Raw relative difference |l - r| / max(l, r) of two measures >= 0."""
    if l < 0 or r < 0:
        raise ValueError(f"measures must be nonnegative, got ({l}, {r})")
    m = max(l, r)
    if m == 0:
        raise BothZero("relative difference of two zero measures is undefined")
    return abs(l - r) / m


def equality_factor(l: float, r: float) -> float:
    """1 at equality, 0 at maximal disparity."""
    return 1.0 - disparity(l, r)


def confidence(left: IrisEstimate, right: IrisEstimate,
               lp: PupilEstimate, rp: PupilEstimate) -> float:
    """Product of rectified iris scores and the three equality factors."""
    value = max(left.c, 0.0) * max(right.c, 0.0)
    for a, b in ((left.er, right.er), (left.ey, right.ey), (lp.py, rp.py)):
        try:
            value *= equality_factor(a, b)
        except BothZero:
            return 0.0
    return value


def _disparity_or_none(a: float, b: float) -> float | None:
    try:
        return disparity(a, b)
    except BothZero:
        return None


@dataclass
class FrameResult:
    """Detections and confidence for one frame."""

    frame_index: int
    left: IrisEstimate | None = None
    right: IrisEstimate | None = None
    left_pupil: PupilEstimate | None = None
    right_pupil: PupilEstimate | None = None
    confidence: float = 0.0
    # Raw disparities behind the equality factors, for inspection.
    disp_radius: float | None = None
    disp_ey: float | None = None
    disp_py: float | None = None
    disp_pr: float | None = None


def score_frame(frame_index: int, left: IrisEstimate | None,
                right: IrisEstimate | None, lp: PupilEstimate | None,
                rp: PupilEstimate | None) -> FrameResult:
    """Assemble a FrameResult; any missing detection zeroes confidence."""
    result = FrameResult(frame_index=frame_index, left=left, right=right,
                         left_pupil=lp, right_pupil=rp)
    if left is None or right is None or lp is None or rp is None:
        return result
    result.confidence = confidence(left, right, lp, rp)
    result.disp_radius = _disparity_or_none(left.er, right.er)
    result.disp_ey = _disparity_or_none(left.ey, right.ey)
    result.disp_py = _disparity_or_none(lp.py, rp.py)
    result.disp_pr = _disparity_or_none(lp.pr, rp.pr)
    return result


@dataclass
class BestFrameState:
    """Running maximum-confidence frame since the last reset."""

    best: FrameResult | None = None
    window_start: int = 0
    window_length: int = DEFAULT_WINDOW


def update_best(state: BestFrameState, result: FrameResult) -> BestFrameState:
    """Keep ``result`` iff strictly more confident than the current best.

    Equal confidence keeps the earlier frame.
    """
    if state.best is None or result.confidence > state.best.confidence:
        state.best = result
    return state


def reset(state: BestFrameState,
          window_start: int | None = None) -> BestFrameState:
    """Forget the current best and start a new window."""
    state.best = None
    if window_start is not None:
        state.window_start = window_start
    return state
