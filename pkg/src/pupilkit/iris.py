"""Iris detection: one-pass mask scoring plus exhaustive candidate search.

For a candidate (center, radius), a single iteration over the mask cells
fills every accumulator at once (luma sums per distance ring, sclera sums,
saturation sums per region, and the mirrored-difference sum). The three
criterion scores are then constant-cost normalizations of those sums:

* luminosity  l = mean(luma over sclera) - mean(luma over iris)
* saturation  s = mean(satv over iris+skin) - mean(satv over sclera)
* symmetry    h = -mean(|luma - mirrored luma| + |satv - mirrored satv|
                  over iris+sclera)

and c = l + s + h. All sums are exact integers; the only floating-point
operations are the final per-region normalizations, so a single-candidate
accumulate and the bulk search produce bit-identical scores.

detect_iris scans every roi pixel (optionally strided) against every
radius in range and returns the maximum-score candidate, breaking ties by
smaller radius, then raster order of the center.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoValidCandidate, OutOfBounds, RadiusTooSmall
from .image import EyeRegion, Frame, region_view
from .masks import MaskSet

# Normalizations per candidate: 2 for l, 2 for s, 1 for h. Independent of
# the mask size by construction.
SCORE_NORMALIZATIONS = 5


@dataclass
class OpCounts:
    """Operation counters for the instrumented accumulation path."""

    cell_visits: int = 0
    additions: int = 0
    multiplications: int = 0


@dataclass
class ScoreAccumulators:
    """Region sums gathered in one pass over a mask footprint."""

    lum_ring_sum: np.ndarray     # index k in 1..r, slot 0 unused
    lum_ring_count: np.ndarray
    lum_sclera_sum: int
    sat_iris_sum: int
    sat_skin_sum: int
    sat_sclera_sum: int
    sym_sum: int

    @property
    def lum_iris_sum(self) -> int:
        return int(self.lum_ring_sum.sum())


def accumulate(frame: Frame, cx: int, cy: int, mask: MaskSet,
               ops: OpCounts | None = None) -> ScoreAccumulators:
    """Fill all score accumulators in one pass over the mask cells.

    Raises OutOfBounds when the mask footprint centered at (cx, cy) does
    not fit inside the frame. When ``ops`` is given, counts one visit per
    cell and every accumulator addition; the pass itself performs no
    multiplications.
    """
    hw, hh = mask.half_w, mask.half_h
    luma = region_view(frame.luma, cx, cy, hw, hh).patch().tolist()
    satv = region_view(frame.satv, cx, cy, hw, hh).patch().tolist()
    labels = mask.labels.tolist()
    gw = mask.grid_w

    ring_sum = [0] * (mask.r + 1)
    ring_count = [0] * (mask.r + 1)
    lum_sclera = 0
    sat_iris = 0
    sat_skin = 0
    sat_sclera = 0
    sym = 0
    visits = 0
    adds = 0

    for iy in range(mask.grid_h):
        lab_row = labels[iy]
        lum_row = luma[iy]
        sat_row = satv[iy]
        for ix in range(gw):
            visits += 1
            lab = lab_row[ix]
            if lab > 0:
                lv = lum_row[ix]
                sv = sat_row[ix]
                mx = gw - 1 - ix
                ring_sum[lab] += lv
                ring_count[lab] += 1
                sat_iris += sv
                sym += abs(lv - lum_row[mx]) + abs(sv - sat_row[mx])
                adds += 4
            elif lab < 0:
                lv = lum_row[ix]
                sv = sat_row[ix]
                mx = gw - 1 - ix
                lum_sclera += lv
                sat_sclera += sv
                sym += abs(lv - lum_row[mx]) + abs(sv - sat_row[mx])
                adds += 3
            else:
                sat_skin += sat_row[ix]
                adds += 1

    if ops is not None:
        ops.cell_visits += visits
        ops.additions += adds

    return ScoreAccumulators(
        lum_ring_sum=np.array(ring_sum, dtype=np.int64),
        lum_ring_count=np.array(ring_count, dtype=np.int64),
        lum_sclera_sum=lum_sclera,
        sat_iris_sum=sat_iris,
        sat_skin_sum=sat_skin,
        sat_sclera_sum=sat_sclera,
        sym_sum=sym,
    )


def luminosity_score(acc: ScoreAccumulators, mask: MaskSet,
                     ops: OpCounts | None = None) -> float:
    """Sclera-vs-iris luminance contrast; positive for a dark iris."""
    if ops is not None:
        ops.multiplications += 2
    return acc.lum_sclera_sum / mask.n_sclera - acc.lum_iris_sum / mask.n_iris


def saturation_score(acc: ScoreAccumulators, mask: MaskSet,
                     ops: OpCounts | None = None) -> float:
    """Iris+skin vs sclera chroma contrast; positive for a pale sclera."""
    if ops is not None:
        ops.multiplications += 2
    return ((acc.sat_iris_sum + acc.sat_skin_sum) / (mask.n_iris + mask.n_skin)
            - acc.sat_sclera_sum / mask.n_sclera)


def symmetry_score(acc: ScoreAccumulators, mask: MaskSet,
                   ops: OpCounts | None = None) -> float:
    """Penalty for horizontal asymmetry over iris and sclera cells; <= 0."""
    if ops is not None:
        ops.multiplications += 1
    if acc.sym_sum == 0:
        return 0.0
    return -(acc.sym_sum / (mask.n_iris + mask.n_sclera))


def total_score(l: float, s: float, h: float) -> float:
    return l + s + h


def score_candidate(frame: Frame, cx: int, cy: int, mask: MaskSet,
                    ops: OpCounts | None = None) -> tuple[float, float, float, float]:
    """Accumulate and score one candidate; returns (l, s, h, c)."""
    acc = accumulate(frame, cx, cy, mask, ops)
    l = luminosity_score(acc, mask, ops)
    s = saturation_score(acc, mask, ops)
    h = symmetry_score(acc, mask, ops)
    return l, s, h, total_score(l, s, h)


@dataclass(frozen=True)
class IrisEstimate:
    """Best-scoring iris candidate for one eye."""

    ex: int
    ey: int
    er: int
    l: float
    s: float
    h: float
    c: float
    side: str = "left"


def default_radius_range(roi_w: int, frame_w: int | None = None,
                         frame_h: int | None = None) -> tuple[int, int]:
    """Radius search range derived from the eye-box width.

    The iris radius is a bounded fraction of an eye bounding box; the
    defaults assume the box is roughly an eye width across. When frame
    dimensions are given, radii whose mask could never fit are dropped.
    """
    r_min = max(2, round(0.08 * roi_w))
    r_max = max(r_min, round(0.25 * roi_w))
    if frame_w is not None:
        r_max = min(r_max, (frame_w - 9) // 4)
    if frame_h is not None:
        r_max = min(r_max, (frame_h - 1) // 2)
    r_max = max(2, r_max)
    r_min = min(r_min, r_max)
    return r_min, r_max


def detect_iris(frame: Frame, roi: EyeRegion, r_min: int | None = None,
                r_max: int | None = None, stride: int = 1) -> IrisEstimate:
    """Exhaustively score (center, radius) candidates and return the argmax.

    Candidate centers are the roi pixels on the stride grid; candidates
    whose mask footprint leaves the frame are skipped, not padded. Ties
    are broken toward the smaller radius, then the raster-first center.

    Raises NoValidCandidate when no candidate admits an in-frame mask.
    """
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    if not roi.inside(frame.width, frame.height):
        raise OutOfBounds(
            f"roi {roi} exceeds frame {frame.width}x{frame.height}")
    if r_min is None or r_max is None:
        d_min, d_max = default_radius_range(roi.w, frame.width, frame.height)
        r_min = d_min if r_min is None else r_min
        r_max = d_max if r_max is None else r_max
    if r_min < 2:
        raise RadiusTooSmall(f"r_min must be >= 2, got {r_min}")
    if r_min > r_max:
        raise ValueError(f"empty radius range [{r_min}, {r_max}]")

    from . import engine

    best = engine.search(frame, roi, range(r_min, r_max + 1), stride)
    if best is None:
        raise NoValidCandidate(
            f"no (center, radius) candidate fits the frame for roi {roi} "
            f"with radii [{r_min}, {r_max}]")
    er, ey, ex, l, s, h, c = best
    return IrisEstimate(ex=ex, ey=ey, er=er, l=l, s=s, h=h + 0.0, c=c,
                        side=roi.side)
