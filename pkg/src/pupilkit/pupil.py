"""Pupil detection inside a previously detected iris.

Around each candidate center, one pass over the surrounding disk bins luma
by rounded distance into a radial profile. A candidate pupil circle of
radius k is scored by the gradient between the mean luma of ring k+1 (the
immediate outer pixels) and ring k (the perimeter): a dark pupil on a
brighter iris gives a positive score, and the sign matters because an
inverted contrast must not be mistaken for a pupil.

Candidate circles must fall strictly inside the iris area, so sclera
pixels never leak into the gradient: the outer ring of a radius-k circle
centered o pixels from the iris center reaches iris-center distance
o + k + 1.5, and the iris disk of a radius-er estimate covers distance
er-1, which caps k at floor(er - 2.5 - o). Ring averaging makes the score
tolerant of small specular reflections.
"""

from __future__ import annotations

import math

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import EmptyRing, NoPupilContrast, OutOfBounds
from .image import Frame
from .iris import IrisEstimate


@dataclass(frozen=True)
class RadialProfile:
    """Luma sums and pixel counts per rounded-distance ring around (cx, cy)."""

    cx: int
    cy: int
    k_max: int
    ring_sum: np.ndarray
    ring_count: np.ndarray

    def ring_mean(self, k: int) -> float:
        count = int(self.ring_count[k])
        if count == 0:
            raise EmptyRing(f"ring {k} has no pixels")
        return int(self.ring_sum[k]) / count


@dataclass(frozen=True)
class PupilEstimate:
    """Best pupil circle for one eye: center, radius and gradient score."""

    px: int
    py: int
    pr: int
    g: float
    side: str = "left"


@lru_cache(maxsize=None)
def _ring_grid(k_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Rounded-distance index grid over the (2k+1)^2 square, plus validity.

    A pixel belongs to ring k when round(distance) = k; square corners
    beyond k_max are masked out.
    """
    offsets = np.arange(-k_max, k_max + 1)
    d = np.sqrt(offsets[:, None] ** 2 + offsets[None, :] ** 2)
    ring = np.floor(d + 0.5).astype(np.int64)
    return ring, ring <= k_max


def radial_profile(frame: Frame, cx: int, cy: int, k_max: int) -> RadialProfile:
    """Bin luma by rounded distance from (cx, cy) in a single pass."""
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    if (cx - k_max < 0 or cx + k_max >= frame.width
            or cy - k_max < 0 or cy + k_max >= frame.height):
        raise OutOfBounds(
            f"scan disk of radius {k_max} at ({cx},{cy}) exceeds frame "
            f"{frame.width}x{frame.height}")
    patch = frame.luma[cy - k_max: cy + k_max + 1,
                       cx - k_max: cx + k_max + 1].astype(np.int64)
    ring, valid = _ring_grid(k_max)
    idx = ring[valid]
    vals = patch[valid]
    counts = np.bincount(idx, minlength=k_max + 1)
    sums = np.bincount(idx, weights=vals.astype(np.float64),
                       minlength=k_max + 1).astype(np.int64)
    return RadialProfile(cx=cx, cy=cy, k_max=k_max,
                         ring_sum=sums, ring_count=counts)


def gradient_score(profile: RadialProfile, k: int) -> float:
    """Mean luma of ring k+1 minus ring k; positive for a dark perimeter."""
    if k < 1 or k + 1 > profile.k_max:
        raise ValueError(
            f"radius {k} outside profile range [1, {profile.k_max - 1}]")
    return profile.ring_mean(k + 1) - profile.ring_mean(k)


def default_neighborhood(er: int) -> int:
    """Search half-width around the iris center for pupil candidates."""
    return max(1, round(er / 4))


def detect_pupil(frame: Frame, iris: IrisEstimate,
                 neighborhood: int | None = None) -> PupilEstimate:
    """Maximize the perimeter gradient over candidate circles in the iris.

    Scans every center within the Chebyshev neighborhood of (ex, ey) and,
    per center, every radius whose circle plus outer comparison ring stays
    strictly inside the iris disk. Ties break toward the smaller radius,
    then raster order of the center. Centers whose scan disk leaves the
    frame are skipped.

    Raises NoPupilContrast when the best gradient is not positive (or the
    iris is too small to host any candidate), OutOfBounds when every
    candidate center falls outside the frame.
    """
    if neighborhood is None:
        neighborhood = default_neighborhood(iris.er)
    if neighborhood < 0:
        raise ValueError(f"neighborhood must be >= 0, got {neighborhood}")
    if iris.er - 3 < 1:
        raise NoPupilContrast(
            f"iris radius {iris.er} leaves no room for an interior pupil")

    best_g = 0.0
    best_key = None
    scanned = False
    for py in range(iris.ey - neighborhood, iris.ey + neighborhood + 1):
        for px in range(iris.ex - neighborhood, iris.ex + neighborhood + 1):
            offset = math.hypot(px - iris.ex, py - iris.ey)
            k_hi = math.floor(iris.er - 2.5 - offset)
            if k_hi < 1:
                continue
            k_max = k_hi + 1
            if (px - k_max < 0 or px + k_max >= frame.width
                    or py - k_max < 0 or py + k_max >= frame.height):
                continue
            scanned = True
            profile = radial_profile(frame, px, py, k_max)
            means = profile.ring_sum / profile.ring_count
            for k in range(1, k_hi + 1):
                g = float(means[k + 1] - means[k])
                key = (k, py, px)
                if best_key is None or g > best_g or (g == best_g
                                                      and key < best_key):
                    best_g = g
                    best_key = key
    if not scanned:
        raise OutOfBounds(
            f"no pupil candidate around ({iris.ex},{iris.ey}) fits frame "
            f"{frame.width}x{frame.height}")
    if best_g <= 0.0:
        raise NoPupilContrast(
            f"best gradient {best_g:.3f} is not positive: no darker-than-"
            "surround circle inside the iris")
    k, py, px = best_key
    return PupilEstimate(px=px, py=py, pr=k, g=best_g, side=iris.side)
