"""Three-region detection masks parametrized by iris radius.

A mask of radius r is a (2r-1) x (4r+7) grid of cells around its center.
Each cell belongs to exactly one region:

* iris: cells within Euclidean distance r-1 of the center. An iris cell
  stores a ring index k in 1..r equal to ceil(distance)+1, so the center
  is ring 1 and the outermost shell is ring r. Ring indices double as the
  bin index for distance-tagged accumulation.
* sclera: non-iris cells inside the closed co-centered ellipse with
  semi-axes (2(r-1), r-1), i.e. dx^2 + 4*dy^2 <= 4*(r-1)^2.
* skin: everything else in the grid.

All membership tests are pure integer comparisons, so grids are bit-stable
across platforms. Per-criterion weights are normalized per region count so
each criterion sums to zero over the grid: uniform regions score exactly
nothing, and scores stay comparable across radii.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import RadiusTooSmall

SCLERA = -1
SKIN = 0


def classify_cell(dx: int, dy: int, r: int) -> int:
    """Label one mask cell: ring index k>=1, SCLERA (-1) or SKIN (0).

    Caller must keep |dx| <= 2r+3 and |dy| <= r-1; out-of-grid offsets are
    a programming error, not a data error.
    """
    rho = r - 1
    d2 = dx * dx + dy * dy
    if d2 <= rho * rho:
        # ceil(sqrt(d2)) + 1, computed without floats
        ring = 1 if d2 == 0 else math.isqrt(d2 - 1) + 2
        return ring
    if dx * dx + 4 * dy * dy <= 4 * rho * rho:
        return SCLERA
    return SKIN


@dataclass(eq=False)
class MaskSet:
    """One mask: label grid, region counts, weights and row tables.

    ``row_disk_hw[i]`` / ``row_ell_hw[i]`` give the half-width of the iris
    disk / sclera ellipse on row dy = i - (r-1); ``col_ell_hh[j]`` gives
    the half-height of the ellipse at dx offset j (0..2(r-1)). The row and
    column tables let callers turn region sums into prefix-sum lookups.
    """

    r: int
    grid_w: int
    grid_h: int
    labels: np.ndarray
    n_iris: int
    n_sclera: int
    n_skin: int
    w_lum_iris: float
    w_lum_sclera: float
    w_sat_iris_skin: float
    w_sat_sclera: float
    w_sym: float
    row_disk_hw: np.ndarray = field(repr=False)
    row_ell_hw: np.ndarray = field(repr=False)
    col_ell_hh: np.ndarray = field(repr=False)

    @property
    def half_w(self) -> int:
        return 2 * self.r + 3

    @property
    def half_h(self) -> int:
        return self.r - 1


@lru_cache(maxsize=None)
def build_mask(r: int) -> MaskSet:
    """Construct (and cache) the mask for iris radius r."""
    if r < 2:
        raise RadiusTooSmall(f"mask radius must be >= 2, got {r}")
    rho = r - 1
    grid_h = 2 * r - 1
    grid_w = 4 * r + 7

    dys = np.arange(-rho, rho + 1)
    dxs = np.arange(-(2 * r + 3), 2 * r + 4)
    d2 = dxs[np.newaxis, :] ** 2 + dys[:, np.newaxis] ** 2
    iris = d2 <= rho * rho
    ellipse = dxs[np.newaxis, :] ** 2 + 4 * dys[:, np.newaxis] ** 2 <= 4 * rho * rho

    labels = np.zeros((grid_h, grid_w), dtype=np.int16)
    labels[ellipse & ~iris] = SCLERA
    # ring = ceil(sqrt(d2)) + 1; d2 values are small, float sqrt is exact
    # enough that ceil only lands on an integer for perfect squares
    rings = np.ceil(np.sqrt(d2)).astype(np.int16) + 1
    labels[iris] = rings[iris]

    n_iris = int(iris.sum())
    n_ellipse = int(ellipse.sum())
    n_sclera = n_ellipse - n_iris
    n_skin = grid_h * grid_w - n_ellipse

    row_disk_hw = np.array([math.isqrt(rho * rho - dy * dy) for dy in dys],
                           dtype=np.int64)
    row_ell_hw = np.array([math.isqrt(4 * (rho * rho - dy * dy)) for dy in dys],
                          dtype=np.int64)
    col_ell_hh = np.array(
        [math.isqrt(4 * rho * rho - dx * dx) // 2 for dx in range(2 * rho + 1)],
        dtype=np.int64)

    return MaskSet(
        r=r,
        grid_w=grid_w,
        grid_h=grid_h,
        labels=labels,
        n_iris=n_iris,
        n_sclera=n_sclera,
        n_skin=n_skin,
        w_lum_iris=-1.0 / n_iris,
        w_lum_sclera=1.0 / n_sclera,
        w_sat_iris_skin=1.0 / (n_iris + n_skin),
        w_sat_sclera=-1.0 / n_sclera,
        w_sym=-1.0 / (n_iris + n_sclera),
        row_disk_hw=row_disk_hw,
        row_ell_hw=row_ell_hw,
        col_ell_hh=col_ell_hh,
    )


def mask_bank(r_min: int, r_max: int) -> dict[int, MaskSet]:
    """Build masks for every radius in [r_min, r_max], shared read-only."""
    if r_min < 2:
        raise RadiusTooSmall(f"mask radius must be >= 2, got {r_min}")
    if r_min > r_max:
        raise ValueError(f"empty radius range [{r_min}, {r_max}]")
    return {r: build_mask(r) for r in range(r_min, r_max + 1)}


def render_mask_text(mask: MaskSet) -> str:
    """Render the label grid as text: ring digits, '-' sclera, '0' skin."""
    rows = []
    for row in mask.labels:
        rows.append(" ".join(
            "-" if v == SCLERA else str(int(v)) for v in row))
    return "\n".join(rows)
