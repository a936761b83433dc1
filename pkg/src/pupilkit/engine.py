"""Bulk candidate scanner behind detect_iris.

Scoring a candidate needs only row-range sums of the two channels over the
iris disk and sclera ellipse, a rectangle sum, and column-range sums of the
mirrored-difference images. All of those come from prefix sums, so the scan
does O(r) lookups per candidate instead of touching every mask cell, while
producing exactly the integer region sums of the one-pass accumulator.
The hot loop is compiled with numba; everything stays in int64 until the
final normalizations, so results are bit-identical to scoring candidates
one at a time and deterministic across runs and platforms.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .image import EyeRegion, Frame
from .masks import build_mask


@njit(cache=True)
def _scan(cxl, cxs, iis, cyd, radii, offs, wd_flat, we_flat, m_flat,
          n_iris, n_sclera, n_skin, cx_lo, cx_hi, cy_lo, cy_hi, stride):
    found = False
    best_c = 0.0
    best_r = 0
    best_cy = 0
    best_cx = 0
    best_l = 0.0
    best_s = 0.0
    best_h = 0.0
    for i in range(radii.shape[0]):
        r = radii[i]
        big_r = r - 1
        hw = 2 * r + 3
        hh = big_r
        off = offs[i]
        ni = n_iris[i]
        ns = n_sclera[i]
        nis = ni + n_skin[i]
        nisc = ni + ns
        for cy in range(cy_lo[i], cy_hi[i] + 1, stride):
            for cx in range(cx_lo[i], cx_hi[i] + 1, stride):
                disk_l = 0
                disk_s = 0
                ell_l = 0
                ell_s = 0
                for t in range(2 * big_r + 1):
                    row = cy - big_r + t
                    wd = wd_flat[off + t]
                    we = we_flat[off + t]
                    disk_l += cxl[row, cx + wd + 1] - cxl[row, cx - wd]
                    disk_s += cxs[row, cx + wd + 1] - cxs[row, cx - wd]
                    ell_l += cxl[row, cx + we + 1] - cxl[row, cx - we]
                    ell_s += cxs[row, cx + we + 1] - cxs[row, cx - we]
                rect_s = (iis[cy + hh + 1, cx + hw + 1]
                          - iis[cy - hh, cx + hw + 1]
                          - iis[cy + hh + 1, cx - hw]
                          + iis[cy - hh, cx - hw])
                sym = 0
                for dx in range(1, 2 * big_r + 1):
                    m = m_flat[off + dx]
                    sym += cyd[dx, cy + m + 1, cx] - cyd[dx, cy - m, cx]
                sym *= 2
                l = (ell_l - disk_l) / ns - disk_l / ni
                s = (disk_s + (rect_s - ell_s)) / nis - (ell_s - disk_s) / ns
                h = -(sym / nisc)
                c = l + s + h
                if (not found) or c > best_c:
                    found = True
                    best_c = c
                    best_r = r
                    best_cy = cy
                    best_cx = cx
                    best_l = l
                    best_s = s
                    best_h = h
    return found, best_r, best_cy, best_cx, best_l, best_s, best_h, best_c


def _aligned_lo(origin: int, lo: int, stride: int) -> int:
    """Smallest value >= lo on the stride grid anchored at origin."""
    return origin + -(-(lo - origin) // stride) * stride


def search(frame: Frame, roi: EyeRegion, radii, stride: int = 1):
    """Scan all (center, radius) candidates; return the best or None.

    Returns (r, ey, ex, l, s, h, c) in frame coordinates, or None when no
    candidate admits an in-frame mask footprint.
    """
    radii = [int(r) for r in radii]
    if not radii:
        return None
    w_frame, h_frame = frame.width, frame.height
    rx0, ry0 = roi.x, roi.y
    rx1, ry1 = roi.x + roi.w - 1, roi.y + roi.h - 1
    r_top = max(radii)
    hw_max, hh_max = 2 * r_top + 3, r_top - 1

    x0 = max(0, rx0 - hw_max)
    x1 = min(w_frame, rx1 + hw_max + 1)
    y0 = max(0, ry0 - hh_max)
    y1 = min(h_frame, ry1 + hh_max + 1)
    lc = frame.luma[y0:y1, x0:x1].astype(np.int64)
    sc = frame.satv[y0:y1, x0:x1].astype(np.int64)
    h, w = lc.shape

    cxl = np.zeros((h, w + 1), np.int64)
    cxl[:, 1:] = np.cumsum(lc, axis=1)
    cxs = np.zeros((h, w + 1), np.int64)
    cxs[:, 1:] = np.cumsum(sc, axis=1)
    iis = np.zeros((h + 1, w + 1), np.int64)
    iis[1:, 1:] = np.cumsum(np.cumsum(sc, axis=0), axis=1)

    ndx = max(1, 2 * (r_top - 1))
    cyd = np.zeros((ndx + 1, h + 1, w), np.int64)
    for dx in range(1, ndx + 1):
        if 2 * dx >= w:
            break
        diff = (np.abs(lc[:, 2 * dx:] - lc[:, :w - 2 * dx])
                + np.abs(sc[:, 2 * dx:] - sc[:, :w - 2 * dx]))
        np.cumsum(diff, axis=0, out=cyd[dx, 1:, dx:w - dx])

    offs = [0]
    wd_l: list[int] = []
    we_l: list[int] = []
    m_l: list[int] = []
    ni_l, ns_l, nk_l = [], [], []
    xlo, xhi, ylo, yhi = [], [], [], []
    any_valid = False
    for r in radii:
        mask = build_mask(r)
        wd_l.extend(mask.row_disk_hw.tolist())
        we_l.extend(mask.row_ell_hw.tolist())
        m_l.append(0)  # slot for dx = 0, never read
        m_l.extend(mask.col_ell_hh[1:].tolist())
        offs.append(offs[-1] + mask.grid_h)
        ni_l.append(mask.n_iris)
        ns_l.append(mask.n_sclera)
        nk_l.append(mask.n_skin)
        hw, hh = mask.half_w, mask.half_h
        lo_x = _aligned_lo(rx0, max(rx0, hw), stride)
        hi_x = min(rx1, w_frame - 1 - hw)
        lo_y = _aligned_lo(ry0, max(ry0, hh), stride)
        hi_y = min(ry1, h_frame - 1 - hh)
        if lo_x <= hi_x and lo_y <= hi_y:
            any_valid = True
        else:
            lo_x, hi_x, lo_y, hi_y = 0, -1, 0, -1
        xlo.append(lo_x - x0)
        xhi.append(hi_x - x0)
        ylo.append(lo_y - y0)
        yhi.append(hi_y - y0)
    if not any_valid:
        return None

    arr = lambda v: np.asarray(v, dtype=np.int64)
    found, r, cy, cx, l, s, h_score, c = _scan(
        cxl, cxs, iis, cyd, arr(radii), arr(offs), arr(wd_l), arr(we_l),
        arr(m_l), arr(ni_l), arr(ns_l), arr(nk_l),
        arr(xlo), arr(xhi), arr(ylo), arr(yhi), stride)
    if not found:
        return None
    return int(r), int(cy) + y0, int(cx) + x0, float(l), float(s), float(h_score), float(c)
