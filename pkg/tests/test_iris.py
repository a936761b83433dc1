from dataclasses import replace

import numpy as np
import pytest
from oracles import brute_force_iris, naive_region_sums, naive_scores

from conftest import constant_frame
from pupilkit.errors import NoValidCandidate, OutOfBounds
from pupilkit.image import EyeRegion, Frame
from pupilkit.iris import (OpCounts, accumulate, default_radius_range,
                           detect_iris, luminosity_score, saturation_score,
                           score_candidate, symmetry_score, total_score)
from pupilkit.masks import SCLERA, build_mask
from pupilkit.synth import SynthEyeSpec, synth_eye


def random_triple(rng, frame, r_lo=2, r_hi=10):
    r = int(rng.integers(r_lo, r_hi + 1))
    mask = build_mask(r)
    cx = int(rng.integers(mask.half_w, frame.width - mask.half_w))
    cy = int(rng.integers(mask.half_h, frame.height - mask.half_h))
    return cx, cy, mask


def frame_from_mask_regions(mask, iris_luma, sclera_luma, skin_luma,
                            iris_satv=128, sclera_satv=128, skin_satv=128):
    """Frame whose mask footprint has constant values per region."""
    luma = np.full(mask.labels.shape, skin_luma, dtype=np.uint8)
    satv = np.full(mask.labels.shape, skin_satv, dtype=np.uint8)
    luma[mask.labels > 0] = iris_luma
    satv[mask.labels > 0] = iris_satv
    luma[mask.labels == SCLERA] = sclera_luma
    satv[mask.labels == SCLERA] = sclera_satv
    return Frame(width=mask.grid_w, height=mask.grid_h, luma=luma, satv=satv)


class TestAccumulate:
    def test_constant_frame(self):
        frame = constant_frame(64, 64, 128, 128)
        mask = build_mask(8)
        acc = accumulate(frame, 32, 32, mask)
        for k in range(1, 9):
            assert acc.lum_ring_sum[k] == 128 * acc.lum_ring_count[k]
        assert acc.sym_sum == 0
        assert int(acc.lum_ring_count.sum()) == mask.n_iris

    def test_mirror_symmetric_frame_has_zero_sym(self, rng):
        half = rng.integers(0, 256, (31, 20), dtype=np.uint8)
        luma = np.hstack([half, half[:, ::-1]])
        frame = Frame.from_channels(luma)
        # center on the mirror axis: columns 19 and 20 are reflections
        mask = build_mask(3)
        acc = accumulate(frame, 19, 15, mask)
        assert acc.sym_sum > 0  # axis between pixels: not symmetric there
        sym_luma = np.hstack([half, half[:, -2::-1]])  # odd width, shared col
        frame = Frame.from_channels(sym_luma)
        acc = accumulate(frame, 19, 15, mask)
        assert acc.sym_sum == 0

    def test_matches_naive_oracle(self, rng, random_frame):
        for _ in range(25):
            cx, cy, mask = random_triple(rng, random_frame)
            acc = accumulate(random_frame, cx, cy, mask)
            ref = naive_region_sums(random_frame, cx, cy, mask)
            assert list(acc.lum_ring_sum) == ref["ring_sum"]
            assert list(acc.lum_ring_count) == ref["ring_count"]
            assert acc.lum_sclera_sum == ref["lum_sclera_sum"]
            assert acc.sat_iris_sum == ref["sat_iris_sum"]
            assert acc.sat_skin_sum == ref["sat_skin_sum"]
            assert acc.sat_sclera_sum == ref["sat_sclera_sum"]
            assert acc.sym_sum == ref["sym_sum"]

    def test_out_of_bounds(self):
        frame = constant_frame(20, 20, 0)
        with pytest.raises(OutOfBounds):
            accumulate(frame, 3, 10, build_mask(4))

    def test_one_visit_per_cell_and_no_multiplications(self):
        frame = constant_frame(80, 80, 77)
        for r in (3, 12):
            mask = build_mask(r)
            ops = OpCounts()
            accumulate(frame, 40, 40, mask, ops)
            assert ops.cell_visits == mask.grid_h * mask.grid_w
            assert ops.multiplications == 0

    def test_normalization_count_independent_of_radius(self):
        frame = constant_frame(80, 80, 77)
        counts = []
        for r in (3, 12):
            mask = build_mask(r)
            ops = OpCounts()
            acc = accumulate(frame, 40, 40, mask, ops)
            luminosity_score(acc, mask, ops)
            saturation_score(acc, mask, ops)
            symmetry_score(acc, mask, ops)
            counts.append(ops.multiplications)
        assert counts[0] == counts[1] == 5


class TestScores:
    def test_constant_region_scores_exactly_zero(self):
        frame = constant_frame(64, 64, 200, 37)
        for r in (2, 5, 8):
            mask = build_mask(r)
            acc = accumulate(frame, 32, 32, mask)
            assert luminosity_score(acc, mask) == 0.0
            assert saturation_score(acc, mask) == 0.0
            assert symmetry_score(acc, mask) == 0.0

    def test_dark_iris_bright_sclera_maximizes_l(self):
        mask = build_mask(8)
        frame = frame_from_mask_regions(mask, iris_luma=0, sclera_luma=255,
                                        skin_luma=10)
        acc = accumulate(frame, mask.half_w, mask.half_h, mask)
        assert luminosity_score(acc, mask) == 255.0

    def test_bright_iris_dark_sclera_minimizes_l(self):
        mask = build_mask(8)
        frame = frame_from_mask_regions(mask, iris_luma=255, sclera_luma=0,
                                        skin_luma=10)
        acc = accumulate(frame, mask.half_w, mask.half_h, mask)
        assert luminosity_score(acc, mask) == -255.0

    def test_saturation_contrast(self):
        mask = build_mask(8)
        frame = frame_from_mask_regions(mask, 0, 0, 0, iris_satv=200,
                                        sclera_satv=40, skin_satv=200)
        acc = accumulate(frame, mask.half_w, mask.half_h, mask)
        assert saturation_score(acc, mask) == 160.0

    def test_grayscale_saturation_is_zero(self):
        frame = constant_frame(64, 64, 90, 128)
        mask = build_mask(6)
        acc = accumulate(frame, 30, 30, mask)
        assert saturation_score(acc, mask) == 0.0

    def test_half_split_symmetry_penalty(self):
        # left half 0, right half 255 in both channels; mirror-axis cells
        # (dx = 0) match themselves, every other iris or sclera cell
        # contributes |0 - 255| twice
        mask = build_mask(8)
        luma = np.zeros((15, 39), dtype=np.uint8)
        luma[:, 19:] = 255
        frame = Frame(width=39, height=15, luma=luma, satv=luma.copy())
        acc = accumulate(frame, 19, 7, mask)
        axis_cells = int(np.count_nonzero(mask.labels[:, 19]))
        expected_sum = 510 * (mask.n_iris + mask.n_sclera - axis_cells)
        assert acc.sym_sum == expected_sum
        h = symmetry_score(acc, mask)
        assert h == -expected_sum / (mask.n_iris + mask.n_sclera)
        assert h == pytest.approx(-484.7524752475248)
        l, s, h2, c = naive_scores(frame, 19, 7, mask)
        assert h2 == h

    def test_symmetry_nonpositive(self, rng, random_frame):
        for _ in range(10):
            cx, cy, mask = random_triple(rng, random_frame)
            acc = accumulate(random_frame, cx, cy, mask)
            assert symmetry_score(acc, mask) <= 0.0

    def test_total_score_addition(self):
        assert total_score(0, 0, 0) == 0
        assert total_score(255, 160, 0) == 415
        assert total_score(255, 0, -510) == -255


class TestOnePassEquivalence:
    def test_matches_naive_triple_loop(self, rng):
        luma = rng.integers(0, 256, (64, 64), dtype=np.uint8)
        satv = rng.integers(0, 256, (64, 64), dtype=np.uint8)
        frame = Frame(width=64, height=64, luma=luma, satv=satv)
        for _ in range(200):
            cx, cy, mask = random_triple(rng, frame, 2, 9)
            got = score_candidate(frame, cx, cy, mask)
            want = naive_scores(frame, cx, cy, mask)
            for g, w in zip(got, want):
                assert g == pytest.approx(w, rel=1e-9, abs=1e-12)


class TestDetectIris:
    def test_recovers_synthetic_eye(self):
        spec = SynthEyeSpec(width=96, height=64, cx=40, cy=20, iris_r=9,
                            pupil_r=4, sclera_ax=18, sclera_ay=10,
                            skin_luma=150, sclera_luma=240, iris_luma=40,
                            pupil_luma=15)
        frame, truth = synth_eye(spec, seed=0)
        roi = EyeRegion(x=30, y=12, w=21, h=17, side="left")
        est = detect_iris(frame, roi, 5, 14)
        assert (est.ex, est.ey, est.er) == (40, 20, 9)
        assert est.c > 0
        assert est.c == est.l + est.s + est.h

    def test_matches_brute_force(self, rng):
        luma = rng.integers(0, 256, (40, 40), dtype=np.uint8)
        satv = rng.integers(0, 256, (40, 40), dtype=np.uint8)
        frame = Frame(width=40, height=40, luma=luma, satv=satv)
        roi = EyeRegion(x=12, y=12, w=16, h=16, side="right")
        want = brute_force_iris(frame, roi, 2, 4)
        got = detect_iris(frame, roi, 2, 4)
        assert got == want  # bit-identical scores and same tie-break

    def test_matches_brute_force_strided(self, rng):
        luma = rng.integers(0, 256, (40, 40), dtype=np.uint8)
        frame = Frame.from_channels(luma)
        roi = EyeRegion(x=10, y=10, w=18, h=18, side="left")
        assert detect_iris(frame, roi, 2, 3, stride=3) == \
            brute_force_iris(frame, roi, 2, 3, stride=3)

    def test_matches_brute_force_with_clipped_footprints(self, rng):
        # roi touches the frame border: larger radii lose candidates
        luma = rng.integers(0, 256, (36, 44), dtype=np.uint8)
        satv = rng.integers(0, 256, (36, 44), dtype=np.uint8)
        frame = Frame(width=44, height=36, luma=luma, satv=satv)
        roi = EyeRegion(x=0, y=0, w=30, h=20, side="left")
        want = brute_force_iris(frame, roi, 2, 6)
        got = detect_iris(frame, roi, 2, 6)
        assert got == want

    def test_constant_roi_tie_break(self):
        frame = constant_frame(64, 64, 100, 100)
        roi = EyeRegion(x=20, y=20, w=20, h=20, side="left")
        est = detect_iris(frame, roi, 3, 5)
        assert est.c == 0.0
        assert (est.er, est.ey, est.ex) == (3, 20, 20)

    def test_singleton_candidate(self):
        frame = constant_frame(39, 15, 50)
        roi = EyeRegion(x=0, y=0, w=39, h=15, side="left")
        est = detect_iris(frame, roi, 8, 8)
        assert (est.ex, est.ey, est.er) == (19, 7, 8)

    def test_translation_equivariance(self):
        base = SynthEyeSpec(width=110, height=80, cx=45, cy=35, iris_r=8,
                            pupil_r=3, sclera_ax=16, sclera_ay=9)
        frame_a, _ = synth_eye(base, seed=0)
        frame_b, _ = synth_eye(replace(base, cx=48, cy=37), seed=0)
        roi_a = EyeRegion(x=36, y=26, w=19, h=19, side="left")
        roi_b = EyeRegion(x=39, y=28, w=19, h=19, side="left")
        est_a = detect_iris(frame_a, roi_a, 5, 12)
        est_b = detect_iris(frame_b, roi_b, 5, 12)
        assert (est_b.ex - est_a.ex, est_b.ey - est_a.ey) == (3, 2)
        assert est_a.er == est_b.er

    def test_brightness_offset_invariance(self, rng):
        luma = rng.integers(50, 180, (48, 48), dtype=np.uint8)
        satv = rng.integers(50, 180, (48, 48), dtype=np.uint8)
        frame = Frame(width=48, height=48, luma=luma, satv=satv)
        shifted = Frame(width=48, height=48, luma=luma + 40, satv=satv + 40)
        mask = build_mask(6)
        a = score_candidate(frame, 24, 24, mask)
        b = score_candidate(shifted, 24, 24, mask)
        assert b[0] == pytest.approx(a[0], abs=1e-9)   # l
        assert b[1] == pytest.approx(a[1], abs=1e-9)   # s

    def test_no_valid_candidate(self):
        frame = constant_frame(30, 30, 10)
        roi = EyeRegion(x=0, y=0, w=15, h=15, side="left")
        with pytest.raises(NoValidCandidate):
            detect_iris(frame, roi, 12, 14)

    def test_roi_outside_frame(self):
        frame = constant_frame(30, 30, 10)
        roi = EyeRegion(x=20, y=20, w=15, h=15, side="left")
        with pytest.raises(OutOfBounds):
            detect_iris(frame, roi, 3, 4)

    def test_side_carried_from_roi(self):
        frame = constant_frame(64, 64, 10)
        roi = EyeRegion(x=20, y=20, w=20, h=20, side="right")
        assert detect_iris(frame, roi, 3, 4).side == "right"


class TestDefaultRadiusRange:
    def test_scales_with_roi(self):
        r_min, r_max = default_radius_range(72)
        assert r_min == 6 and r_max == 18

    def test_lower_bound(self):
        r_min, r_max = default_radius_range(15)
        assert r_min == 2 and r_max >= r_min

    def test_frame_caps(self):
        r_min, r_max = default_radius_range(200, frame_w=60, frame_h=40)
        assert r_max <= min((60 - 9) // 4, (40 - 1) // 2)
        assert r_min <= r_max
