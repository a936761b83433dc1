"""Synthetic eye images with exact ground truth.

Renders a skin background, a sclera ellipse, an iris disk and a concentric
pupil disk, plus optional specular highlights and seeded Gaussian noise.
The generator is the oracle for recovery tests: its geometry is expressed
in the same units the detectors report.

* The eye center sits on an integer pixel, so an exact detection is an
  integer coordinate.
* An iris of radius ``iris_r`` darkens exactly the pixels within distance
  iris_r - 1 of the center: the iris region of a radius-iris_r mask. That
  mask fits with zero contamination on both regions, so it is the unique
  best scoring radius.
* A pupil of radius ``pupil_r`` darkens rounded distances up to pupil_r,
  placing the dark-to-iris transition exactly between rings pupil_r and
  pupil_r + 1 of the radial profile.

Frames can be written as PGM (luma only) or PNG; color PNGs invert the
BT.601 conversion with neutral U, so a reload reproduces the channels to
within rounding.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import InvalidSpec
from .image import Frame, NEUTRAL_SATV, _round_clamp_u8

PRESET_SIGMA = {"clean": 0.0, "noisy": 8.0}


@dataclass(frozen=True)
class SynthEyeSpec:
    """Geometry and shading of one synthetic eye."""

    width: int = 96
    height: int = 64
    cx: int = 48
    cy: int = 32
    iris_r: int = 9
    pupil_r: int = 4
    sclera_ax: float = 18.0
    sclera_ay: float = 10.0
    skin_luma: int = 150
    skin_satv: int = NEUTRAL_SATV
    sclera_luma: int = 220
    sclera_satv: int = NEUTRAL_SATV
    iris_luma: int = 60
    iris_satv: int = NEUTRAL_SATV
    pupil_luma: int = 25
    pupil_satv: int = NEUTRAL_SATV
    noise_sigma: float = 0.0
    preset: str = "clean"
    # (x, y, radius, luma) circles drawn last, e.g. specular reflections
    highlights: tuple[tuple[float, float, float, int], ...] = ()

    def validate(self) -> None:
        if self.pupil_r < 1 or self.pupil_r >= self.iris_r:
            raise InvalidSpec(
                f"pupil radius {self.pupil_r} must be in [1, iris_r)"
                f" with iris_r={self.iris_r}")
        if min(self.sclera_ax, self.sclera_ay) < self.iris_r - 1:
            raise InvalidSpec(
                f"iris of radius {self.iris_r} not inside sclera ellipse "
                f"({self.sclera_ax}, {self.sclera_ay})")
        if (self.cx - self.sclera_ax < 0 or self.cx + self.sclera_ax >= self.width
                or self.cy - self.sclera_ay < 0
                or self.cy + self.sclera_ay >= self.height):
            raise InvalidSpec("sclera ellipse exceeds the image")


@dataclass(frozen=True)
class SynthTruth:
    """Exact geometry of a rendered eye, in detector units."""

    cx: int
    cy: int
    iris_r: int
    pupil_r: int


def _draw_eye(luma: np.ndarray, satv: np.ndarray, spec: SynthEyeSpec) -> None:
    h, w = luma.shape
    u = np.arange(w, dtype=np.int64)[None, :] - spec.cx
    v = np.arange(h, dtype=np.int64)[:, None] - spec.cy
    d2 = u * u + v * v

    ellipse = ((u / spec.sclera_ax) ** 2 + (v / spec.sclera_ay) ** 2) <= 1.0
    luma[ellipse] = spec.sclera_luma
    satv[ellipse] = spec.sclera_satv

    iris = d2 <= (spec.iris_r - 1) ** 2
    luma[iris] = spec.iris_luma
    satv[iris] = spec.iris_satv

    # rounded-distance disk: round(d) <= k  <=>  4*d^2 <= (2k+1)^2 - 1
    pupil = 4 * d2 <= (2 * spec.pupil_r + 1) ** 2 - 1
    luma[pupil] = spec.pupil_luma
    satv[pupil] = spec.pupil_satv

    for hx, hy, hr, hl in spec.highlights:
        hit = ((np.arange(w)[None, :] - hx) ** 2
               + (np.arange(h)[:, None] - hy) ** 2) <= hr ** 2
        luma[hit] = hl
        satv[hit] = NEUTRAL_SATV


def _finalize(luma: np.ndarray, satv: np.ndarray, sigma: float,
              seed) -> tuple[np.ndarray, np.ndarray]:
    if sigma > 0:
        rng = np.random.default_rng(seed)
        luma = luma + rng.normal(0.0, sigma, luma.shape)
        # an all-neutral chroma plane models a grayscale source, which
        # stays exactly neutral no matter the sensor noise
        if np.any(satv != NEUTRAL_SATV):
            satv = satv + rng.normal(0.0, sigma, satv.shape)
    return _round_clamp_u8(luma), _round_clamp_u8(satv)


def synth_eye(spec: SynthEyeSpec, seed=0) -> tuple[Frame, SynthTruth]:
    """Render one eye; returns the frame and its exact geometry."""
    spec.validate()
    luma = np.full((spec.height, spec.width), float(spec.skin_luma))
    satv = np.full((spec.height, spec.width), float(spec.skin_satv))
    _draw_eye(luma, satv, spec)
    luma8, satv8 = _finalize(luma, satv, spec.noise_sigma, seed)
    frame = Frame(width=spec.width, height=spec.height, luma=luma8, satv=satv8)
    return frame, SynthTruth(cx=spec.cx, cy=spec.cy, iris_r=spec.iris_r,
                             pupil_r=spec.pupil_r)


def compose_face(width: int, height: int, specs: list[SynthEyeSpec], seed=0,
                 skin_luma: int | None = None, skin_satv: int | None = None,
                 noise_sigma: float | None = None) -> tuple[Frame, list[SynthTruth]]:
    """Render several eyes on one canvas (e.g. a two-eye test face)."""
    if not specs:
        raise InvalidSpec("compose_face needs at least one eye spec")
    base = specs[0]
    luma = np.full((height, width),
                   float(base.skin_luma if skin_luma is None else skin_luma))
    satv = np.full((height, width),
                   float(base.skin_satv if skin_satv is None else skin_satv))
    truths = []
    for spec in specs:
        bounded = replace(spec, width=width, height=height)
        bounded.validate()
        _draw_eye(luma, satv, bounded)
        truths.append(SynthTruth(cx=spec.cx, cy=spec.cy, iris_r=spec.iris_r,
                                 pupil_r=spec.pupil_r))
    sigma = base.noise_sigma if noise_sigma is None else noise_sigma
    luma8, satv8 = _finalize(luma, satv, sigma, seed)
    return Frame(width=width, height=height, luma=luma8, satv=satv8), truths


def random_spec(rng: np.random.Generator, preset: str = "noisy",
                width: int = 96, height: int = 64,
                chroma: bool = True) -> SynthEyeSpec:
    """Draw a detectable eye configuration from the standard ranges."""
    if preset not in PRESET_SIGMA:
        raise InvalidSpec(f"unknown preset {preset!r}")
    iris_r = int(rng.integers(7, 13))
    pr_hi = min(iris_r - 3, round(0.6 * (iris_r - 1)))
    pupil_r = int(rng.integers(2, pr_hi + 1))
    rho = iris_r - 1
    # pupil-iris contrast must dominate the ring-mean shift a lone 255
    # specular pixel can cause ((255 - pupil_luma) / 12 on the smallest
    # outer ring) plus the worst-of-many noise deviation at sigma 8
    pupil_luma = int(rng.integers(45, 71))
    iris_luma = pupil_luma + int(rng.integers(36, 51))
    if chroma:
        skin_satv = int(rng.integers(130, 149))
        sclera_satv = int(rng.integers(95, 116))
        iris_satv = int(rng.integers(125, 146))
    else:
        skin_satv = sclera_satv = iris_satv = NEUTRAL_SATV
    return SynthEyeSpec(
        width=width,
        height=height,
        cx=int(rng.integers(40, 57)),
        cy=int(rng.integers(26, 39)),
        iris_r=iris_r,
        pupil_r=pupil_r,
        sclera_ax=2 * rho * float(rng.uniform(1.02, 1.15)),
        sclera_ay=rho * float(rng.uniform(1.1, 1.35)),
        skin_luma=int(rng.integers(130, 171)),
        skin_satv=skin_satv,
        sclera_luma=int(rng.integers(195, 226)),
        sclera_satv=sclera_satv,
        iris_luma=iris_luma,
        iris_satv=iris_satv,
        pupil_luma=pupil_luma,
        pupil_satv=iris_satv,
        noise_sigma=PRESET_SIGMA[preset],
        preset=preset,
    )


def add_pupil_highlight(spec: SynthEyeSpec,
                        rng: np.random.Generator) -> SynthEyeSpec:
    """Inject a 1-px specular highlight strictly inside the pupil."""
    reach = max(0, spec.pupil_r - 1)
    while True:
        hx = int(rng.integers(-reach, reach + 1))
        hy = int(rng.integers(-reach, reach + 1))
        if hx * hx + hy * hy <= reach * reach:
            break
    highlight = (float(spec.cx + hx), float(spec.cy + hy), 0.5, 255)
    return replace(spec, highlights=spec.highlights + (highlight,))


def write_frame_png(frame: Frame, path: str | Path) -> None:
    """Write a frame as PNG: grayscale when satv is neutral, RGB otherwise."""
    if np.all(frame.satv == NEUTRAL_SATV):
        Image.fromarray(frame.luma, mode="L").save(path, format="PNG")
        return
    y = frame.luma.astype(np.float64)
    dv = frame.satv.astype(np.float64) - 128.0
    r = _round_clamp_u8(y + 1.402 * dv)
    g = _round_clamp_u8(y - 0.714136 * dv)
    b = frame.luma
    rgb = np.stack([r, g, b], axis=-1)
    Image.fromarray(rgb, mode="RGB").save(path, format="PNG")


def write_frame_pgm(frame: Frame, path: str | Path) -> None:
    """Write the luma channel as a binary P5 PGM."""
    with open(path, "wb") as fh:
        fh.write(f"P5\n{frame.width} {frame.height}\n255\n".encode())
        fh.write(frame.luma.tobytes())


MANIFEST_FIELDS = ["file", "width", "height", "cx", "cy", "iris_r", "pupil_r",
                   "sclera_ax", "sclera_ay", "skin_luma", "sclera_luma",
                   "iris_luma", "pupil_luma", "noise_sigma", "preset"]


def write_dataset(out_dir: str | Path, count: int, preset: str = "noisy",
                  seed: int = 0, chroma: bool = True) -> Path:
    """Write ``count`` eyes as PNGs plus ground truth and manifest CSVs.

    Returns the manifest path; the manifest is what cmd_eval consumes.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / "manifest.csv"
    truth_path = out_dir / "ground_truth.csv"
    with open(manifest_path, "w", newline="") as mf, \
            open(truth_path, "w", newline="") as tf:
        manifest = csv.writer(mf)
        truth_csv = csv.writer(tf)
        manifest.writerow(MANIFEST_FIELDS)
        truth_csv.writerow(["file", "cx", "cy", "iris_r", "pupil_r"])
        for i in range(count):
            spec = random_spec(np.random.default_rng([seed, i]), preset,
                               chroma=chroma)
            frame, truth = synth_eye(spec, seed=[seed, i, 1])
            name = f"eye_{i:05d}.png"
            write_frame_png(frame, out_dir / name)
            manifest.writerow([
                name, spec.width, spec.height, spec.cx, spec.cy, spec.iris_r,
                spec.pupil_r, f"{spec.sclera_ax:.4f}", f"{spec.sclera_ay:.4f}",
                spec.skin_luma, spec.sclera_luma, spec.iris_luma,
                spec.pupil_luma, spec.noise_sigma, spec.preset])
            truth_csv.writerow([name, truth.cx, truth.cy, truth.iris_r,
                                truth.pupil_r])
    return manifest_path


def read_manifest(path: str | Path) -> list[dict]:
    """Rows of a synthetic dataset manifest, with numeric fields parsed."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            for key in ("width", "height", "cx", "cy", "iris_r", "pupil_r",
                        "skin_luma", "sclera_luma", "iris_luma", "pupil_luma"):
                row[key] = int(row[key])
            for key in ("sclera_ax", "sclera_ay", "noise_sigma"):
                row[key] = float(row[key])
            rows.append(row)
    return rows
