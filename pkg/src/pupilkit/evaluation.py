"""Datasets and metrics: BioID loading, relative errors, tolerance
accuracy, pixel-overlap precision/recall/F1 and annotator agreement.

Relative errors normalize the detection-to-annotation distance by the
inter-ocular distance, so they are resolution independent. Tolerance
accuracy A_T is the fraction of samples where both eyes are within T.

Pupil areas are defined by rasterization: pixel (i, j) belongs to a circle
iff (i + 0.5 - cx)^2 + (j + 0.5 - cy)^2 <= r^2, matching how annotators
mark pixels. Precision/recall/F1 then compare annotated, estimated and
intersection pixel counts.
"""

from __future__ import annotations

import csv
import math
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (DegenerateAnnotation, EmptyDataset, MalformedAnnotation,
                     RegionOutsideFrame, TooFewAnnotators)
from .image import EyeRegion, Frame, load_frame

# Reference results for this method on full BioID, printed alongside eval
# reports for side-by-side comparison. The baseline rows are for the
# rough estimate that takes eye-box centers as the detection.
REFERENCE_BIOID_ERRORS = {"E_l": 0.035, "E_r": 0.021, "E": 0.028}
REFERENCE_BIOID_ACCURACY = {0.05: 0.47, 0.1: 0.92, 0.25: 0.99}
REFERENCE_BIOID_BASELINE = {"E_l": 0.054, "E_r": 0.053, "E": 0.053}
REFERENCE_BIOID_BASELINE_ACCURACY = {0.05: 0.15, 0.1: 0.68, 0.25: 0.98}
REFERENCE_PUPIL_PRF = {"P": 0.66, "R": 0.68, "F1": 0.67}
REFERENCE_INTER_ANNOTATOR = {"P": 0.82, "R": 0.84, "F1": 0.79}


@dataclass(frozen=True)
class Circle:
    cx: float
    cy: float
    r: float


@dataclass(frozen=True)
class AnnotatedCircle:
    annotator: str
    side: str      # left | right
    kind: str      # iris | pupil
    circle: Circle


@dataclass(frozen=True)
class EyeAnnotation:
    """Annotated iris centers, plus optional per-annotator circles."""

    lx: float
    ly: float
    rx: float
    ry: float
    circles: tuple[AnnotatedCircle, ...] = ()

    @property
    def d_lr(self) -> float:
        return math.hypot(self.lx - self.rx, self.ly - self.ry)


@dataclass
class EvalRecord:
    """Per-sample metric values feeding dataset aggregates."""

    sample_id: str
    e_l: float | None = None
    e_r: float | None = None
    e: float | None = None
    pupil_areas: dict = field(default_factory=dict)  # side -> (A_a, A_e, A_c)
    prf: dict = field(default_factory=dict)          # side -> (P, R, F1)


def parse_eye_file(path: str | Path) -> tuple[float, float, float, float]:
    """Parse a .eye annotation: comment header, then 'LX LY RX RY'."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise MalformedAnnotation(f"{path}: {exc}") from exc
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 4:
            raise MalformedAnnotation(
                f"{path}: expected 4 coordinates, got {len(parts)}")
        try:
            lx, ly, rx, ry = (float(p) for p in parts)
        except ValueError as exc:
            raise MalformedAnnotation(f"{path}: non-numeric value") from exc
        if (lx, ly) == (rx, ry):
            raise MalformedAnnotation(
                f"{path}: coincident eye centers ({lx}, {ly})")
        return lx, ly, rx, ry
    raise MalformedAnnotation(f"{path}: no coordinate line found")


def list_bioid_pairs(directory: str | Path) -> tuple[list[tuple[str, Path, Path]], list[str]]:
    """Pair image and .eye files by stem; returns (pairs, unpaired stems)."""
    directory = Path(directory)
    images = {p.stem: p for p in sorted(directory.glob("*.pgm"))}
    eyes = {p.stem: p for p in sorted(directory.glob("*.eye"))}
    pairs = [(stem, images[stem], eyes[stem])
             for stem in sorted(images.keys() & eyes.keys())]
    unpaired = sorted((images.keys() | eyes.keys()) - (images.keys() & eyes.keys()))
    return pairs, unpaired


def load_bioid(directory: str | Path) -> list[tuple[Frame, EyeAnnotation]]:
    """Load every paired (image, annotation) sample from a directory."""
    pairs, _ = list_bioid_pairs(directory)
    if not pairs:
        raise EmptyDataset(f"{directory}: no paired .pgm/.eye samples")
    out = []
    for index, (_, img_path, eye_path) in enumerate(pairs):
        lx, ly, rx, ry = parse_eye_file(eye_path)
        out.append((load_frame(img_path, frame_index=index),
                    EyeAnnotation(lx=lx, ly=ly, rx=rx, ry=ry)))
    return out


def _sample_rng(jitter_seed: int, sample_id: str) -> np.random.Generator:
    return np.random.default_rng([jitter_seed, zlib.crc32(sample_id.encode())])


def _box_centers(annotation: EyeAnnotation, mode: str, jitter_seed: int,
                 sample_id: str) -> dict[str, tuple[float, float]]:
    centers = {"left": (annotation.lx, annotation.ly),
               "right": (annotation.rx, annotation.ry)}
    if mode == "jittered":
        jitter = round(0.15 * annotation.d_lr)
        rng = _sample_rng(jitter_seed, sample_id)
        offsets = rng.integers(-jitter, jitter + 1, size=4)
        centers = {"left": (annotation.lx + int(offsets[0]),
                            annotation.ly + int(offsets[1])),
                   "right": (annotation.rx + int(offsets[2]),
                             annotation.ry + int(offsets[3]))}
    return centers


def _fit_box(cx: float, cy: float, side_len: int, frame_w: int,
             frame_h: int) -> tuple[int, int, int, int, bool]:
    """Place a box of the requested size around (cx, cy), shifted and, if
    unavoidable, trimmed to the frame."""
    clipped = False
    w = side_len
    h = side_len
    if w > frame_w:
        w = frame_w
        clipped = True
    if h > frame_h:
        h = frame_h
        clipped = True
    x = int(round(cx - w / 2))
    y = int(round(cy - h / 2))
    if x < 0 or x + w > frame_w:
        x = min(max(x, 0), frame_w - w)
        clipped = True
    if y < 0 or y + h > frame_h:
        y = min(max(y, 0), frame_h - h)
        clipped = True
    return x, y, w, h, clipped


def roi_provider(annotation: EyeAnnotation, frame_w: int, frame_h: int,
                 mode: str = "centered", pad: int = 0, jitter_seed: int = 0,
                 sample_id: str = "",
                 roi_table: dict | None = None) -> tuple[EyeRegion, EyeRegion]:
    """Rough eye boxes for both eyes.

    centered: boxes of side round(0.8 * d_lr) on the annotated centers.
    jittered: centers offset by uniform +-round(0.15 * d_lr), seeded per
    sample so runs are reproducible. file: boxes looked up in a preloaded
    sidecar table (see load_roi_file). ``pad`` widens every box by that
    many pixels per side. Boxes are shifted (and flagged) to stay inside
    the frame; a frame too small for the minimum box raises
    RegionOutsideFrame.
    """
    if mode == "file":
        if roi_table is None:
            raise ValueError("file mode needs a roi_table from load_roi_file")
        regions = []
        for side in ("left", "right"):
            try:
                x, y, w, h = roi_table[(sample_id, side)]
            except KeyError as exc:
                raise MalformedAnnotation(
                    f"no roi for sample {sample_id!r} side {side}") from exc
            x, y = x - pad, y - pad
            w, h = w + 2 * pad, h + 2 * pad
            clipped = False
            if w > frame_w or h > frame_h or min(w, h) < 15:
                raise RegionOutsideFrame(
                    f"roi {w}x{h} for {sample_id}/{side} cannot fit frame")
            if x < 0 or x + w > frame_w:
                x = min(max(x, 0), frame_w - w)
                clipped = True
            if y < 0 or y + h > frame_h:
                y = min(max(y, 0), frame_h - h)
                clipped = True
            regions.append(EyeRegion(x=x, y=y, w=w, h=h, side=side,
                                     clipped=clipped))
        return regions[0], regions[1]

    if mode not in ("centered", "jittered"):
        raise ValueError(f"unknown roi mode {mode!r}")
    d_lr = annotation.d_lr
    if d_lr <= 0:
        raise MalformedAnnotation("coincident eye centers: d_lr is zero")
    side_len = max(15, round(0.8 * d_lr)) + 2 * pad
    if side_len > max(frame_w, frame_h):
        side_len = max(frame_w, frame_h)
    centers = _box_centers(annotation, mode, jitter_seed, sample_id)
    regions = []
    for side in ("left", "right"):
        cx, cy = centers[side]
        x, y, w, h, clipped = _fit_box(cx, cy, side_len, frame_w, frame_h)
        if min(w, h) < 15:
            raise RegionOutsideFrame(
                f"frame {frame_w}x{frame_h} cannot host a {side_len}px eye box")
        regions.append(EyeRegion(x=x, y=y, w=w, h=h, side=side,
                                 clipped=clipped))
    return regions[0], regions[1]


def baseline_centers(annotation: EyeAnnotation, mode: str = "centered",
                     jitter_seed: int = 0, sample_id: str = "",
                     ) -> tuple[tuple[float, float], tuple[float, float]]:
    """Centers of the rough eye boxes, standing in for detections.

    This is the substitute rough baseline: with jittered rois it returns
    the jittered annotation centers, with centered rois the annotations
    themselves (zero baseline error by construction).
    """
    centers = _box_centers(annotation, mode, jitter_seed, sample_id)
    return centers["left"], centers["right"]


def load_roi_file(path: str | Path) -> dict[tuple[str, str], tuple[int, int, int, int]]:
    """Parse a roi sidecar CSV: sample_id,x,y,w,h,side per row."""
    table = {}
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#"):
                continue
            if len(row) != 6:
                raise MalformedAnnotation(
                    f"{path}: roi row needs 6 fields, got {len(row)}")
            sample, x, y, w, h, side = row
            table[(sample.strip(), side.strip())] = (
                int(x), int(y), int(w), int(h))
    if not table:
        raise EmptyDataset(f"{path}: no roi rows")
    return table


def relative_errors(det_l: tuple[float, float], det_r: tuple[float, float],
                    annotation: EyeAnnotation) -> tuple[float, float, float]:
    """Per-eye relative errors and their mean, normalized by d_lr."""
    d_lr = annotation.d_lr
    if d_lr <= 0:
        raise MalformedAnnotation("coincident eye centers: d_lr is zero")
    e_l = math.hypot(det_l[0] - annotation.lx, det_l[1] - annotation.ly) / d_lr
    e_r = math.hypot(det_r[0] - annotation.rx, det_r[1] - annotation.ry) / d_lr
    return e_l, e_r, (e_l + e_r) / 2


def aggregate_errors(records: list[EvalRecord]) -> tuple[float, float, float]:
    """Dataset means (E_l, E_r, E) over per-sample relative errors."""
    usable = [r for r in records if r.e_l is not None and r.e_r is not None]
    if not usable:
        raise EmptyDataset("no records with relative errors")
    # fsum keeps the means exactly permutation invariant
    e_l = math.fsum(r.e_l for r in usable) / len(usable)
    e_r = math.fsum(r.e_r for r in usable) / len(usable)
    return e_l, e_r, (e_l + e_r) / 2


def tolerance_accuracy(records: list[EvalRecord], tolerance: float) -> float:
    """Fraction of samples with both eyes within the given tolerance."""
    if tolerance <= 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    usable = [r for r in records if r.e_l is not None and r.e_r is not None]
    if not usable:
        raise EmptyDataset("no records with relative errors")
    hits = sum(1 for r in usable if max(r.e_l, r.e_r) <= tolerance)
    return hits / len(usable)


def circle_area(circle: Circle, frame_w: int, frame_h: int) -> int:
    """Rasterized pixel count of a circle clipped to the frame."""
    a, _, _ = circle_overlap(circle, circle, frame_w, frame_h)
    return a


def circle_overlap(annotated: Circle, estimated: Circle, frame_w: int,
                   frame_h: int) -> tuple[int, int, int]:
    """Pixel areas (A_a, A_e, A_c) of two circles and their intersection.

    Membership uses pixel centers: (i + 0.5 - cx)^2 + (j + 0.5 - cy)^2
    <= r^2, restricted to the frame.
    """
    if annotated.r <= 0 or estimated.r <= 0:
        raise DegenerateAnnotation("circle radii must be positive")
    x0 = max(0, math.floor(min(annotated.cx - annotated.r,
                               estimated.cx - estimated.r)))
    x1 = min(frame_w, math.ceil(max(annotated.cx + annotated.r,
                                    estimated.cx + estimated.r)) + 1)
    y0 = max(0, math.floor(min(annotated.cy - annotated.r,
                               estimated.cy - estimated.r)))
    y1 = min(frame_h, math.ceil(max(annotated.cy + annotated.r,
                                    estimated.cy + estimated.r)) + 1)
    if x0 >= x1 or y0 >= y1:
        return 0, 0, 0
    xs = np.arange(x0, x1, dtype=np.float64) + 0.5
    ys = np.arange(y0, y1, dtype=np.float64) + 0.5
    gx, gy = np.meshgrid(xs, ys)
    in_a = ((gx - annotated.cx) ** 2 + (gy - annotated.cy) ** 2
            <= annotated.r ** 2)
    in_e = ((gx - estimated.cx) ** 2 + (gy - estimated.cy) ** 2
            <= estimated.r ** 2)
    return int(in_a.sum()), int(in_e.sum()), int((in_a & in_e).sum())


def pupil_prf(a_a: int, a_e: int, a_c: int) -> tuple[float, float, float]:
    """Recall A_c/A_a, precision A_c/A_e and their harmonic mean."""
    if a_a <= 0:
        raise DegenerateAnnotation("annotated pupil area is zero")
    if a_e <= 0:
        raise DegenerateAnnotation("estimated pupil area is zero")
    recall = a_c / a_a
    precision = a_c / a_e
    if recall == 0 and precision == 0:
        return 0.0, 0.0, 0.0
    f1 = 2 * recall * precision / (recall + precision)
    return precision, recall, f1


def inter_annotator(circles: list[Circle], frame_w: int,
                    frame_h: int) -> tuple[tuple[float, float, float], Circle]:
    """Mean pairwise (P, R, F1) over ordered annotator pairs + consensus.

    The consensus circle averages centers and radii, which always yields
    a circle (averaging areas would not).
    """
    if len(circles) < 2:
        raise TooFewAnnotators(
            f"need at least 2 annotators, got {len(circles)}")
    scores = []
    for i, annotated in enumerate(circles):
        for j, estimated in enumerate(circles):
            if i == j:
                continue
            areas = circle_overlap(annotated, estimated, frame_w, frame_h)
            scores.append(pupil_prf(*areas))
    mean = tuple(sum(s[i] for s in scores) / len(scores) for i in range(3))
    consensus = Circle(
        cx=sum(c.cx for c in circles) / len(circles),
        cy=sum(c.cy for c in circles) / len(circles),
        r=sum(c.r for c in circles) / len(circles),
    )
    return mean, consensus


def diameter_accuracy(d_est: float, d_ann: float) -> float:
    """1 - |d_est - d_ann| / d_ann: 1 at exact diameter agreement."""
    if d_ann <= 0:
        raise DegenerateAnnotation("annotated diameter must be positive")
    return 1.0 - abs(d_est - d_ann) / d_ann


def load_annotation_csv(path: str | Path) -> dict[str, list[AnnotatedCircle]]:
    """Parse an annotation CSV: sample_id,annotator_id,side,kind,cx,cy,r."""
    table: dict[str, list[AnnotatedCircle]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for row in reader:
            if not row or row[0].startswith("#") or row[0] == "sample_id":
                continue
            if len(row) != 7:
                raise MalformedAnnotation(
                    f"{path}: annotation row needs 7 fields, got {len(row)}")
            sample, annotator, side, kind, cx, cy, r = row
            if side not in ("left", "right") or kind not in ("iris", "pupil"):
                raise MalformedAnnotation(
                    f"{path}: bad side/kind {side!r}/{kind!r}")
            table.setdefault(sample.strip(), []).append(AnnotatedCircle(
                annotator=annotator.strip(), side=side, kind=kind,
                circle=Circle(cx=float(cx), cy=float(cy), r=float(r))))
    if not table:
        raise EmptyDataset(f"{path}: no annotation rows")
    return table
