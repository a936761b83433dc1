"""Image decoding and channel model.

A Frame carries two uint8 channels derived from the input picture:

* ``luma``: BT.601 full-range luminance, Y = 0.299 R + 0.587 G + 0.114 B
* ``satv``: the V chroma plane used as a saturation proxy,
  V = 0.5 R - 0.418688 G - 0.081312 B + 128

Both are rounded half-up and clamped to [0, 255], so decoding is bit-exact
and reproducible. Grayscale inputs get a uniform satv of 128 (neutral
chroma), which makes every saturation score exactly zero instead of
undefined.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import OutOfBounds, UnreadableFile, UnsupportedFormat

NEUTRAL_SATV = 128

# Pillow format names for the accepted containers. PGM reports as PPM.
_ACCEPTED_FORMATS = {"PPM", "PNG", "BMP"}


def _round_clamp_u8(values: np.ndarray) -> np.ndarray:
    """Round half-up and clamp to the uint8 range."""
    return np.clip(np.floor(values + 0.5), 0, 255).astype(np.uint8)


def rgb_to_luma_satv(rgb: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Convert an (..., 3) uint8 RGB array to (luma, satv) uint8 arrays."""
    r = rgb[..., 0].astype(np.float64)
    g = rgb[..., 1].astype(np.float64)
    b = rgb[..., 2].astype(np.float64)
    luma = 0.299 * r + 0.587 * g + 0.114 * b
    satv = 0.5 * r - 0.418688 * g - 0.081312 * b + 128.0
    return _round_clamp_u8(luma), _round_clamp_u8(satv)


def to_luma_satv(r: int, g: int, b: int) -> tuple[int, int]:
    """Convert one RGB pixel to (luma, satv)."""
    rgb = np.array([[r, g, b]], dtype=np.uint8)
    luma, satv = rgb_to_luma_satv(rgb)
    return int(luma[0]), int(satv[0])


@dataclass(frozen=True)
class Frame:
    """A decoded image: luminance plus saturation-proxy channel.

    Channels are (height, width) uint8 arrays of identical shape and are
    treated as immutable after construction.
    """

    width: int
    height: int
    luma: np.ndarray
    satv: np.ndarray
    frame_index: int = 0

    def __post_init__(self):
        expected = (self.height, self.width)
        if self.luma.shape != expected or self.satv.shape != expected:
            raise ValueError(
                f"channel shapes {self.luma.shape}/{self.satv.shape} "
                f"do not match frame size {expected}"
            )

    @classmethod
    def from_channels(cls, luma: np.ndarray, satv: np.ndarray | None = None,
                      frame_index: int = 0) -> "Frame":
        """Build a Frame from channel arrays; satv defaults to neutral."""
        luma = np.ascontiguousarray(luma, dtype=np.uint8)
        if satv is None:
            satv = np.full_like(luma, NEUTRAL_SATV)
        else:
            satv = np.ascontiguousarray(satv, dtype=np.uint8)
        h, w = luma.shape
        return cls(width=w, height=h, luma=luma, satv=satv,
                   frame_index=frame_index)


@dataclass(frozen=True)
class EyeRegion:
    """Rough bounding box of one eye, in frame pixel coordinates.

    ``clipped`` records that the requested box had to be moved or trimmed
    to fit inside its frame.
    """

    x: int
    y: int
    w: int
    h: int
    side: str = "left"
    clipped: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ValueError(f"side must be 'left' or 'right', got {self.side!r}")
        if self.w < 15 or self.h < 15:
            raise ValueError(
                f"eye region {self.w}x{self.h} is below the 15x15 minimum "
                "needed to host the smallest mask"
            )

    def inside(self, width: int, height: int) -> bool:
        return (self.x >= 0 and self.y >= 0
                and self.x + self.w <= width and self.y + self.h <= height)


class RegionView:
    """Window into a channel centered at (cx, cy) with given half-extents.

    Supports direct access at signed offsets and horizontally mirrored
    access, where mirrored (dx, dy) reads the pixel at (cx - dx, cy + dy).
    """

    def __init__(self, channel: np.ndarray, cx: int, cy: int,
                 half_w: int, half_h: int):
        h, w = channel.shape
        if (cx - half_w < 0 or cx + half_w >= w
                or cy - half_h < 0 or cy + half_h >= h):
            raise OutOfBounds(
                f"center ({cx},{cy}) with half-extents ({half_w},{half_h}) "
                f"exceeds channel {w}x{h}"
            )
        self.channel = channel
        self.cx = cx
        self.cy = cy
        self.half_w = half_w
        self.half_h = half_h

    def at(self, dx: int, dy: int) -> int:
        return int(self.channel[self.cy + dy, self.cx + dx])

    def mirrored(self, dx: int, dy: int) -> int:
        return int(self.channel[self.cy + dy, self.cx - dx])

    def patch(self) -> np.ndarray:
        """The covered (2*half_h+1, 2*half_w+1) sub-array."""
        return self.channel[self.cy - self.half_h: self.cy + self.half_h + 1,
                            self.cx - self.half_w: self.cx + self.half_w + 1]

    def mirrored_patch(self) -> np.ndarray:
        return np.fliplr(self.patch())


def region_view(channel: np.ndarray, cx: int, cy: int,
                mask_half_w: int, mask_half_h: int) -> RegionView:
    """View of ``channel`` able to host a mask with the given half-extents."""
    return RegionView(channel, cx, cy, mask_half_w, mask_half_h)


def load_frame(path: str | Path, frame_index: int = 0) -> Frame:
    """Decode a PGM/PNG/BMP file into a Frame.

    Grayscale images keep their gray values as luma and get neutral satv.
    Color images are converted with the full-range BT.601 matrix.
    """
    path = Path(path)
    try:
        with Image.open(path) as img:
            fmt = img.format
            if fmt not in _ACCEPTED_FORMATS:
                raise UnsupportedFormat(
                    f"{path}: format {fmt} not supported (PGM, PNG, BMP only)"
                )
            if img.mode == "L":
                luma = np.asarray(img, dtype=np.uint8)
                return Frame.from_channels(luma, None, frame_index)
            if img.mode in ("1", "I;16"):
                luma = np.asarray(img.convert("L"), dtype=np.uint8)
                return Frame.from_channels(luma, None, frame_index)
            rgb = np.asarray(img.convert("RGB"), dtype=np.uint8)
    except FileNotFoundError as exc:
        raise UnreadableFile(f"{path}: no such file") from exc
    except UnidentifiedImageError as exc:
        raise UnreadableFile(f"{path}: not a decodable image") from exc
    except OSError as exc:
        raise UnreadableFile(f"{path}: {exc}") from exc
    luma, satv = rgb_to_luma_satv(rgb)
    return Frame(width=rgb.shape[1], height=rgb.shape[0],
                 luma=luma, satv=satv, frame_index=frame_index)
