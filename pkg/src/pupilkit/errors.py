"""Exception types raised across the package.

All errors derive from PupilkitError so callers can catch library failures
with a single except clause. Data-shaped problems (bad files, empty sets)
are distinguished from geometric ones (out-of-bounds candidates) because
the CLI maps them to different exit codes.
"""


class PupilkitError(Exception):
    """Base class for all library errors."""


class UnreadableFile(PupilkitError):
    """The file does not exist or cannot be decoded at all."""


class UnsupportedFormat(PupilkitError):
    """The file decodes but is not one of the supported raster formats."""


class OutOfBounds(PupilkitError):
    """A candidate center cannot host its mask or scan disk inside the image."""


class RadiusTooSmall(PupilkitError):
    """Mask radius below the smallest constructible mask (r >= 2)."""


class NoValidCandidate(PupilkitError):
    """No (center, radius) pair admits an in-frame mask footprint."""


class EmptyRing(PupilkitError):
    """A radial ring referenced by the gradient score contains no pixels."""


class NoPupilContrast(PupilkitError):
    """Best pupil gradient is non-positive: no darker-than-surround circle."""


class BothZero(PupilkitError):
    """Equality factor of two zero measures is undefined."""


class MalformedAnnotation(PupilkitError):
    """Annotation file exists but violates its format or invariants."""


class EmptyDataset(PupilkitError):
    """A dataset directory or record list yielded no usable samples."""


class TooFewAnnotators(PupilkitError):
    """Inter-annotator agreement needs at least two annotators."""


class DegenerateAnnotation(PupilkitError):
    """An annotated or estimated region has zero area."""


class InvalidSpec(PupilkitError):
    """A synthetic eye specification violates its geometric invariants."""


class RegionOutsideFrame(PupilkitError):
    """An eye region cannot be fitted inside the frame even after clipping."""
