"""Exception hierarchy shared across the library and the CLI.

Two branches matter for exit codes: InputError (and subclasses) means the
caller handed us something malformed and maps to exit code 2; NumericError
covers data that is structurally fine but statistically unusable (singleton
classes, zero spread, exhausted resampling) and maps to exit code 3.
"""


class TleakError(Exception):
    """Base class for every error raised by this package."""


class InputError(TleakError):
    """Malformed arguments, shapes, values, or configuration."""


class ShapeError(InputError):
    """Dimension or length mismatch between related inputs."""


class FormatError(InputError):
    """Unparseable file content; message carries a line or byte position."""


class ConfigurationError(InputError):
    """A spec or config object used before it was fully resolved."""


class NumericError(TleakError):
    """Degenerate data or statistics; inputs parsed but cannot be scored."""


class InsufficientSamplesError(NumericError):
    """A group that needs at least two members has fewer."""


class DegenerateDataError(NumericError):
    """Zero spread where spread is required (bandwidth, distinct points)."""


class DegenerateClusteringError(NumericError):
    """Clustering produced no usable groups."""


class ResamplingError(NumericError):
    """Bootstrap redraw budget exhausted without a valid resample."""
