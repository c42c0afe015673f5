"""Semantic exception hierarchy. Public functions raise these, never bare ValueError."""


class SalmetricsError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(SalmetricsError):
    """Two grids that must share a shape do not."""


class NegativeValues(SalmetricsError):
    """Saliency input contains negative values under the `error` negative-value policy."""


class NonFiniteValues(SalmetricsError):
    """Saliency input contains NaN or infinite values."""


class FormatError(SalmetricsError):
    """A binary or image file is not in a supported saliency/mask format."""


class ParseError(SalmetricsError):
    """An annotation or manifest document is not valid JSON."""


class SchemaError(SalmetricsError):
    """A parsed document is missing required keys or has wrongly typed values."""


class EmptyDataset(SalmetricsError):
    """An annotation source yielded no usable (image, class) pairs."""


class RleLengthMismatch(SalmetricsError):
    """Run-length counts do not sum to height*width."""


class RleCorrupt(SalmetricsError):
    """Compressed run-length byte string is malformed."""


class CropOutOfBounds(SalmetricsError):
    """A crop window does not fit inside its source grid."""


class ZeroMassSaliency(SalmetricsError):
    """An all-zero saliency map was passed where positive total mass is required."""


class DegenerateRanks(SalmetricsError):
    """Rank correlation is undefined because one input is constant."""


class ManifestError(SalmetricsError):
    """A stability manifest is structurally invalid or references bad data."""


class EmptyAggregate(SalmetricsError):
    """No non-degenerate records are available to aggregate."""


class ConfigError(SalmetricsError):
    """Command-line configuration is invalid (bad paths, bad flag values)."""


class DegeneratePolygonWarning(UserWarning):
    """A polygon ring was collinear/empty and rasterized to an empty mask."""
