"""Exception hierarchy shared across the toolkit."""


class PupilBenchError(Exception):
    """Base class for all errors raised by this package."""


class DecodeError(PupilBenchError):
    """Malformed or unsupported image payload."""


class DetectError(PupilBenchError):
    """Base class for per-image detector failures."""


class ImageTooSmall(DetectError):
    """Input image is below the minimum size of an operation."""


class NoEdges(DetectError):
    """Edge map is empty, nothing to vote on."""


class NoCircleFound(DetectError):
    """Accumulator maximum is below the sanity floor."""


class NoContour(DetectError):
    """No edge component available for ellipse fitting."""


class InsufficientPoints(DetectError):
    """Fewer points than the fit requires."""


class DegenerateConfiguration(DetectError):
    """Point set admits no ellipse (collinear or otherwise rank deficient)."""


class NotAnEllipse(DetectError):
    """Conic coefficients do not describe a real ellipse."""


class NoCandidates(DetectError):
    """Candidate pruning removed every pixel."""


class NoMaximum(DetectError):
    """All operator scores are zero."""


class TooFewRadii(DetectError):
    """Radial profile too short to differentiate."""


class ZeroGradient(DetectError):
    """Gradient vector has zero magnitude."""


class FlatImage(DetectError):
    """Gradient field is identically zero."""


class InvalidGeometry(PupilBenchError):
    """Synthetic scene parameters are inconsistent."""


class ManifestError(PupilBenchError):
    """Dataset manifest is missing, malformed, or references bad data."""


class EmptySet(PupilBenchError):
    """Statistic requested over an empty collection."""
