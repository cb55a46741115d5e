"""Exception types raised across the pipeline.

I/O failures (unreadable files, unwritable directories) are left to the
built-in OSError; everything below signals malformed data or a detection /
evaluation outcome the caller has to handle.
"""


class PlrError(Exception):
    """Base class for all pipeline errors."""


class FormatError(PlrError):
    """File exists but is not a valid 8-bit binary PGM / has mixed dimensions."""


class GapError(PlrError):
    """Frame directory has a hole in its index sequence."""


class NoCircleError(PlrError):
    """Hough voting produced no peak above the accumulator threshold."""


class HintRequiredError(PlrError):
    """Cropped measurement requested without a center hint."""


class EmptyTraceError(PlrError):
    """Trace operation needs at least one valid sample."""


class NoOverlapError(PlrError):
    """Right/left traces share no frame index that is valid in both."""


class DegenerateSeriesError(PlrError):
    """Series too short, constant, or otherwise unusable for correlation."""


class LengthMismatchError(PlrError):
    """Paired score/label sequences differ in length."""


class SingleClassError(PlrError):
    """ROC construction needs at least one positive and one negative label."""


class UndefinedRateError(PlrError):
    """A rate's denominator is zero; the message names the offending field."""


class GeometryError(PlrError):
    """Requested synthetic geometry is inconsistent (e.g. pupil outside iris)."""
