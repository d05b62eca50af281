"""Exception types shared across the package."""


class CrawltexError(Exception):
    """Base class for all errors raised by this package."""


class DecodeError(CrawltexError):
    """Image bytes could not be parsed."""


class UnsupportedFormatError(CrawltexError):
    """Recognizable but unsupported image encoding (color, wrong depth, ...)."""


class DatasetError(CrawltexError):
    """Unusable dataset directory layout."""


class ParameterError(CrawltexError):
    """A parameter violates its documented range."""


class ValidationError(CrawltexError):
    """Runtime inputs are structurally invalid (shape, finiteness, ...)."""


class TrainingError(CrawltexError):
    """A classifier cannot be fitted from the given samples."""
