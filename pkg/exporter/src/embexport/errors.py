"""Exception types raised by the exporter."""


class ExportError(Exception):
    """Base class for all errors raised by this package."""


class ModelLoadFailure(ExportError):
    """The embedding model or its dependencies could not be loaded."""


class EmptyLabels(ExportError):
    """A label list that must be non-empty is empty."""


class UnreadableImage(ExportError):
    """An image file could not be opened or decoded."""
