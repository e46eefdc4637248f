"""Exception types shared across the package."""


class AdanegError(Exception):
    """Base class for all errors raised by this package."""


class FileUnreadable(AdanegError):
    """Referenced file is missing or cannot be read."""


class BadMagic(AdanegError):
    """File does not start with a valid EMB1 header (magic or version)."""


class TruncatedFile(AdanegError):
    """Payload size does not match the header's count and dim."""


class NonFiniteValue(AdanegError):
    """NaN or Inf encountered in embedding data."""


class DimensionMismatch(AdanegError):
    """Vector or matrix dimensions disagree."""


class ZeroVector(AdanegError):
    """Vector with (near-)zero norm cannot be normalized."""


class EmptyInput(AdanegError):
    """An operation received an empty collection where data is required."""


class ManifestError(AdanegError):
    """Dataset manifest is malformed or inconsistent with its files."""


class DegenerateProxy(AdanegError):
    """Proxy aggregation produced a near-zero vector; inputs are corrupt."""


class EmptyPopulation(AdanegError):
    """Metric requested on an empty score population."""


class LengthMismatch(AdanegError):
    """Paired lists have different lengths."""


class ConfigInvalid(AdanegError):
    """Run or synthesis configuration violates a declared range."""


class InsufficientSamples(AdanegError):
    """Requested subsample cannot be realized from the available data."""
