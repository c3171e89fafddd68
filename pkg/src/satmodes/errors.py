"""Exception types shared across the simulator."""


class TruncationError(RuntimeError):
    """A mode does not fit on its grid (norm lost to truncation or undersampling)."""


class IncompatibleGridError(ValueError):
    """Two fields defined on different grids were combined."""


class GridExtentError(RuntimeError):
    """Too much power near the grid boundary: extent or resolution inadequate."""


class DegenerateChannelError(RuntimeError):
    """A channel column carries no probability; detection statistics undefined."""


class UnsupportedDimensionError(ValueError):
    """No complete set of mutually unbiased bases is available for this dimension."""


class EnsembleCacheError(RuntimeError):
    """An ensemble cache file could not be used."""


class CacheChecksumError(EnsembleCacheError):
    """Stored checksum does not match the file payload."""


class CacheMismatchError(EnsembleCacheError):
    """Cached ensemble was generated with different parameters than requested."""
