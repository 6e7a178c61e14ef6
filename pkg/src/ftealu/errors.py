class FtealuError(Exception):
    pass


class ConfigurationError(FtealuError, ValueError):
    """Inconsistent widths, version counts, or unsupported transform kinds."""


class UsageError(FtealuError, ValueError):
    """A request that cannot be served as asked (empty accumulator, oversized dataset)."""
