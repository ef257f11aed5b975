"""Exception types shared across the package."""


class ScanPathError(Exception):
    """Base class for all package-specific errors."""


class ParseError(ScanPathError):
    """A file could not be parsed (malformed row, truncated document)."""


class SchemaError(ScanPathError):
    """Data violates a structural requirement (columns, dimensionality, time order)."""


class EmptyDatasetError(ScanPathError):
    """An operation received a dataset with no recordings."""


class ConfigError(ScanPathError):
    """Invalid configuration value (unknown rule name, bad class setup)."""


class GenerationError(ScanPathError):
    """Scan path generation cannot proceed (e.g. a model level has no nodes)."""


class FeatureError(ScanPathError):
    """A recording cannot be featurized (e.g. no velocities for a single point)."""


class VersionError(ParseError):
    """A model file declares an unsupported format version."""
