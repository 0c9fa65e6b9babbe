"""Exception types shared across the package."""


class ConfigError(Exception):
    """Invalid configuration: bad mesh divisibility, malformed config file, ..."""


class GeometryError(Exception):
    """Inadmissible geometry: degenerate polygon, boundary contact, point outside domain."""


class NumericalError(Exception):
    """Runtime numerical failure: singular system, aborted iteration, accuracy violation."""
