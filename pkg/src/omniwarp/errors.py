"""Exception taxonomy shared across the package."""


class OmniwarpError(Exception):
    """Base class for all package errors."""


class ValidationError(OmniwarpError):
    """Invalid parameters, sizes, or arguments."""


class GeometryMismatchError(ValidationError):
    """Incompatible table/image geometries."""


class UnachievableFovError(ValidationError):
    """Requested field of view cannot be realized by the lens family."""


class UnknownPresetError(ValidationError):
    """Preset name not present in the registry."""

    def __init__(self, name, available):
        self.name = name
        self.available = list(available)
        super().__init__(
            f"unknown preset {name!r}; available: {', '.join(self.available)}"
        )


class ConfigError(OmniwarpError):
    """Config file parse or validation failure (carries location info in message)."""


class CacheError(OmniwarpError):
    """Corrupt or unreadable remap-table cache file."""
