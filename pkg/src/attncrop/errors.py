class AttentionCropError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(AttentionCropError):
    """An input value violates a precondition (bad shape, empty data, ...)."""


class InvalidConfigError(AttentionCropError):
    """A configuration value is out of its allowed range."""


class EmptySelectionError(AttentionCropError):
    """No pixel qualified for the crop box; callers should fall back."""
