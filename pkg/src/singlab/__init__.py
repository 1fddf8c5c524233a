"""singlab: numerical laboratory for conformal metrics and potential theory near singular sets."""

__version__ = "0.1.0"
