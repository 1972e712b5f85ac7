"""Exception types shared across the package."""


class ResourceLimitError(RuntimeError):
    """An enumeration or scan would exceed a configured size cap."""


class PrecisionError(RuntimeError):
    """A quadrature could not certify the requested accuracy within budget."""


class ConstructionError(ValueError):
    """A direction-family construction constraint cannot be met.

    The message names the violated constraint so callers (and the CLI,
    which maps this to exit code 2) can report it verbatim.
    """


class ParseError(ValueError):
    """A serialized artifact is malformed; message carries a location."""
