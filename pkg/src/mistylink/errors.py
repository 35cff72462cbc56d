"""Exception types shared across the package."""


class MistyLinkError(Exception):
    """Base class for every error this package raises on purpose."""


class KeyLengthError(MistyLinkError, ValueError):
    """A key does not have the single length its cipher requires."""


class BlockAlignmentError(MistyLinkError, ValueError):
    """CBC input is empty or not a multiple of the 8-byte block."""


class PayloadLengthError(MistyLinkError, ValueError):
    """Frame payload exceeds the one-byte length field."""


class CounterWrapError(MistyLinkError):
    """The 32-bit frame counter is exhausted; the link must be rekeyed."""


class MalformedFrame(MistyLinkError):
    """Wire bytes do not parse as a frame (truncated, bad reserved bits,
    or a length field that disagrees with the frame)."""


class BadMac(MistyLinkError):
    """Authentication tag mismatch; the frame is rejected unread."""


class ReplayRejected(MistyLinkError):
    """Frame counter not newer than the last one accepted from its source."""


class ConfigError(MistyLinkError, ValueError):
    """Invalid scenario, benchmark, or tool configuration."""


class ParseError(ConfigError):
    """A structured input file failed to parse.

    Carries the 1-based line number when one is known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
