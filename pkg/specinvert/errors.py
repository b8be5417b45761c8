"""
errors.py — exception types raised by specinvert.

Every failure the CLI can report derives from SpecInvertError so that
`cli.main` can turn it into a one-line diagnostic and a nonzero exit code.
Numeric-input errors also derive from ValueError.
"""


class SpecInvertError(Exception):
    pass


class ConfigError(SpecInvertError, ValueError):
    pass


class SignalError(SpecInvertError, ValueError):
    pass


class StateError(SpecInvertError, RuntimeError):
    pass


# --- file formats (.lms, .gwt, .wav) ---

class FormatError(SpecInvertError, ValueError):
    pass


class BadMagicError(FormatError):
    pass


class VersionMismatchError(FormatError):
    pass


class TruncatedFileError(FormatError):
    pass


class UnknownLayerError(FormatError):
    pass


class ShapeMismatchError(FormatError):
    pass


class WavFormatError(FormatError):
    pass


class NotPcm16Error(WavFormatError):
    pass


class ChannelCountError(WavFormatError):
    pass


class SampleRateError(WavFormatError):
    pass
