"""
Exception types raised by the toolkit.
"""


class EMSequenceError(Exception):
    """
    Base class for all toolkit errors.
    """


class CapacityError(EMSequenceError, ValueError):
    """
    Requested sequence length exceeds the configured bit-storage limit.
    """


class StateMismatchError(EMSequenceError, ValueError):
    """
    Engine state does not correspond to the sequence handed to it.
    """


class MalformedHeaderError(EMSequenceError, ValueError):
    """
    Binary sequence file has a bad magic, short header or inconsistent size.
    """


class TruncatedPayloadError(EMSequenceError, ValueError):
    """
    Binary sequence file ends before ceil(n/8) payload bytes.
    """


class VersionMismatchError(EMSequenceError, ValueError):
    """
    Binary sequence file was written with an unsupported format version.
    """


class EmptyWordError(EMSequenceError, ValueError):
    """
    A word query was made with the empty word.
    """


class PositionRangeError(EMSequenceError, IndexError):
    """
    A 1-based position or range lies outside the stored sequence.
    """


class ConfigError(EMSequenceError, ValueError):
    """
    Configuration file or value could not be interpreted.
    """


class UsageError(EMSequenceError, ValueError):
    """
    Invalid command-line usage.
    """


class CheckError(EMSequenceError, ValueError):
    """
    A verification check raised or died inside a child process.
    """
