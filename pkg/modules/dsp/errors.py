"""Exceptions raised by the signal-processing stack"""


class DspError(Exception):
    """Base class for signal-processing failures"""


class SignalContractError(DspError, ValueError):
    """Inputs violate an operation's preconditions"""


class FileFormatError(DspError, OSError):
    """An audio or spectrogram file is malformed"""
