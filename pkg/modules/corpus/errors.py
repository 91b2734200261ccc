"""Exceptions raised while generating or reading a corpus"""


class CorpusError(Exception):
    """Base class for corpus failures"""


class GenerationError(CorpusError, ValueError):
    """A style or symbol drives the synthetic source outside its valid range"""


class CorpusIOError(CorpusError, OSError):
    """A dataset file is missing, unreadable or inconsistent with the manifest"""
