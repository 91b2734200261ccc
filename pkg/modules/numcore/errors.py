"""Exceptions raised by the tensor core"""


class NumcoreError(Exception):
    """Base class for tensor core failures"""


class DimensionError(NumcoreError, ValueError):
    """Operand shapes do not agree"""


class ContractError(NumcoreError, RuntimeError):
    """An operation was called outside its documented contract"""


class OutOfRangeError(NumcoreError, IndexError):
    """An integer index falls outside a table"""
