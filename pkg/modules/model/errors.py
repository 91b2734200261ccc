"""Exceptions raised by the network package"""


class CheckpointError(ValueError):
    """A checkpoint file is malformed or does not match its configuration"""
