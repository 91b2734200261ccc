"""Exceptions raised by the training loop"""


class TrainingError(RuntimeError):
    """Training cannot continue; `step` is where it stopped"""

    def __init__(self, message: str, step: int):
        super().__init__(f"step {step}: {message}")
        self.step = step


class ConfigError(ValueError):
    """A training configuration is malformed"""


class DatasetError(ValueError):
    """A dataset record cannot be used for training"""

    def __init__(self, message: str, record_id: str):
        super().__init__(f"record {record_id}: {message}")
        self.record_id = record_id
