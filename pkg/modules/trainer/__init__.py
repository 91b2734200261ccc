"""Reconstruction-only training loop"""
from .config import TrainConfig
from .data import Batch, BatchStream, Example, collate, to_examples
from .errors import ConfigError, DatasetError, TrainingError
from .loop import FitResult, Trainer, checkpoint_path, fit, optimizer_path
from .loss import LOSS_COLUMNS, LossReport, reconstruction_loss
