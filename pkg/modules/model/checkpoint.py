"""STCK checkpoint files"""
from __future__ import annotations

import json
import logging
import struct
from pathlib import Path

import numpy as np

from modules.numcore import ContractError, ParamStore, Tensor

from .config import ModelConfig
from .errors import CheckpointError
from .network import StyleTokenModel
from .params import parameter_shapes

logger = logging.getLogger(__name__)

MAGIC = b"STCK"
FORMAT_VERSION = 1


def _u32(value: int) -> bytes:
    return struct.pack("<I", value)


def encode_checkpoint(model: StyleTokenModel) -> bytes:
    """magic, u32 version, u32-prefixed config JSON, u32 block count, then per
    block: u32 name length, name, u32 rank, u32 dims, float32 LE values"""
    config = model.config.to_json().encode("utf-8")
    parts = [MAGIC, _u32(FORMAT_VERSION), _u32(len(config)), config, _u32(len(model.params))]
    for name, shape, _ in parameter_shapes(model.config):
        values = model.params[name].values
        encoded = name.encode("utf-8")
        parts += [_u32(len(encoded)), encoded, _u32(len(shape))]
        parts += [_u32(d) for d in shape]
        parts.append(np.ascontiguousarray(values, dtype="<f4").tobytes())
    return b"".join(parts)


def save_checkpoint(path, model: StyleTokenModel) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_bytes(encode_checkpoint(model))
        tmp.replace(path)
    except OSError as e:
        logger.error("Error saving checkpoint %s: %s", path, e)
        raise
    return path


class _Reader:
    def __init__(self, data: bytes, path):
        self.data = data
        self.pos = 0
        self.path = path

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise CheckpointError(f"{self.path}: truncated at byte {self.pos}")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]


def decode_checkpoint(data: bytes, path="<bytes>") -> StyleTokenModel:
    reader = _Reader(data, path)
    if reader.take(4) != MAGIC:
        raise CheckpointError(f"{path}: not a style-token checkpoint")
    version = reader.u32()
    if version != FORMAT_VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
    try:
        config = ModelConfig.from_dict(json.loads(reader.take(reader.u32()).decode("utf-8")))
    except (ValueError, TypeError, ContractError) as e:
        raise CheckpointError(f"{path}: bad model config: {e}") from e

    expected = parameter_shapes(config)
    count = reader.u32()
    if count != len(expected):
        raise CheckpointError(f"{path}: {count} parameter blocks, config needs {len(expected)}")
    store = ParamStore()
    for name, shape, _ in expected:
        found = reader.take(reader.u32()).decode("utf-8")
        if found != name:
            raise CheckpointError(f"{path}: expected block {name!r}, found {found!r}")
        dims = tuple(reader.u32() for _ in range(reader.u32()))
        if dims != shape:
            raise CheckpointError(f"{path}: block {name!r} has shape {dims}, config needs {shape}")
        size = int(np.prod(shape)) * 4
        values = np.frombuffer(reader.take(size), dtype="<f4").reshape(shape)
        store.add(name, Tensor(values.astype(config.np_dtype)))
    if reader.pos != len(data):
        raise CheckpointError(f"{path}: {len(data) - reader.pos} trailing bytes")
    return StyleTokenModel(config, store)


def load_checkpoint(path) -> StyleTokenModel:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise CheckpointError(f"cannot read checkpoint {path}: {e}") from e
    return decode_checkpoint(data, path)
