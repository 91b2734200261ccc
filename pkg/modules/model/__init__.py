"""Style-token sequence-to-sequence acoustic model"""
from .checkpoint import decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint
from .config import ModelConfig, StyleDirective
from .errors import CheckpointError
from .layers import (
    AttentionWeights,
    DecoderMemory,
    DecoderState,
    StepOutput,
    attend,
    controller,
    decoder_step,
    postnet,
    style_encode,
)
from .network import (
    AttentionTrace,
    EncoderOutput,
    ForwardResult,
    StyleTokenModel,
    SynthesisResult,
    pad_frames,
    pad_symbols,
)
from .params import init_params, parameter_shapes, snapshot
