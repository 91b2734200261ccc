"""Inference-time style control and token analysis"""
from .plots import emit_f0_plot, emit_mixing_overlay, f0_table, overlay_points
from .profiling import (
    PurityReport,
    TokenProfile,
    dominant_token,
    purity_from_assignments,
    ranking_agreement,
    token_f0_profile,
    token_purity,
)
from .synthesis import (
    SynthOutput,
    resolve_model,
    synth_biased,
    synth_forced,
    synth_interpolated,
    synth_scheduled,
    synthesize_with,
    token_bias,
    vocode,
)
