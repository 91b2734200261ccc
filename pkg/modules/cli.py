"""Command-line workflow: corpus, train, synth, profile, purity, overlay"""
import argparse
import json
import logging
import sqlite3
import sys
from pathlib import Path

import pandas as pd

from modules import settings
from modules.corpus import CorpusError, build_corpus
from modules.dsp import DEFAULT_AUDIO, DspError, feature_to_amplitude, write_spectrogram, write_wav
from modules.model import CheckpointError, StyleDirective, load_checkpoint
from modules.numcore import NumcoreError
from modules.style_control import (
    emit_f0_plot,
    emit_mixing_overlay,
    synthesize_with,
    token_bias,
    token_f0_profile,
    token_purity,
)
from modules.style_control.parsing import parse_floats, parse_ints, parse_symbols, read_schedule, read_texts
from modules.trainer import ConfigError, DatasetError, TrainConfig, TrainingError, fit

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2
RUNTIME_ERRORS = (
    NumcoreError,
    DspError,
    CorpusError,
    CheckpointError,
    TrainingError,
    DatasetError,
    ConfigError,
    OSError,
    sqlite3.Error,
)


class UsageError(Exception):
    """Bad flags or flag values"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _directive_flags(parser):
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--force", type=int, default=None, help="attend only to this token (default: %(default)s)")
    group.add_argument("--bias", default=None, help="comma list of tokens to broadcast-add (default: %(default)s)")
    group.add_argument("--interp", default=None, help="comma list of K attention weights (default: %(default)s)")
    group.add_argument("--schedule", default=None, help="CSV of per-step K weights (default: %(default)s)")
    parser.add_argument("--scale", default=None, help="comma list of bias scales, one per --bias token (default: 1.0 each)")


def build_parser():
    parser = _Parser(prog="style-tokens", description=__doc__, formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument("--log-level", default=None, help="overrides STYLE_TOKENS_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("corpus", help="build a synthetic dataset", formatter_class=fmt)
    p.add_argument("--n", type=int, default=64, help="utterance count")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", required=True, help="dataset directory")
    p.add_argument("--min-len", type=int, default=3)
    p.add_argument("--max-len", type=int, default=8)

    p = sub.add_parser("train", help="fit a model from a JSON config", formatter_class=fmt)
    p.add_argument("--config", required=True, help="TrainConfig JSON")
    p.add_argument("--resume", default=None, help="checkpoint to continue from")
    p.add_argument("--no-registry", action="store_true", help="do not record the run in the SQLite registry")

    p = sub.add_parser("synth", help="synthesize one text", formatter_class=fmt)
    p.add_argument("--text", required=True, help="comma-separated symbol ids")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--max-steps", type=int, default=200)
    p.add_argument("--seed", type=int, default=0, help="Griffin-Lim phase seed")
    _directive_flags(p)

    p = sub.add_parser("profile", help="F0 profile of style tokens", formatter_class=fmt)
    p.add_argument("--ckpt", required=True)
    p.add_argument("--texts-file", required=True, help="one comma-separated symbol list per line")
    p.add_argument("--tokens", default=None, help="comma list of tokens (default: all)")
    p.add_argument("--mode", choices=["force", "bias"], default="force")
    p.add_argument("--scale", type=float, default=1.0, help="bias scale for --mode bias")
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--plot-text", type=int, default=0, help="index of the text whose tracks are plotted")
    p.add_argument("--max-steps", type=int, default=200)
    p.add_argument("--seed", type=int, default=0, help="Griffin-Lim phase seed")

    p = sub.add_parser("purity", help="token purity against ground-truth styles", formatter_class=fmt)
    p.add_argument("--ckpt", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", default=None, help="JSON report path (default: stdout)")
    p.add_argument("--limit", type=int, default=None, help="only the first N records")
    p.add_argument("--seed", type=int, default=0, help="unused by the analysis; echoed for the run log")

    p = sub.add_parser("overlay", help="mel heatmap with the text mixing weight", formatter_class=fmt)
    p.add_argument("--ckpt", required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--out", required=True, help="SVG path")
    p.add_argument("--max-steps", type=int, default=200)
    p.add_argument("--seed", type=int, default=0, help="unused by the analysis; echoed for the run log")
    _directive_flags(p)
    return parser


def _directive_from_flags(args, model):
    if args.scale is not None and args.bias is None:
        raise UsageError("--scale requires --bias")
    if args.force is not None:
        return StyleDirective.force(args.force)
    if args.bias is not None:
        tokens = parse_ints(args.bias)
        scales = parse_floats(args.scale) if args.scale is not None else [1.0] * len(tokens)
        if len(scales) != len(tokens):
            raise UsageError(f"--bias names {len(tokens)} tokens but --scale gives {len(scales)} values")
        return StyleDirective.bias(token_bias(model, list(zip(tokens, scales))))
    if args.interp is not None:
        return StyleDirective.interpolate(parse_floats(args.interp))
    if args.schedule is not None:
        return StyleDirective.schedule(read_schedule(args.schedule))
    return StyleDirective.none()


def _parse_directive(args, model):
    """Directive from the mutually exclusive flags, checked against the checkpoint's token bank"""
    try:
        return _directive_from_flags(args, model).validate(model.config.n_tokens, model.config.d_tok)
    except NumcoreError as e:
        raise UsageError(str(e)) from e


def _announce_seed(seed):
    print(f"seed: {seed}")
    logger.info("Resolved seed %d", seed)


def cmd_corpus(args):
    seed = settings.resolve_seed(args.seed)
    _announce_seed(seed)
    manifest = build_corpus(args.n, seed, args.out, min_len=args.min_len, max_len=args.max_len)
    print(f"wrote {len(manifest)} utterances to {args.out}")


def cmd_train(args):
    try:
        config = TrainConfig.load(args.config)
    except OSError as e:
        raise ConfigError(f"cannot read config {args.config}: {e}") from e
    config.seed = settings.resolve_seed(config.seed)
    _announce_seed(config.seed)
    registry = None if args.no_registry else settings.db_path()
    result = fit(config, resume=args.resume, registry=registry)
    print(f"checkpoint: {result.checkpoint}")
    print(f"loss curve: {result.loss_curve}")


def cmd_synth(args):
    seed = settings.resolve_seed(args.seed)
    _announce_seed(seed)
    symbols = parse_symbols(args.text)
    model = load_checkpoint(args.ckpt)
    directive = _parse_directive(args, model)
    out = synthesize_with(model, symbols, directive, args.max_steps, waveform=model.config.use_postnet, seed=seed)

    prefix = Path(args.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    write_spectrogram(Path(f"{prefix}.mel"), feature_to_amplitude(out.mel, DEFAULT_AUDIO))
    if out.linear is not None:
        write_spectrogram(Path(f"{prefix}.lin"), feature_to_amplitude(out.linear, DEFAULT_AUDIO))
    if out.waveform is not None:
        write_wav(Path(f"{prefix}.wav"), out.waveform)
    trace = out.trace.to_dict()
    trace["config"] = model.config.to_dict()
    trace["directive"] = directive.to_dict()
    trace["symbols"] = symbols
    with open(Path(f"{prefix}.trace.json"), "w", encoding="utf-8") as fh:
        json.dump(trace, fh, sort_keys=True)
    print(f"wrote {out.mel.shape[0]} frames to {prefix}.*")


def cmd_profile(args):
    seed = settings.resolve_seed(args.seed)
    _announce_seed(seed)
    texts = read_texts(args.texts_file)
    if not texts:
        raise UsageError(f"{args.texts_file} holds no texts")
    if not 0 <= args.plot_text < len(texts):
        raise UsageError(f"--plot-text {args.plot_text} outside {len(texts)} texts")
    model = load_checkpoint(args.ckpt)
    tokens = parse_ints(args.tokens) if args.tokens else list(range(model.config.n_tokens))
    profiles = token_f0_profile(model, texts, tokens, args.mode, args.scale, max_steps=args.max_steps, progress=True)

    prefix = Path(args.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    rows = [row for p in profiles for row in p.rows()]
    pd.DataFrame(rows).to_csv(f"{prefix}_profile.csv", index=False, float_format="%.6f")
    tracks = {p.token: p.tracks[args.plot_text] for p in profiles}
    csv_path, svg_path = emit_f0_plot(profiles, tracks, Path(f"{prefix}_f0"))
    for p in profiles:
        print(f"token {p.token}: mean F0 {p.mean:.1f} Hz over {p.n_voiced}/{p.n_texts} voiced texts")
    print(f"wrote {prefix}_profile.csv, {csv_path}, {svg_path}")


def cmd_purity(args):
    seed = settings.resolve_seed(args.seed)
    _announce_seed(seed)
    report = token_purity(load_checkpoint(args.ckpt), args.dataset, limit=args.limit, progress=True)
    text = json.dumps(report.to_dict(), sort_keys=True, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    print(f"purity: {report.purity:.3f}")


def cmd_overlay(args):
    seed = settings.resolve_seed(args.seed)
    _announce_seed(seed)
    symbols = parse_symbols(args.text)
    model = load_checkpoint(args.ckpt)
    directive = _parse_directive(args, model)
    out = synthesize_with(model, symbols, directive, args.max_steps, waveform=False)
    path = emit_mixing_overlay(out.mel, out.trace, args.out, model.config.r)
    print(f"wrote {path}")


COMMANDS = {
    "corpus": cmd_corpus,
    "train": cmd_train,
    "synth": cmd_synth,
    "profile": cmd_profile,
    "purity": cmd_purity,
    "overlay": cmd_overlay,
}


def run(argv=None):
    """Run one subcommand; returns 0 on success, 1 on usage errors, 2 on runtime errors"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    try:
        settings.configure_logging(args.log_level)
        COMMANDS[args.command](args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except RUNTIME_ERRORS as e:
        logger.error("%s failed: %s", args.command, e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as e:
        # malformed flag values surface from the parsers as ValueError
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main():
    return run(sys.argv[1:])
