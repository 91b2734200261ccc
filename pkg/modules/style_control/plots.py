"""F0 trajectory plots and mixing-weight overlays as SVG 1.1"""
from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from modules.dsp import F0Track
from modules.numcore import ContractError

logger = logging.getLogger(__name__)

SVG_NS = "http://www.w3.org/2000/svg"
F0_COLUMNS = ["frame", "seconds", "token", "f0_hz"]
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]

WIDTH, HEIGHT = 640, 360
MARGIN = 50


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def _svg(width, height, **attrs) -> ET.Element:
    root = ET.Element("svg", xmlns=SVG_NS, version="1.1", width=str(width), height=str(height), **attrs)
    return root


def _write_svg(root: ET.Element, path: Path):
    try:
        ET.ElementTree(root).write(path, encoding="utf-8", xml_declaration=True)
    except OSError as e:
        logger.error("Error writing SVG %s: %s", path, e)
        raise


def f0_table(tracks: Dict[int, F0Track]) -> pd.DataFrame:
    rows = []
    for token in sorted(tracks):
        track = tracks[token]
        seconds = track.seconds()
        for frame in np.flatnonzero(track.voiced):
            rows.append({"frame": int(frame), "seconds": float(seconds[frame]), "token": token, "f0_hz": float(track.hz[frame])})
    return pd.DataFrame(rows, columns=F0_COLUMNS)


def emit_f0_plot(profiles: Optional[Sequence], tracks: Dict[int, F0Track], path) -> Tuple[Path, Path]:
    """Write <path>.csv (voiced frames only) and <path>.svg (one polyline per token)"""
    if not tracks:
        raise ContractError("emit_f0_plot needs at least one track")
    path = Path(path)
    csv_path, svg_path = path.with_suffix(".csv"), path.with_suffix(".svg")
    table = f0_table(tracks)
    try:
        table.to_csv(csv_path, index=False, float_format="%.6f")
    except OSError as e:
        logger.error("Error writing F0 CSV %s: %s", csv_path, e)
        raise

    t_max = max(max(len(t) - 1, 1) * t.hop / t.sample_rate for t in tracks.values())
    if len(table):
        lo, hi = float(table["f0_hz"].min()), float(table["f0_hz"].max())
    else:
        lo, hi = 0.0, 1.0
    pad = max(10.0, 0.1 * (hi - lo))
    lo, hi = max(0.0, lo - pad), hi + pad
    plot_w, plot_h = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN

    def xy(sec, hz):
        return MARGIN + sec / t_max * plot_w, MARGIN + (1.0 - (hz - lo) / (hi - lo)) * plot_h

    root = _svg(WIDTH, HEIGHT)
    ET.SubElement(root, "rect", x="0", y="0", width=str(WIDTH), height=str(HEIGHT), fill="white")
    axes = ET.SubElement(root, "g", id="axes", stroke="black")
    ET.SubElement(axes, "line", x1=str(MARGIN), y1=str(HEIGHT - MARGIN), x2=str(WIDTH - MARGIN), y2=str(HEIGHT - MARGIN))
    ET.SubElement(axes, "line", x1=str(MARGIN), y1=str(MARGIN), x2=str(MARGIN), y2=str(HEIGHT - MARGIN))
    ET.SubElement(root, "text", x=str(WIDTH // 2), y=str(HEIGHT - 12), attrib={"text-anchor": "middle"}).text = "time (seconds)"
    label = ET.SubElement(root, "text", x="14", y=str(HEIGHT // 2), transform=f"rotate(-90 14 {HEIGHT // 2})", attrib={"text-anchor": "middle"})
    label.text = "F0 (Hz)"
    for value, anchor in ((lo, HEIGHT - MARGIN), (hi, MARGIN)):
        ET.SubElement(root, "text", x=str(MARGIN - 4), y=str(anchor), attrib={"text-anchor": "end", "font-size": "10"}).text = f"{value:.0f}"
    ET.SubElement(root, "text", x=str(WIDTH - MARGIN), y=str(HEIGHT - MARGIN + 14), attrib={"text-anchor": "end", "font-size": "10"}).text = f"{t_max:.2f}"

    means = {p.token: p.mean for p in profiles or []}
    for i, token in enumerate(sorted(tracks)):
        color = PALETTE[i % len(PALETTE)]
        rows = table[table["token"] == token]
        points = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in (xy(s, f) for s, f in zip(rows["seconds"], rows["f0_hz"])))
        ET.SubElement(root, "polyline", points=points, fill="none", stroke=color, attrib={"stroke-width": "1.5", "data-token": str(token)})
        legend = f"token {token}"
        if token in means and np.isfinite(means[token]):
            legend += f" ({means[token]:.0f} Hz)"
        ET.SubElement(root, "text", x=str(WIDTH - MARGIN - 4), y=str(MARGIN + 14 * (i + 1)), fill=color, attrib={"text-anchor": "end", "font-size": "11"}).text = legend

    _write_svg(root, svg_path)
    return csv_path, svg_path


def overlay_points(g_text: np.ndarray, r: int, n_mels: int) -> np.ndarray:
    """Step values held over r frames, mapped 0 → bottom (y = n_mels), 1 → top (y = 0)"""
    held = np.repeat(np.asarray(g_text, dtype=np.float64), r)
    frames = held.shape[0]
    xs = np.repeat(np.arange(frames + 1), 2)[1:-1]
    ys = np.repeat((1.0 - held) * n_mels, 2)
    return np.stack([xs, ys], axis=1)


def emit_mixing_overlay(mel: np.ndarray, trace, path, r: int) -> Path:
    """Mel heatmap in frame × band units with g_text as a dashed line on top"""
    mel = np.asarray(mel, dtype=np.float64)
    frames, n_mels = mel.shape
    if trace.n_steps * r != frames:
        raise ContractError(f"{trace.n_steps} trace steps × r={r} does not cover {frames} mel frames")
    path = Path(path)
    shades = np.clip(np.round(255 * (1.0 - np.clip(mel, 0.0, 1.0))), 0, 255).astype(int)

    root = _svg(max(frames * 4, 200), n_mels * 6, viewBox=f"0 0 {frames} {n_mels}", preserveAspectRatio="none")
    heat = ET.SubElement(root, "g", id="mel")
    for i in range(frames):
        for j in range(n_mels):
            level = shades[i, j]
            ET.SubElement(heat, "rect", x=str(i), y=str(n_mels - 1 - j), width="1", height="1", fill=f"rgb({level},{level},{level})")
    points = overlay_points(trace.g_text, r, n_mels)
    ET.SubElement(
        root,
        "polyline",
        id="g_text",
        points=" ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points),
        fill="none",
        stroke="red",
        attrib={"stroke-dasharray": "4 3", "stroke-width": "1.5", "vector-effect": "non-scaling-stroke"},
    )
    _write_svg(root, path)
    return path
