"""Training Runs page"""
from pathlib import Path

import pandas as pd
import streamlit as st

from modules.db_utils import list_checkpoints, list_runs

from .loop import LOSS_CURVE


def training_runs_ui():
    """List registered runs with their loss curves and checkpoints"""
    st.title("Training Runs")
    runs = list_runs()
    if not runs:
        st.info("No training runs registered yet. Start one with `python cli.py train --config FILE`.")
        return

    table = pd.DataFrame(runs)[["id", "status", "seed", "steps", "final_step", "final_loss", "out_dir", "started_at"]]
    st.dataframe(table, use_container_width=True)

    run_id = st.selectbox("Run", [r["id"] for r in runs])
    run = next(r for r in runs if r["id"] == run_id)

    curve = Path(run["out_dir"]) / LOSS_CURVE
    if curve.is_file():
        frame = pd.read_csv(curve).set_index("step")
        st.subheader("Loss")
        st.line_chart(frame[["mel_l1", "lin_l1", "total"]])
    else:
        st.warning(f"No loss curve at {curve}")

    st.subheader("Checkpoints")
    checkpoints = list_checkpoints(run_id)
    if checkpoints:
        st.dataframe(pd.DataFrame(checkpoints), use_container_width=True)
        if st.button("Open latest in Style Explorer"):
            st.session_state.explorer_ckpt = checkpoints[-1]["path"]
            st.success("Switch the mode to Style Explorer")
