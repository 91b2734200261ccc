import streamlit as st
from modules.db_utils import init_db
from modules.settings import configure_logging
from modules.style_control.ui import style_explorer_ui
from modules.trainer.ui import training_runs_ui

def main():
    st.set_page_config(layout="wide")
    configure_logging()
    # Initialize the run registry
    init_db()

    app_mode = "Style Explorer"
    # Sidebar setup
    with st.sidebar:
        st.title("Style Tokens")
        app_mode = st.selectbox("Choose the app mode",
                                 ["Style Explorer", "Training Runs"],
                                 index=0)

    if app_mode == "Training Runs":
        training_runs_ui()
    elif app_mode == "Style Explorer":
        style_explorer_ui()

if __name__ == "__main__":
    main()
