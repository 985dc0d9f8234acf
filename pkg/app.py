"""
Log-gas run browser - Streamlit companion for inspecting run directories.
"""
from pathlib import Path

import streamlit as st

from config.settings import get_output_dir
from utils import artifacts
from utils.ui_components import (
    display_checks,
    display_error_record,
    display_manifest_summary,
    display_results,
    display_run_sidebar,
    load_results,
)


# Page configuration
try:
    st.set_page_config(
        page_title="Log-gas runs",
        page_icon="📈",
        layout="wide",
        initial_sidebar_state="expanded",
    )
except Exception:
    # Page config already set, ignore
    pass

st.sidebar.title("📈 Log-gas DLR toolkit")
root = Path(st.sidebar.text_input("Output directory", value=get_output_dir()))
run_dir = display_run_sidebar(artifacts.list_run_dirs(root))

st.title("Run browser")

if run_dir is None:
    st.info(f"No run directories under '{root}'. Start one with: loggas-dlr partition --set n=2 --set beta=2")
    st.stop()

st.caption(str(run_dir))
error = artifacts.read_json(run_dir / artifacts.ERROR_FILE)
if error is not None:
    display_error_record(error)
    st.stop()

manifest = artifacts.read_json(run_dir / artifacts.MANIFEST_FILE) or {}
display_manifest_summary(manifest)
display_checks(manifest.get("checks", []))
display_results(load_results(run_dir))

with st.expander("Manifest"):
    st.json(manifest)

jsonl = sorted(run_dir.glob("*.jsonl"))
if jsonl:
    st.subheader("Configuration streams")
    for path in jsonl:
        with path.open(encoding="utf-8") as f:
            count = sum(1 for line in f if line.strip())
        st.write(f"**{path.name}**: {count} configurations")
