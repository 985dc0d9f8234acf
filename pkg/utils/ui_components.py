"""
Reusable Streamlit UI components for browsing run directories.
"""
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd
import streamlit as st

from utils import artifacts


def load_results(run_dir: Path) -> Optional[pd.DataFrame]:
    """
    Load a run's result CSV.

    Args:
        run_dir: Run directory

    Returns:
        DataFrame with the result columns, or None when the run wrote no CSV
    """
    path = run_dir / artifacts.RESULTS_FILE
    if not path.exists():
        return None
    return pd.read_csv(path, true_values=["true"], false_values=["false"])


def display_run_sidebar(runs: List[Path]) -> Optional[Path]:
    """
    List run directories in the sidebar and return the selected one.

    Args:
        runs: Run directories, oldest name first

    Returns:
        Selected run directory, or None if there are no runs
    """
    st.sidebar.header("📂 Runs")
    if not runs:
        st.sidebar.write("_No runs yet_")
        return None
    names = [r.name for r in runs]
    choice = st.sidebar.selectbox("Run directory", names, index=len(names) - 1)
    return runs[names.index(choice)]


def display_manifest_summary(manifest: Dict[str, Any]) -> None:
    """Headline metrics of a finished run."""
    cols = st.columns(4)
    cols[0].metric("Command", manifest.get("command", "?"))
    params = manifest.get("params", {})
    cols[1].metric("n / beta", f"{params.get('n', '?')} / {params.get('beta', '?')}")
    cols[2].metric("Seed", str(manifest.get("seed", "?")))
    cols[3].metric("Wall time (s)", f"{manifest.get('wall_time', 0.0):.2f}")
    if manifest.get("pass"):
        display_success_message("All checks passed")
    else:
        display_error_message("Some checks failed")


def display_checks(checks: List[Dict[str, Any]]) -> None:
    """Acceptance checks as a table."""
    st.subheader("Checks")
    if not checks:
        display_info_message("This command records no checks.")
        return
    st.dataframe(pd.DataFrame(checks), use_container_width=True)


def display_results(frame: Optional[pd.DataFrame]) -> None:
    """Result rows grouped by test name."""
    st.subheader("Results")
    if frame is None:
        display_info_message("No result CSV in this run.")
        return
    for test, group in frame.groupby("test", sort=False):
        with st.expander(f"{test} ({len(group)} rows)"):
            st.dataframe(group.reset_index(drop=True), use_container_width=True)


def display_error_record(record: Dict[str, Any]) -> None:
    display_error_message(f"{record.get('error')}: {record.get('message')}")
    if record.get("field"):
        st.caption(f"Field: {record['field']}")


def display_error_message(message: str) -> None:
    st.error(f"⚠️ {message}")


def display_success_message(message: str) -> None:
    st.success(f"✅ {message}")


def display_info_message(message: str) -> None:
    st.info(f"ℹ️ {message}")
