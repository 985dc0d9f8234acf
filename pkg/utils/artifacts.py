"""
Run directories and the files written into them: configuration JSONL
streams, result CSV, the run manifest and the error record.
"""
import csv
import hashlib
import json
import logging
import platform
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np
import scipy

from config.settings import CSV_COLUMNS
from loggas import __version__
from loggas.configuration import PointConfiguration, to_jsonl
from loggas.errors import LogGasError

logger = logging.getLogger(__name__)

# Keys that change wall time or location but never the results
NON_SEMANTIC_KEYS = frozenset({"workers", "out"})

MANIFEST_FILE = "manifest.json"
RESULTS_FILE = "results.csv"
ERROR_FILE = "error.json"


def canonical_json(obj: Any) -> str:
    """Sorted-key compact JSON; equal mappings give equal text."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def config_hash(config: Mapping[str, Any]) -> str:
    """sha256 of the canonical JSON of the config without non-semantic keys."""
    subset = {k: v for k, v in config.items() if k not in NON_SEMANTIC_KEYS}
    return hashlib.sha256(canonical_json(subset).encode("utf-8")).hexdigest()


def make_run_dir(root: Path, digest: str) -> Path:
    """
    Allocate a fresh run directory named by the config hash.

    Existing directories are never reused; a rerun gets a -2, -3, ... suffix.
    """
    root.mkdir(parents=True, exist_ok=True)
    base = digest[:16]
    for attempt in range(1, 10000):
        name = base if attempt == 1 else f"{base}-{attempt}"
        run_dir = root / name
        try:
            run_dir.mkdir(exist_ok=False)
        except FileExistsError:
            continue
        logger.info("run directory %s", run_dir)
        return run_dir
    raise LogGasError(f"unable to allocate a fresh run directory under {root}")


def versions() -> Dict[str, str]:
    return {
        "loggas": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


def write_jsonl(path: Path, configs: Sequence[PointConfiguration]) -> None:
    path.write_text(to_jsonl(configs), encoding="utf-8")


def _format(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_results_csv(path: Path, rows: Iterable[Mapping[str, Any]]) -> int:
    """
    Write result rows with the fixed column set; returns the row count.

    Every row must carry every column, so each line is self-describing.
    """
    count = 0
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            missing = [c for c in CSV_COLUMNS if c not in row]
            if missing:
                raise LogGasError(f"result row lacks columns {missing}")
            writer.writerow({c: _format(row[c]) for c in CSV_COLUMNS})
            count += 1
    return count


def write_json(path: Path, obj: Any) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_manifest(
    run_dir: Path,
    digest: str,
    seed: int,
    wall_time: float,
    passed: bool,
    checks: List[Dict[str, Any]],
    extra: Mapping[str, Any],
) -> Dict[str, Any]:
    """Manifest JSON: hash, seed, versions, wall time, pass flag, checks and run-specific fields."""
    manifest = {
        "config_hash": digest,
        "seed": seed,
        "versions": versions(),
        "wall_time": wall_time,
        "pass": passed,
        "checks": checks,
    }
    manifest.update(extra)
    write_json(run_dir / MANIFEST_FILE, manifest)
    return manifest


def write_error(run_dir: Path, error: Exception) -> Dict[str, Any]:
    """Machine-readable record of a failed run."""
    record = {
        "error": type(error).__name__,
        "message": str(error),
        "field": getattr(error, "field", None),
    }
    write_json(run_dir / ERROR_FILE, record)
    return record


def list_run_dirs(root: Path) -> List[Path]:
    """Run directories under root that carry a manifest or an error record, by name."""
    if not root.exists():
        return []
    return sorted(
        p for p in root.iterdir()
        if p.is_dir() and ((p / MANIFEST_FILE).exists() or (p / ERROR_FILE).exists())
    )


def read_json(path: Path) -> Optional[Dict[str, Any]]:
    """Decoded JSON object, or None when the file is missing or malformed."""
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError):
        return None
    return data if isinstance(data, dict) else None
