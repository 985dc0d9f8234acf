"""
Command-line entry point: loggas-dlr <command> --config path.json [--seed] [--workers] [--out].
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from config.settings import Command, get_log_level
from loggas.errors import ConfigValidationError, LogGasError
from utils.experiment_manager import parse_config, run_experiment

logger = logging.getLogger("loggas.cli")


def _parse_assignment(text: str) -> Dict[str, Any]:
    """KEY=VALUE with VALUE read as JSON when possible, else as a string."""
    if "=" not in text:
        raise ConfigValidationError(f"override '{text}' must look like key=value")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return {key.strip(): value}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loggas-dlr",
        description="Sample the periodic log-gas and check DLR, partition and statistical properties.",
    )
    parser.add_argument("command", choices=[c.value for c in Command], help="experiment to run")
    parser.add_argument("--config", type=Path, help="JSON experiment config")
    parser.add_argument("--seed", type=int, help="root seed (overrides the config)")
    parser.add_argument("--workers", type=int, help="parallel chain workers")
    parser.add_argument("--out", help="root directory for run directories")
    parser.add_argument(
        "--set", dest="assignments", action="append", default=[], metavar="KEY=VALUE",
        help="override any config key; may be repeated",
    )
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, get_log_level(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        source = args.config.read_text(encoding="utf-8") if args.config else "{}"
        overrides: Dict[str, Any] = {}
        for item in args.assignments:
            overrides.update(_parse_assignment(item))
        # flags win over --set, which wins over the file
        overrides.update({"command": args.command, "seed": args.seed, "workers": args.workers, "out": args.out})
        config = parse_config(source, overrides)
    except OSError as exc:
        logger.error("cannot read config: %s", exc)
        print(json.dumps({"error": "OSError", "message": str(exc), "field": "config"}), file=sys.stderr)
        return 2
    except LogGasError as exc:
        logger.error("invalid config: %s", exc)
        record = {"error": type(exc).__name__, "message": str(exc), "field": getattr(exc, "field", None)}
        print(json.dumps(record), file=sys.stderr)
        return 2
    except ValueError as exc:
        # a LOGGAS_* variable that does not parse as a number
        logger.error("invalid environment setting: %s", exc)
        print(json.dumps({"error": "ValueError", "message": str(exc), "field": "environment"}), file=sys.stderr)
        return 2

    outcome = run_experiment(config)
    if outcome.status == 0:
        logger.info("all checks passed; artifacts in %s", outcome.run_dir)
    elif outcome.status == 1:
        logger.warning("some checks failed; see %s", outcome.run_dir / "manifest.json")
    else:
        logger.error("run aborted; see %s", outcome.run_dir / "error.json")
    return outcome.status


if __name__ == "__main__":
    sys.exit(main())
