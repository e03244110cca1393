"""Logging setup and seed derivation for the graph-state verifier."""

from datetime import datetime
from pathlib import Path
from typing import Union
import logging
import shutil
import sys

import numpy as np

from src.core.config import CALIBRATION_SPAWN_KEY, LOG_KEEP_RECENT, LOG_PREFIX

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# marks the handlers setup_logging owns, so a later call can swap them out
_OWNED = "_graphstate_verifier_handler"


def setup_logging(
    log_dir: Union[str, Path],
    keep_recent: int = LOG_KEEP_RECENT,
    level: int = logging.INFO,
) -> Path:
    """
    Route log records to a new timestamped file in log_dir and to stderr.

    Handlers installed by an earlier call are closed and replaced, so several
    commands can run in one process without duplicating output. Log files
    beyond the keep_recent newest are moved to log_dir/archive first.

    Args:
        log_dir: Directory that receives the log files
        keep_recent: Number of log files left in log_dir before the new one
        level: Root logging level

    Returns:
        Path of the new log file

    Usage:
        setup_logging("logs", keep_recent=5)
    """
    logs_dir = Path(log_dir)
    archive_dir = logs_dir / "archive"
    archive_dir.mkdir(parents=True, exist_ok=True)
    archived = _cleanup_old_logs(logs_dir, archive_dir, keep_recent)

    log_path = logs_dir / f"{LOG_PREFIX}_{datetime.now().strftime('%Y%m%d_%H%M%S_%f')}.log"
    formatter = logging.Formatter(LOG_FORMAT)

    root = logging.getLogger()
    for handler in [h for h in root.handlers if getattr(h, _OWNED, False)]:
        root.removeHandler(handler)
        handler.close()
    for handler in (logging.FileHandler(log_path, encoding="utf-8"), logging.StreamHandler(sys.stderr)):
        handler.setFormatter(formatter)
        setattr(handler, _OWNED, True)
        root.addHandler(handler)
    root.setLevel(level)

    logger = logging.getLogger(__name__)
    logger.info(f"Logging to: {log_path}")
    if archived:
        logger.info(f"Archived {len(archived)} old log file(s) to {archive_dir}")
    return log_path


def _cleanup_old_logs(logs_dir: Path, archive_dir: Path, keep_recent: int) -> list[Path]:
    """Move every log file but the keep_recent newest into archive_dir; return their new paths."""
    newest_first = sorted(
        logs_dir.glob(f"{LOG_PREFIX}_*.log"),
        key=lambda path: path.stat().st_mtime,
        reverse=True,
    )
    moved = []
    for stale in newest_first[keep_recent:]:
        target = archive_dir / stale.name
        shutil.move(str(stale), str(target))
        moved.append(target)
    return moved


def derive_seeds(master_seed: int, count: int) -> list[int]:
    """
    Derive independent per-trial seeds from a master seed.

    The i-th seed depends only on (master_seed, i), so results can be
    emitted in trial-index order no matter which worker finished first.
    """
    children = np.random.SeedSequence(master_seed).spawn(count)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]


def calibration_seed(master_seed: int) -> int:
    """Master seed for calibration runs, taken from a SeedSequence child no trial uses."""
    child = np.random.SeedSequence(master_seed, spawn_key=(CALIBRATION_SPAWN_KEY,))
    return int(child.generate_state(1, dtype=np.uint64)[0])


def trial_generators(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Split one trial seed into (verifier rng, prover rng) streams."""
    verifier_seq, prover_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(verifier_seq), np.random.default_rng(prover_seq)
