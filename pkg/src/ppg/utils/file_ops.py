"""
File operations utilities for the PPG governance engine.
Handles file I/O, directory management, CSV export and logging setup.

This module provides utility functions for the output side of the package:
canonical JSON files, line-delimited records, CSV tables with a header
comment line, and the standardized logging setup used by every module.
"""

import csv
import json
import logging
import os
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

logger = logging.getLogger(__name__)


def ensure_directory_exists(directory: str) -> bool:
    """Ensure a directory exists, creating it if necessary.

    Args:
        directory: Path to the directory to ensure exists

    Returns:
        True if directory exists or was created successfully, False otherwise
    """
    if not directory:
        return True
    try:
        Path(directory).mkdir(parents=True, exist_ok=True)
        return True
    except OSError as e:
        logger.error(f"Error creating directory {directory}: {e}")
        return False


def save_json_data(data: Any, filepath: str, create_dirs: bool = True) -> bool:
    """Save data to a (human-readable) JSON file with proper error handling.

    Args:
        data: Data to save to the JSON file
        filepath: Path to the JSON file
        create_dirs: Whether to create parent directories if they don't exist

    Returns:
        True if save was successful, False otherwise
    """
    try:
        if create_dirs:
            ensure_directory_exists(os.path.dirname(filepath))

        with open(filepath, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2, sort_keys=True)
        logger.info(f"Data saved to: {filepath}")
        return True
    except (OSError, TypeError) as e:
        logger.error(f"Error saving data to {filepath}: {e}")
        return False


def load_json_data(filepath: str) -> Optional[Any]:
    """Load data from a JSON file with proper error handling.

    Args:
        filepath: Path to the JSON file to load

    Returns:
        The loaded data, or None if loading failed
    """
    try:
        with open(filepath, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        logger.warning(f"File not found: {filepath}")
        return None
    except json.JSONDecodeError as e:
        logger.error(f"Invalid JSON in {filepath}: {e}")
        return None


def write_lines(lines: Iterable[bytes], filepath: str, create_dirs: bool = True) -> int:
    """Write newline-terminated byte records to a file.

    Returns:
        Number of records written
    """
    if create_dirs:
        ensure_directory_exists(os.path.dirname(filepath))
    count = 0
    with open(filepath, "wb") as f:
        for line in lines:
            f.write(line)
            f.write(b"\n")
            count += 1
    logger.info(f"{count} records written to: {filepath}")
    return count


def write_csv(
    rows: Sequence[Dict[str, Any]],
    filepath: str,
    fieldnames: List[str],
    header_comment: Optional[str] = None,
) -> bool:
    """Save rows to a CSV file, optionally preceded by a ``#`` comment line.

    Args:
        rows: Row dictionaries keyed by field name
        filepath: Target CSV path
        fieldnames: Column order
        header_comment: Text for the leading comment line (without the ``#``)

    Returns:
        True if save was successful, False otherwise
    """
    try:
        ensure_directory_exists(os.path.dirname(filepath))
        with open(filepath, "w", newline="", encoding="utf-8") as csvfile:
            if header_comment is not None:
                csvfile.write(f"# {header_comment}\n")
            writer = csv.DictWriter(csvfile, fieldnames=fieldnames, lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow(row)
        logger.info(f"Table saved to CSV: {filepath}")
        return True
    except OSError as e:
        logger.error(f"Error saving CSV {filepath}: {e}")
        return False


def generate_timestamped_filename(prefix: str, extension: str = ".json") -> str:
    """Generate a timestamped filename for ad-hoc exports."""
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    return f"{prefix}_{timestamp}{extension}"


def get_data_directory(subdirectory: str = "") -> str:
    """Get the full path to a data subdirectory.

    ``PPG_OUTPUT_DIR`` overrides the default ``data`` directory at the
    project root.

    Args:
        subdirectory: Subdirectory within the data directory (optional)

    Returns:
        Full path to the data subdirectory
    """
    base = os.getenv("PPG_OUTPUT_DIR")
    if base:
        root = Path(base)
    else:
        # src/ppg/utils -> project root
        root = Path(__file__).parent.parent.parent.parent / "data"
    if subdirectory:
        return str(root / subdirectory)
    return str(root)


def setup_logging(name: str, level: str = "INFO") -> logging.Logger:
    """Set up standardized logging for a module.

    A console handler is always attached; a dated file handler is added
    when ``PPG_LOG_DIR`` names a log directory.

    Args:
        name: Logger name (typically __name__)
        level: Logging level (default: "INFO")

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)

    # Prevent adding multiple handlers
    if not logger.handlers:
        formatter = logging.Formatter(
            "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
        )

        console_handler = logging.StreamHandler()
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

        logs_dir = os.getenv("PPG_LOG_DIR")
        if logs_dir:
            os.makedirs(logs_dir, exist_ok=True)
            log_file = os.path.join(
                logs_dir, f"{name.lower()}_{datetime.now().strftime('%Y%m%d')}.log"
            )
            file_handler = logging.FileHandler(log_file)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)

    return logger


def set_log_level(level: str, prefixes: Sequence[str] = ("ppg", "cli")) -> List[str]:
    """Apply ``level`` to every existing logger under the given name prefixes.

    Module loggers are created with their own level by ``setup_logging``, so
    changing the root logger alone does not reach them.

    Returns:
        Names of the loggers that were updated
    """
    updated = []
    for name, candidate in list(logging.root.manager.loggerDict.items()):
        if not isinstance(candidate, logging.Logger):
            continue
        if any(name == p or name.startswith(p + ".") for p in prefixes):
            candidate.setLevel(level)
            updated.append(name)
    return sorted(updated)
