import hashlib
import json
import logging
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
HEADER_PREFIX = "# "
SIZE_UNITS = ["Bytes", "KB", "MB", "GB"]

PathLike = Union[str, Path]


def format_bytes(size: int) -> str:
    """Decimal file size for log lines, e.g. 2048 -> '2.0 KB'."""
    for exponent in range(len(SIZE_UNITS) - 1, 0, -1):
        if size >= 1000 ** exponent:
            return f"{size / 1000 ** exponent:.1f} {SIZE_UNITS[exponent]}"
    return f"{size} {SIZE_UNITS[0]}"


def write_table(data: pd.DataFrame, path: PathLike, metadata: Optional[Dict[str, object]] = None) -> Path:
    """
    Writes a report table as CSV behind a '# key = value' metadata header.

    Floats are written with 17 significant digits so reruns of the same scenario produce byte-identical
    files. The metadata must not carry wall-clock values.

    Args:
        data: pandas DataFrame to write
        path: Destination file; parent directories are created
        metadata: Header entries, written in insertion order

    Returns:
        The path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for key, value in (metadata or {}).items():
            fh.write(f"{HEADER_PREFIX}{key} = {value}\n")
        data.to_csv(fh, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("wrote %s (%d rows, %s)", path, len(data), format_bytes(path.stat().st_size))
    return path


def read_table(path: PathLike) -> Tuple[pd.DataFrame, Dict[str, str]]:
    """Reads a table written by write_table; returns (data, metadata) with metadata values as strings."""
    metadata = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith(HEADER_PREFIX):
                break
            key, _, value = line[len(HEADER_PREFIX) :].partition(" = ")
            metadata[key.strip()] = value.rstrip("\n")
    data = pd.read_csv(path, comment="#")
    return data, metadata


def file_sha256(path: PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(manifest: Dict[str, object], path: PathLike) -> Path:
    """Writes the run manifest as indented, key-sorted JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return path


def clip_for_log_axis(data: pd.DataFrame, column: str, floor: float = 0.0) -> pd.DataFrame:
    """
    Prepares a table column for a logarithmic axis.

    Values below floor are raised to it and rows that are still non-positive are dropped, so with the
    default floor of 0 only strictly positive rows survive. A conservation drift that is exactly zero (the
    first record, or a run exact to round-off) stays on the plot when floor is machine epsilon.

    Args:
        data: Table to prepare; it is not modified
        column: Column that goes on the log axis
        floor: Smallest value to keep

    Returns:
        A copy of the table with the column ready for a log axis
    """
    if floor < 0:
        raise ValueError(f"floor must be non-negative, got {floor}")
    data = data.copy()
    data[column] = data[column].clip(lower=floor)
    dropped = int((data[column] <= 0).sum())
    if dropped:
        logger.debug("dropping %d non-positive '%s' rows before the log axis", dropped, column)
    return data[data[column] > 0]
