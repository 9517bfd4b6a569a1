#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Sequence

import numpy as np

from ..version import __software__, __version__

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.11e"
INT_FORMAT = "%d"


def config_hash(payload: Mapping[str, Any], seed: int | None = None) -> str:
    """SHA-256 of the canonical JSON form of `payload` and `seed`, truncated to 16 hex digits."""
    canonical = json.dumps({"config": payload, "seed": seed}, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def write_csv(path: Path | str, columns: Sequence[str], rows: Iterable[Sequence[Any]],
              header: Dict[str, Any] | None = None, int_columns: Iterable[str] = ()) -> int:
    """
    Write a result table as CSV.

    Header lines start with ``#``: tool version, the `header` items (experiment name,
    config hash ...) and finally the column names. Floats are written in scientific
    notation with 12 significant digits; `int_columns` (and booleans) as integers.

    :param path: destination file, parent directories are created.
    :param columns: column names in output order.
    :param rows: table rows, one value per column.
    :param header: extra ``key: value`` header lines.
    :param int_columns: names of the integer valued columns.
    :return: number of data rows written.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table = np.asarray([[float(value) for value in row] for row in rows], dtype=float)
    if table.size == 0:
        table = np.zeros((0, len(columns)))
    if table.shape[1] != len(columns):
        raise ValueError(f"{path.name}: {table.shape[1]} values per row for {len(columns)} columns")
    int_set = set(int_columns)
    fmt: List[str] = [INT_FORMAT if name in int_set else FLOAT_FORMAT for name in columns]

    lines = [f"{__software__} {__version__}"]
    for key, value in (header or {}).items():
        lines.append(f"{key}: {value}")
    lines.append(",".join(columns))
    np.savetxt(path, table, fmt=fmt, delimiter=",", header="\n".join(lines), comments="# ", encoding="utf-8")
    logger.info("wrote %s (%d rows)", path, table.shape[0])
    return int(table.shape[0])


def read_csv(path: Path | str) -> np.ndarray:
    return np.atleast_2d(np.loadtxt(path, delimiter=",", comments="#", encoding="utf-8"))
