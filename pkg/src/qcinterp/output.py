"""Deterministic table serialization with atomic writes."""

from __future__ import annotations

import hashlib
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np
import scipy

from . import __version__

FLOAT_FORMAT = ".12g"


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        out = format(v, FLOAT_FORMAT)
        return "0" if out == "-0" else out
    return str(value)


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            return fmt(v)
        return float(fmt(v))
    return value


def config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


@dataclass
class Table:
    command: str
    columns: list
    rows: list = field(default_factory=list)
    metadata: list = field(default_factory=list)

    def add_meta(self, key: str, value):
        self.metadata.append((key, value))

    def header_lines(self, config: dict) -> list:
        lines = [
            ("command", self.command),
            ("config_sha256", config_hash(config)),
            ("versions", f"qcinterp={__version__} numpy={np.__version__} "
                         f"scipy={scipy.__version__} python={sys.version_info.major}.{sys.version_info.minor}"),
        ]
        return lines + [(k, fmt(v)) for k, v in self.metadata]

    def to_csv(self, config: dict) -> str:
        out = [f"# {k}: {v}" for k, v in self.header_lines(config)]
        out.append(",".join(self.columns))
        for row in self.rows:
            cells = [fmt(v) for v in row]
            if any("," in c or "\n" in c for c in cells):
                raise ValueError("CSV cell contains a separator")
            out.append(",".join(cells))
        return "\n".join(out) + "\n"

    def to_json(self, config: dict) -> str:
        doc = {
            "metadata": [[k, v] for k, v in self.header_lines(config)],
            "columns": list(self.columns),
            "rows": [[_json_value(v) for v in row] for row in self.rows],
        }
        return json.dumps(doc, indent=1) + "\n"


def atomic_write(path: str, text: str):
    """Write via a sibling temp file and rename, so readers never see partial output."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
