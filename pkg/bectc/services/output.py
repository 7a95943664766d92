import io
import json
import logging
import math
import os
import sys
import tempfile
from typing import Any, List, Optional, Tuple

import numpy as np
import pandas as pd

from bectc.config import settings
from bectc.exceptions import ConfigError
from bectc.models import Column, SweepTable
from bectc.utils import format_number

logger = logging.getLogger(__name__)

OVERLAY_TOLERANCE = 1e-9
OVERLAY_KEY = "overlay_key"
_HEADER_PATTERN = r"^\s*(?P<name>[^\[\]]+?)\s*(?:\[(?P<unit>[^\]]*)\])?\s*$"


class TableWriter:
    """Renders sweep tables as CSV or JSON and writes them out"""

    def __init__(self, significant_digits: Optional[int] = None):
        self.digits = significant_digits or settings.SIGNIFICANT_DIGITS

    def render(self, table: SweepTable, fmt: str = "csv") -> str:
        if fmt == "csv":
            return self.to_csv(table)
        if fmt == "json":
            return self.to_json(table)
        raise ConfigError(f"Unsupported output format: {fmt}")

    @staticmethod
    def to_frame(table: SweepTable) -> pd.DataFrame:
        # adding 0.0 turns -0.0 into 0.0
        return pd.DataFrame(table.rows, columns=table.headers, dtype=float) + 0.0

    def to_csv(self, table: SweepTable) -> str:
        """Provenance lines starting with '#', a name[unit] header row, then one line per row"""
        buffer = io.StringIO()
        for key in sorted(table.metadata):
            buffer.write(f"# {key}={self._metadata_text(table.metadata[key])}\n")
        self.to_frame(table).to_csv(
            buffer,
            index=False,
            float_format=f"%.{self.digits}g",
            na_rep="nan",
            lineterminator="\n",
        )
        return buffer.getvalue()

    def to_json(self, table: SweepTable) -> str:
        document = {
            "metadata": table.metadata,
            "columns": [column.model_dump() for column in table.columns],
            "rows": [[None if math.isnan(value) else value for value in row] for row in table.rows],
        }
        return json.dumps(document, indent=2) + "\n"

    def emit(self, text: str, out: Optional[str] = None):
        """Write to stdout, or replace the file at out in one step"""
        if not out:
            sys.stdout.write(text)
            sys.stdout.flush()
            return

        directory = os.path.dirname(os.path.abspath(out))
        try:
            handle, temp_path = tempfile.mkstemp(dir=directory, prefix=".bectc-", suffix=".tmp")
            with os.fdopen(handle, "w", encoding="utf-8", newline="") as f:
                f.write(text)
            os.replace(temp_path, out)
        except OSError as e:
            raise ConfigError(f"cannot write output file {out}: {str(e)}")
        logger.info(f"Wrote {len(text)} bytes to {out}")

    def load_overlay(self, path: str) -> Tuple[List[Column], pd.DataFrame]:
        """Read a reference-curve CSV, sorted by its first column; '#' lines are comments"""
        try:
            frame = pd.read_csv(path, comment="#", skipinitialspace=True)
        except OSError as e:
            raise ConfigError(f"cannot read overlay file {path}: {str(e)}")
        except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
            raise ConfigError(f"bad overlay file {path}: {str(e)}")

        if frame.shape[1] < 2:
            raise ConfigError(f"overlay file {path} needs a key column plus at least one value column")
        if frame.empty:
            raise ConfigError(f"overlay file {path} needs a header row and at least one data row")

        parts = frame.columns.to_series().astype(str).str.extract(_HEADER_PATTERN)
        if parts["name"].isna().any():
            bad = frame.columns[parts["name"].isna().to_numpy()][0]
            raise ConfigError(f"bad overlay column header '{bad}' in {path}")
        columns = [
            Column(name=name, unit=unit if isinstance(unit, str) and unit else "1")
            for name, unit in zip(parts["name"], parts["unit"])
        ]

        try:
            frame = frame.apply(pd.to_numeric).astype(float)
        except (ValueError, TypeError) as e:
            raise ConfigError(f"non-numeric value in overlay file {path}: {str(e)}")
        if frame.isna().to_numpy().any():
            raise ConfigError(f"overlay file {path} has missing values")

        frame.columns = [OVERLAY_KEY] + [f"overlay_{c.name}" for c in columns[1:]]
        return columns, frame.sort_values(OVERLAY_KEY, kind="stable").reset_index(drop=True)

    def merge_overlay(self, table: SweepTable, path: str, tolerance: float = OVERLAY_TOLERANCE) -> SweepTable:
        """Append overlay columns, joined on the first column by nearest key within a relative tolerance"""
        columns, overlay = self.load_overlay(path)
        frame = self.to_frame(table)
        key = frame.columns[0]
        values = list(overlay.columns[1:])

        scale = max(1.0, float(frame[key].abs().max())) if len(frame) else 1.0
        merged = pd.merge_asof(
            frame,
            overlay,
            left_on=key,
            right_on=OVERLAY_KEY,
            direction="nearest",
            tolerance=tolerance * scale,
        )
        # the asof tolerance is absolute; tighten it to tolerance * max(1, |key|) per row
        distance = (merged[OVERLAY_KEY] - merged[key]).abs()
        miss = ~(distance <= tolerance * merged[key].abs().clip(lower=1.0))
        merged.loc[miss, values] = np.nan

        logger.info(f"Overlay {path}: matched {int((~miss).sum())} of {len(frame)} rows")
        rows = list(merged[list(frame.columns) + values].itertuples(index=False, name=None))
        merged_columns = table.columns + [Column(name=f"overlay_{c.name}", unit=c.unit) for c in columns[1:]]
        metadata = {**table.metadata, "overlay": os.path.basename(path)}
        return SweepTable(columns=merged_columns, rows=rows, metadata=metadata)

    def _metadata_text(self, value: Any) -> str:
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, float):
            return format_number(value, self.digits)
        if isinstance(value, (dict, list, tuple)):
            return json.dumps(value, sort_keys=True)
        return str(value)
