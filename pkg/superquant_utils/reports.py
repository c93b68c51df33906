import logging
import os
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

FLOAT_DIGITS = 12


def format_float(x: float) -> str:
    return f"{float(x):.{FLOAT_DIGITS}g}"


def format_value(value) -> str:
    """Report cell text: exact strings for rationals, fixed significant digits for floats."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (Fraction, int, np.integer)):
        return str(value)
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, np.ndarray):
        return ",".join(format_value(v) for v in value.tolist())
    if isinstance(value, (tuple, list)):
        return ",".join(format_value(v) for v in value)
    return str(value)


def to_frame(rows: Sequence[Dict], columns: Optional[Sequence[str]] = None) -> pd.DataFrame:
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    records = [{c: format_value(row.get(c)) for c in columns} for row in rows]
    return pd.DataFrame(records, columns=list(columns), dtype=str)


def render_table(rows: Sequence[Dict], columns: Optional[Sequence[str]] = None) -> str:
    return to_frame(rows, columns).to_csv(sep="\t", index=False, lineterminator="\n")


def write_table(rows: Sequence[Dict], path: str, columns: Optional[Sequence[str]] = None) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    text = render_table(rows, columns)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logging.info(f"Report with {len(rows)} rows written to '{path}'.")
    return path


def key_value_rows(pairs: Sequence) -> List[Dict[str, str]]:
    return [{"key": k, "value": format_value(v)} for k, v in pairs]
