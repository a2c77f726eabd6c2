"""
Deterministic CSV tables
src/modules/utils/table_writer.py

Floats are written with 17 significant digits so tables round-trip exactly.
"""

from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence, TextIO, Union
import csv
import io
import logging
import math

logger = logging.getLogger(__name__)


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return "%.17g" % value
    if hasattr(value, "item"):
        return format_value(value.item())
    return str(value)


def write_table(rows: Iterable[Dict[str, Any]], columns: Sequence[str],
                out: Optional[Union[str, Path, TextIO]] = None) -> str:
    """
    Write rows as CSV with a header; returns the text.

    `out` may be a path, an open text stream or None (text only).
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    count = 0
    for row in rows:
        writer.writerow([format_value(row[c]) for c in columns])
        count += 1
    text = buffer.getvalue()

    if isinstance(out, (str, Path)):
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        logger.info(f"📁 Wrote {count} rows to {path}")
    elif out is not None:
        out.write(text)
    return text
