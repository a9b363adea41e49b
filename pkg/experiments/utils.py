"""
Plot-ready exports: the diagnostics series CSV, JSON documents and small
result tables. Every file is written atomically.
"""
import csv
import io
import json
import math
import re
from functools import lru_cache
from pathlib import Path

import numpy as np
from rest_framework.utils.encoders import JSONEncoder

from mixlog_lab.conf import mixlog_setting
from spectral.snapshots import atomic_write_text

SCHEMA_PATH = Path(__file__).resolve().parent / 'schemas' / 'series.json'


class SeriesFormatError(ValueError):
    """Raised when a series file does not follow the shipped schema."""


@lru_cache(maxsize=1)
def series_schema():
    return json.loads(SCHEMA_PATH.read_text())


def format_float(value):
    if value is None:
        return ''
    value = float(value)
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return f"{value:.{mixlog_setting('CSV_DIGITS')}g}"


def parse_float(text):
    text = text.strip()
    if text == '':
        return None
    return float(text)


def sobolev_column(s):
    """hminus1 for s = 1, hplus0.5 for s = -0.5: one column per signed order."""
    s = float(s)
    return f"hminus{s:g}" if s > 0 else f"hplus{-s:g}"


def series_columns(s_values=(1.0,), positive_s=(), dvdt_gap=False):
    columns = ['t', 'l2', 'v', 'w']
    columns += [sobolev_column(s) for s in s_values]
    columns += [sobolev_column(-s) for s in positive_s]
    columns += ['eps_geom', 'cum_grad_p']
    if dvdt_gap:
        columns.append('dvdt_gap')
    return columns


def check_columns(columns):
    schema = series_schema()['columns']
    required = [c['name'] for c in schema if c.get('required')]
    names = {c['name'] for c in schema if 'name' in c}
    patterns = [re.compile(c['pattern']) for c in schema if 'pattern' in c]
    missing = [name for name in required if name not in columns]
    if missing:
        raise SeriesFormatError(f"Series is missing column(s) {missing}")
    for column in columns:
        if column not in names and not any(p.match(column) for p in patterns):
            raise SeriesFormatError(f"Unknown series column {column!r}")
    if len(set(columns)) != len(columns):
        raise SeriesFormatError("Duplicate series columns")


def format_table(columns, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([row.get(c) if isinstance(row.get(c), str) else format_float(row.get(c))
                         for c in columns])
    return buffer.getvalue()


def write_table(path, columns, rows):
    return atomic_write_text(path, format_table(columns, rows))


def write_series(path, records, columns):
    check_columns(columns)
    return write_table(path, columns, records)


def read_table(path, check=None):
    """Rows of floats (None for empty cells) keyed by column name."""
    reader = csv.reader(io.StringIO(Path(path).read_text()))
    try:
        columns = next(reader)
    except StopIteration:
        raise SeriesFormatError(f"{path} is empty") from None
    if check is not None:
        check(columns)
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(columns):
            raise SeriesFormatError(f"{path}:{lineno}: expected {len(columns)} cells, got {len(row)}")
        try:
            rows.append({c: parse_float(cell) for c, cell in zip(columns, row)})
        except ValueError as exc:
            raise SeriesFormatError(f"{path}:{lineno}: {exc}") from exc
    return columns, rows


def read_series(path):
    return read_table(path, check_columns)


def json_safe(value):
    """Non-finite floats become the strings 'inf'/'-inf' and NaN becomes null."""
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if isinstance(value, np.ndarray):
        return json_safe(value.tolist())
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, Path):
        return str(value)
    return value


def dumps(data):
    return json.dumps(json_safe(data), cls=JSONEncoder, indent=2, sort_keys=True) + '\n'


def write_json(path, data):
    return atomic_write_text(path, dumps(data))


def least_squares_slope(times, values):
    """Slope of the least-squares line, None with fewer than two points."""
    if len(times) < 2:
        return None
    slope, _ = np.polyfit(np.asarray(times, dtype=float), np.asarray(values, dtype=float), 1)
    return float(slope)
