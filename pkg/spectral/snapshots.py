"""
Field snapshot files: a one-line header followed by the samples as CSV.
"""
import io
import os
import re
import tempfile
from pathlib import Path

import numpy as np

from mixlog_lab.conf import mixlog_setting

from .fields import ScalarField
from .grid import GridError, make_grid

HEADER_RE = re.compile(
    r'^mixlog-field v(?P<version>\d+) d=(?P<d>\d+) kind=(?P<kind>\w+) '
    r'N=(?P<N>\d+) R=(?P<R>[^\s]+)$'
)
VERSION = 1


class SnapshotFormatError(ValueError):
    """Raised when a snapshot file does not match the expected format."""


def atomic_write_text(path, text):
    """Write through a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f'.{path.name}.', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', newline='') as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def snapshot_header(grid):
    r = 0 if grid.R is None else repr(grid.R)
    return f"mixlog-field v{VERSION} d={grid.d} kind={grid.kind} N={grid.N} R={r}"


def format_snapshot(field):
    digits = mixlog_setting('CSV_DIGITS')
    buffer = io.StringIO()
    buffer.write(snapshot_header(field.grid) + '\n')
    rows = field.values.reshape(1, -1) if field.grid.d == 1 else field.values
    np.savetxt(buffer, rows, fmt=f'%.{digits}g', delimiter=',')
    return buffer.getvalue()


def write_snapshot(path, field):
    return atomic_write_text(path, format_snapshot(field))


def parse_snapshot(text, kind=None):
    lines = text.splitlines()
    if not lines:
        raise SnapshotFormatError("Empty snapshot")
    match = HEADER_RE.match(lines[0].strip())
    if not match:
        raise SnapshotFormatError(f"Malformed snapshot header: {lines[0]!r}")
    if int(match['version']) != VERSION:
        raise SnapshotFormatError(f"Unsupported snapshot version v{match['version']}")
    if kind is not None and match['kind'] != kind:
        raise SnapshotFormatError(f"Expected a {kind} snapshot, found {match['kind']}")
    R = float(match['R'])
    try:
        grid = make_grid(int(match['d']), match['kind'], int(match['N']), R if R else None)
    except GridError as exc:
        raise SnapshotFormatError(f"Invalid grid in header: {exc}") from exc
    try:
        values = np.loadtxt(io.StringIO('\n'.join(lines[1:])), delimiter=',', ndmin=1)
    except ValueError as exc:
        raise SnapshotFormatError(f"Unreadable samples: {exc}") from exc
    if values.size != grid.size:
        raise SnapshotFormatError(f"Expected {grid.size} samples, found {values.size}")
    return ScalarField(grid, values)


def read_snapshot(path, kind=None):
    return parse_snapshot(Path(path).read_text(), kind=kind)
