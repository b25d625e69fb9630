"""CSV ingestion with schema validation for the alebgk output formats."""

from __future__ import annotations

import csv

import numpy as np


class SchemaError(ValueError):
    """A CSV file does not match the expected column schema."""


def read_columns(path, required=(), optional=()):
    """Read a headered CSV into a dict of float columns.

    ``required`` columns must all be present; any column that is neither
    required nor optional is still returned.  Raises :class:`SchemaError`
    naming the offending column when a required one is missing or a cell
    fails to parse as a float.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, no header row")
        rows = [row for row in reader if row]
    header = [h.strip() for h in header]
    for name in required:
        if name not in header:
            raise SchemaError(f"{path}: missing required column {name!r} "
                              f"(found {header})")
    data = np.empty((len(rows), len(header)))
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise SchemaError(f"{path}: row {i + 2} has {len(row)} cells, "
                              f"header has {len(header)}")
        for j, cell in enumerate(row):
            try:
                data[i, j] = float(cell)
            except ValueError:
                raise SchemaError(f"{path}: column {header[j]!r}, row {i + 2}: "
                                  f"cannot parse {cell!r} as a number")
    return {name: data[:, j] for j, name in enumerate(header)}
