"""Read-only plotting scripts for alebgk CSV outputs.

Four figure kinds, one console script each:

- ``plot-field-1d``: line plots of rho, ux, T versus x from a 1D snapshot.
- ``plot-field-2d``: temperature field plus velocity vectors from a 2D
  snapshot, with optional body outlines.
- ``plot-convergence``: log-log L1 error versus dx with the least-squares
  slope annotated.
- ``plot-trajectory``: body position and velocity versus time, with an
  optional equilibrium reference line.

The scripts never recompute physics; they consume the CSV schemas written
by the ``alebgk`` command line and nothing else.
"""

__all__ = ["read_columns", "SchemaError"]

from plotscripts.io import SchemaError, read_columns
