"""Figure rendering for prefevo sweep exports.

A deliberately small package: read the CSV schema, aggregate replicate
rows into grid cells, draw one of four figure layouts. See
``figures.FigureSpec`` and ``figures.render``.
"""

from .figures import FIGURES, CellStat, FigureSpec, fig3_matrix, group_cells, render
from .records import HEADER, Row, SchemaError, read_rows

__all__ = [
    "CellStat",
    "FIGURES",
    "FigureSpec",
    "HEADER",
    "Row",
    "SchemaError",
    "fig3_matrix",
    "group_cells",
    "read_rows",
    "render",
]
