"""
CSV and JSON output for result tables, point clouds, graphs and plot series.
"""

import csv
import io
import json
import math
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from mdst_utils.errors import InvalidParameterError
from mdst_utils.geometry import PointCloud
from mdst_utils.graphs import DirectedGraph

CSV = 'csv'
JSON = 'json'
FORMATS = (CSV, JSON)


def _clean(value):
    # numpy scalars and non-finite floats are not JSON-serialisable as-is
    if hasattr(value, 'item'):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def format_rows(rows: Iterable[Dict], columns: Optional[Sequence[str]] = None, fmt: str = CSV) -> str:
    """
    Render rows as CSV (header plus one line per row) or as a JSON list of objects.

    Columns default to the keys of the first row, in order.
    """
    if fmt not in FORMATS:
        raise InvalidParameterError(f"Unknown output format '{fmt}', expected one of {FORMATS}")
    rows = [{k: _clean(v) for k, v in row.items()} for row in rows]
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    if fmt == JSON:
        return json.dumps([{c: row.get(c) for c in columns} for row in rows], indent=2) + '\n'
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow(['' if row.get(c) is None else row.get(c) for c in columns])
    return buffer.getvalue()


def write_points_csv(path, cloud: PointCloud) -> Path:
    """One point per row under the header dim,seed,intensity,x1..xd."""
    path = Path(path)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['dim', 'seed', 'intensity'] + [f'x{k + 1}' for k in range(cloud.dim)])
        seed = '' if cloud.seed is None else cloud.seed
        intensity = '' if cloud.intensity is None else cloud.intensity
        for point in cloud.coords.tolist():
            writer.writerow([cloud.dim, seed, intensity] + point)
    return path


def write_graph_csv(path, graph: DirectedGraph) -> Path:
    """One edge per row under the header source,target,length."""
    path = Path(path)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['source', 'target', 'length'])
        for edge in graph.edges:
            writer.writerow([edge.source, edge.target, edge.length])
    return path


def write_plot_series(path, series: Dict[str, List[Tuple[float, float]]]) -> Path:
    """x/y series as rows series,x,y, for plotting elsewhere."""
    path = Path(path)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['series', 'x', 'y'])
        for name, points in series.items():
            for x, y in points:
                writer.writerow([name, _clean(x), _clean(y)])
    return path
