"""Tests for CSV/JSON output."""
import csv
import json

import numpy as np
import pytest

from mdst_utils.errors import InvalidParameterError
from mdst_utils.geometry import PointCloud, sample_binomial_cloud
from mdst_utils.graphs import build_mdst
from mdst_utils.reporting import format_rows, write_graph_csv, write_plot_series, write_points_csv


class TestFormatRows:
    """Tests for format_rows."""

    def test_csv(self):
        """Rows render as CSV with a header."""
        text = format_rows([{'n': 100.0, 'mean': 0.5}, {'n': 200.0, 'mean': 0.25}])
        assert text == 'n,mean\n100.0,0.5\n200.0,0.25\n'

    def test_column_order_and_missing_values(self):
        """Explicit columns set the order; missing values are blank."""
        text = format_rows([{'a': 1, 'b': None}], columns=['b', 'a', 'c'])
        assert text.splitlines() == ['b,a,c', ',1,']

    def test_json_round_trip(self):
        """numpy scalars serialise and NaN becomes null."""
        rows = [{'name': 'lln', 'value': np.float64(0.5), 'count': np.int64(3), 'bad': float('nan')}]
        parsed = json.loads(format_rows(rows, fmt='json'))
        assert parsed == [{'name': 'lln', 'value': 0.5, 'count': 3, 'bad': None}]

    def test_empty(self):
        """No rows is an empty JSON list."""
        assert format_rows([], fmt='json') == '[]\n'

    def test_unknown_format(self):
        """An unknown format is rejected."""
        with pytest.raises(InvalidParameterError):
            format_rows([], fmt='xml')


class TestWriters:
    """Tests for the file writers."""

    def test_points(self, tmp_path):
        """Point dumps carry dimension, seed and intensity."""
        cloud = sample_binomial_cloud(5, 3, seed=2)
        path = write_points_csv(tmp_path / 'points.csv', cloud)
        with open(path, newline='') as f:
            rows = list(csv.reader(f))
        assert rows[0] == ['dim', 'seed', 'intensity', 'x1', 'x2', 'x3']
        assert len(rows) == 6
        assert rows[1][:3] == ['3', '2', '5.0']
        assert [float(x) for x in rows[1][3:]] == cloud.coords[0].tolist()

    def test_points_without_provenance(self, tmp_path):
        """A hand-built cloud leaves seed and intensity blank."""
        path = write_points_csv(tmp_path / 'points.csv', PointCloud.from_points([(0.1, 0.2)]))
        assert path.read_text().splitlines()[1] == '2,,,0.1,0.2'

    def test_graph(self, tmp_path):
        """Graph dumps list source, target and length."""
        graph = build_mdst(PointCloud.from_points([(0.5, 0.1), (0.2, 0.5), (0.9, 0.6)]))
        path = write_graph_csv(tmp_path / 'graph.csv', graph)
        lines = path.read_text().splitlines()
        assert lines[0] == 'source,target,length'
        assert [line.split(',')[:2] for line in lines[1:]] == [['1', '0'], ['2', '0']]

    def test_plot_series(self, tmp_path):
        """Plot series are written long-form."""
        path = write_plot_series(tmp_path / 'plot.csv', {'mean': [(100.0, 0.5), (1000.0, 0.6)]})
        assert path.read_text().splitlines() == ['series,x,y', 'mean,100.0,0.5', 'mean,1000.0,0.6']
