"""mdst-utils: minimal directed spanning trees, on-line nearest-neighbour graphs and their limit laws."""
