"""Exact continuous dynamic time warping for 1D polygonal curves."""

from ._core import Error, cdtw, cdtw_grid, discrete_frechet, dtw, height, path_integral

__all__ = ["Error", "cdtw", "cdtw_grid", "discrete_frechet", "dtw", "height", "path_integral"]
