"""First-passage percolation on Poisson-Delaunay triangulations."""

__version__ = "0.1.0"
