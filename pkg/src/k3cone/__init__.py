"""Exact verification of lattice, cone and dynamics computations on Hilbert schemes of K3 surfaces."""

__version__ = "0.1.0"
