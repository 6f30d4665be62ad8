"""Exact computations in the type A Hecke category: Rouquier complexes,
Hochschild homology and triply graded tables, and the duality checks."""

__version__ = "0.1.0"
