"""Exact tropical curve counts in E x P^1: pearl chains, Feynman integrals,
cover enumeration and quasimodular decompositions."""

__version__ = "0.1.0"
