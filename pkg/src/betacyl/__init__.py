"""Certified beta-expansions, cylinder lengths and irregularity diagnostics."""

__version__ = "0.1.0"
