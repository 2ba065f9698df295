"""starwave: spectral laboratory for a degenerate hyperbolic oscillation system."""

__version__ = "0.1.0"
