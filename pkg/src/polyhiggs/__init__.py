"""Hyperpolygon spaces, parabolic Higgs bundles on the punctured sphere,
glued approximate harmonic metrics, and the small-R degeneration of the
associated L² metric to 2π times the quiver metric."""

__version__ = "0.1.0"
