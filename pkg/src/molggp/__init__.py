"""Grammar-based genetic programming for molecular property pipelines."""

__version__ = "0.1.0"
