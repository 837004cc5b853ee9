"""Statistical audit of Ising-annealer energy samples."""

__version__ = "0.1.0"
