"""Power-law random k-SAT: generation, certificates, single-flip bounds, sweeps."""
__version__ = "0.1.0"
