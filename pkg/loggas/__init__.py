"""
Finite one-dimensional log-gases: configurations, energies, samplers,
partition functions and the DLR verification harness.
"""

__version__ = "0.3.0"
