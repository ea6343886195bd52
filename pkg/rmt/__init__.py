# rmt/__init__.py
"""Desk-scale random-matrix toolkit: Hermite kernels, GUE/HSE correlations, sine-kernel checks."""

__version__ = "1.0.0"
