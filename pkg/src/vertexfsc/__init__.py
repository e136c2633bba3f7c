"""Numerical workbench for twisted A1(1)/A2(1)/A2(2) vertex models.

Transfer-matrix spectra, fusion and T/Y-system verification, scaling
nonlinear integral equations, Rogers dilogarithm identities, and
finite-size extraction of the conformal combination c - 24*Delta.
"""

__version__ = "0.1.0"
