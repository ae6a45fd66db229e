"""Vanishing-viscosity solver and a-priori estimate monitors for diagonal hyperbolic systems."""

__version__ = "0.1.0"
