"""Hyperbolic triangle chains, Dehn twist dynamics and action-angle coordinates on
relative character varieties of punctured spheres into PSL(2, R)."""

__version__ = "0.1.0"
