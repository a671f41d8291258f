"""Semiclassical trace formulas for the spherical power-law potential V(r) = r**alpha.

Modules
-------
classical
    Tori, periodic orbits, curvatures and scaling.
specfun
    Complex error function with two limits, incomplete Airy/Gairy integrals,
    the cubic catastrophe integral.
traces
    Orbit amplitudes and the oscillating level density.
quantum
    Radial spectra, coarse-grained and Strutinsky-smoothed densities, Fourier
    transforms.
cli
    ``rplscl`` command line.
"""
__version__ = "0.1.0"

from .classical import PotentialConfig, PoLabel, Family  # noqa: E402,F401
