"""Photon-scattering induced relative-position localisation of two particles."""
__version__ = "0.1.0"
