"""Exact scattering diagrams on the plane above y = -x^2/2 and the invariants they carry."""

__version__ = "0.1.0"
