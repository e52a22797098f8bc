"""Simulation and design tools for fiber-integrated quantum-dot single-photon sources."""

__version__ = "0.1.0"
