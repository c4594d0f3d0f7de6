"""Entanglement witness bounds under imprecise measurements."""

__version__ = "0.1.0"
