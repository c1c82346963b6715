"""Operational reality of remote measurement disturbance for two-qubit states."""

__version__ = "0.1.0"
