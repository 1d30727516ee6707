"""Finite-window combinatorics and dynamics for return times, IP-sets and product recurrence."""

__version__ = "0.1.0"
