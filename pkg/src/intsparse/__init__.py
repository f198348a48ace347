"""Exact sparse recovery over integral and continuous sets."""
