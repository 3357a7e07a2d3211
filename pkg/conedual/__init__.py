"""Certified primal-dual brackets for sign-support and positive-definite extremal problems."""

__version__ = "1.0.0"
