"""Favourite sites of simple symmetric random walk: local-time simulation,
branching-profile representation, exact oracles and audits."""

__version__ = "0.1.0"
