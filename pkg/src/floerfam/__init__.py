"""Exact arithmetic engine for flux-decorated A-infinity categories and their families."""

__version__ = "0.1.0"
