"""Meshfree generalized finite difference operators on 2D point clouds."""

__version__ = "0.1.0"
