"""Finite open topological groupoids, their equivariant sheaves and sites."""

__version__ = "0.1.0"
