"""Finite 3-group arithmetic: polycyclic collection, transfer kernel types,
and coclass-tree machinery."""

__version__ = "0.1.0"
