"""Exact deformation quantization of semisimple coadjoint orbits of sl(n)."""

__version__ = "0.1.0"
