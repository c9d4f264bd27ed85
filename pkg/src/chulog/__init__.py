"""Affine logic over Chu constructions and its standard interpretation."""

__version__ = "0.1.0"
