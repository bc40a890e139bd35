"""Solitary waves of the Dirac-Klein-Gordon system in one and three dimensions."""

__version__ = "0.1.0"
