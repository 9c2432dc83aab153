"""Minimal resolutions and Ext computations over sub-Hopf algebras of the mod 2 Steenrod algebra."""

from __future__ import annotations

__version__ = "0.1.0"
