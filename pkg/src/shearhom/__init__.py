"""Effective antiplane shear speed of 2D periodic composites."""
