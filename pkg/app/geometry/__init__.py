"""Torus geometry, separated sets, the random coloring and its adversaries."""
