"""Computation services: canonical form, paths, risk, inference, export and rendering."""
