"""Barycentric and Fraenkel asymmetry of shapes in R^N, reflection symmetrization and verification of the bounded-set barycentric isoperimetric inequality."""
