"""Exact curvature analysis of semi-Riemannian metrics."""
