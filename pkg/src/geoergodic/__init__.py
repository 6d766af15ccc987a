"""Geodesic-space geometry, convexity moduli and ergodic ray approximation."""
