"""Independent reference computations used by several test modules."""

import numpy as np


def fibonacci_sphere(n):
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    r = np.sqrt(1 - z * z)
    phi = np.pi * (3 - np.sqrt(5)) * i
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def grid_uncertainty_bound(vectors, n=10**6):
    """max over pure qubit states (grid on the Bloch sphere) of sum_j max_b p(b|y_j)."""
    pts = fibonacci_sphere(n)
    total = np.zeros(n)
    for v in vectors:
        total += 0.5 * (1 + np.abs(pts @ np.asarray(v)))
    return total.max()
