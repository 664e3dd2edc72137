"""High-precision reference computations, independent of the QR path.

Sums run over the nonzero cells of each design row, which keeps the
50-digit arithmetic affordable for dummy-heavy designs.
"""
import mpmath as mp
import numpy as np

mp.mp.dps = 50


def _rows(X):
    return [[(j, mp.mpf(float(x))) for j, x in enumerate(row) if x != 0] for row in X]


def _cross(rows, k, weights=None):
    out = mp.matrix(k, k)
    for i, row in enumerate(rows):
        w = 1 if weights is None else weights[i]
        for a, xa in row:
            xa = xa * w
            for b, xb in row:
                out[a, b] += xa * xb
    return out


def normal_equations(X, y):
    """Solve X'X b = X'y in 50-digit arithmetic."""
    k = X.shape[1]
    rows = _rows(X)
    xty = mp.matrix(k, 1)
    for row, yi in zip(rows, y):
        for a, xa in row:
            xty[a] += xa * mp.mpf(float(yi))
    b = mp.lu_solve(_cross(rows, k), xty)
    return np.array([float(v) for v in b])


def sandwich(X, e, variant="hc1"):
    """inv(X'X) X' diag(w e^2) X inv(X'X), composed directly in 50-digit arithmetic."""
    n, k = X.shape
    rows = _rows(X)
    bread = mp.inverse(_cross(rows, k))
    e = [mp.mpf(float(v)) for v in e]
    if variant == "hc3":
        for i, row in enumerate(rows):
            h = mp.fsum(xa * bread[a, b] * xb for a, xa in row for b, xb in row)
            e[i] = e[i] / (1 - h)
    V = bread * _cross(rows, k, [v * v for v in e]) * bread
    if variant == "hc1":
        V = V * mp.mpf(n) / (n - k)
    return np.array([[float(V[i, j]) for j in range(k)] for i in range(k)])
