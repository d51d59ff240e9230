"""Shared numerical plumbing: error types and 1-D optimization.

All scans in the package use the same fixed recipe (coarse grid, then
golden-section refinement) so that repeated runs are bit-reproducible.
"""

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class ConvergenceError(RuntimeError):
    """A quadrature, propagation or optimization step failed to converge."""


def golden_section_min(f, a, b, tol=1e-10):
    """Minimize a unimodal scalar function on [a, b] by golden-section search.

    Returns (x, f(x)) with the bracket narrowed below ``tol``.
    """
    if not b > a:
        raise ValueError(f"invalid bracket [{a}, {b}]")
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return x, f(x)
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c = b - INV_PHI * h
    d = a + INV_PHI * h
    fc, fd = f(c), f(d)
    for _ in range(n):
        if fc < fd:
            b, d, fd = d, c, fc
            h = INV_PHI * h
            c = b - INV_PHI * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = INV_PHI * h
            d = a + INV_PHI * h
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def grid_golden_min(f, lo, hi, n_grid=256, tol=1e-10):
    """Coarse grid scan followed by golden-section refinement.

    The grid stage locates the basin; golden section then resolves the
    minimizer to ``tol``. The grid size is a fixed constant so results
    are deterministic.
    """
    xs = np.linspace(lo, hi, n_grid)
    vals = np.array([f(x) for x in xs])
    if not np.all(np.isfinite(vals)):
        raise ConvergenceError("non-finite objective values on the search grid")
    i = int(np.argmin(vals))
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, n_grid - 1)]
    if b <= a:
        return xs[i], float(vals[i])
    return golden_section_min(f, a, b, tol=tol)


def grid_golden_max(f, lo, hi, n_grid=256, tol=1e-10):
    """Maximize by negating ``grid_golden_min``."""
    x, v = grid_golden_min(lambda t: -f(t), lo, hi, n_grid=n_grid, tol=tol)
    return x, -v
