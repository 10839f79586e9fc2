"""Derivative-free scalar maximization used by the fitters and solvers."""

import numpy as np

INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f, lo, hi, iters=60):
    """Maximize a unimodal ``f`` on ``[lo, hi]`` by golden-section search.

    ``lo`` and ``hi`` may be arrays, in which case ``f`` must evaluate
    element-wise and every interval is searched in lock step.  A fixed number
    of iterations keeps the result independent of how problems are batched.
    Returns ``(x, f(x))``.
    """
    a = np.array(lo, dtype=float)
    b = np.array(hi, dtype=float)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc = f(c)
    fd = f(d)
    for _ in range(iters):
        left = fc >= fd
        # keep [a, d] where the left probe wins, else [c, b]; one new probe each
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        probe = np.where(left, b - INV_PHI * (b - a), a + INV_PHI * (b - a))
        fp = f(probe)
        c, d, fc, fd = (
            np.where(left, probe, d),
            np.where(left, c, probe),
            np.where(left, fp, fd),
            np.where(left, fc, fp),
        )
    x = np.where(fc >= fd, c, d)
    fx = np.maximum(fc, fd)
    if x.ndim == 0:
        return float(x), float(fx)
    return x, fx
