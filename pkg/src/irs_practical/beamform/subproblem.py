"""Single-element phase subproblem and its three solvers.

With every other element held fixed, the objective depends on element ``n``
only through

    f(theta) = beta(theta)**2 * psi_nn + beta(theta) * |phi_n| * cos(arg(phi_n) - theta)

All solvers broadcast over arrays of ``(psi_nn, phi_n)`` so that many
independent subproblems (one per Monte Carlo trial) are solved at once.
"""

from __future__ import annotations

import math

import numpy as np

from ..angles import TWO_PI, wrap_phase
from ..phase_model import PhaseShiftModel
from ..search import golden_section_max
from .algebra import QuadraticTerms

GOLDEN_ITERS = 20


def element_phi(qt: QuadraticTerms, v: np.ndarray, n: int) -> complex:
    """Coupling term of element ``n`` to the rest of the surface and the direct path.

    Equals ``2 * (sum_{m != n} psi[n, m] v[m] + h_hat[n])``; the factor two
    applies to the whole bracket because the cross terms of the quadratic form
    appear once as ``conj(v_n) psi_nm v_m`` and once conjugated.
    """
    N = qt.psi.shape[0]
    if not -N <= n < N:
        raise IndexError(f"element index {n} out of range for N={N}")
    v = np.asarray(v, dtype=complex)
    row = qt.psi[n]
    coupling = row @ v - row[n] * v[n]
    return complex(2.0 * (coupling + qt.h_hat[n]))


def element_objective(theta, psi_nn, phi_n, model: PhaseShiftModel):
    """The theta-dependent part of the objective for one element."""
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    shifted = s * math.cos(model.phi) - c * math.sin(model.phi)   # sin(theta - phi)
    base = np.maximum((shifted + 1.0) * 0.5, 0.0)
    beta = (1.0 - model.beta_min) * base**model.k + model.beta_min
    # |phi| cos(arg(phi) - theta) == Re(phi) cos(theta) + Im(phi) sin(theta)
    align = np.real(phi_n) * c + np.imag(phi_n) * s
    out = beta * beta * np.real(psi_nn) + beta * align
    return float(out) if out.ndim == 0 else out


def trust_region(arg_phi):
    """Interval between ``arg(phi_n)`` and the nearer of +pi / -pi.

    Returns ``(lo, hi)`` with ``lo <= hi``; ``+pi`` is used as an endpoint
    when ``arg_phi >= 0`` and ``-pi`` otherwise.
    """
    a = np.asarray(arg_phi, dtype=float)
    c = np.where(a >= 0.0, np.pi, -np.pi)
    lo, hi = np.minimum(a, c), np.maximum(a, c)
    if lo.ndim == 0:
        return float(lo), float(hi)
    return lo, hi


def _arg(phi_n):
    return wrap_phase(np.angle(phi_n))


def solve_element_quadratic(psi_nn, phi_n, model: PhaseShiftModel):
    """Three-point quadratic interpolation over the trust region.

    Samples ``f`` at ``arg(phi_n)``, the midpoint, and the far endpoint
    ``+-pi``, and returns the parabola's stationary point clamped to the
    region.  When the parabola opens upward, is flat, or its vertex scores
    worse than the best sample, the best sample is returned instead.
    """
    a = np.asarray(_arg(phi_n), dtype=float)
    c = np.where(a >= 0.0, np.pi, -np.pi)
    b = 0.5 * (a + c)
    f1 = element_objective(a, psi_nn, phi_n, model)
    f2 = element_objective(b, psi_nn, phi_n, model)
    f3 = element_objective(c, psi_nn, phi_n, model)
    f1, f2, f3 = np.asarray(f1), np.asarray(f2), np.asarray(f3)

    curv = f1 - 2.0 * f2 + f3
    scale = np.abs(f1) + np.abs(f2) + np.abs(f3)
    flat = np.abs(curv) <= 1e-14 * scale
    safe = np.where(flat, 1.0, curv)
    vertex = (c * (3 * f1 - 4 * f2 + f3) + a * (f1 - 4 * f2 + 3 * f3)) / (4.0 * safe)
    vertex = np.clip(vertex, np.minimum(a, c), np.maximum(a, c))
    f_vertex = np.asarray(element_objective(vertex, psi_nn, phi_n, model))

    samples = np.stack([a, b, c])
    values = np.stack([f1, f2, f3])
    best = np.argmax(values, axis=0)
    best_theta = np.take_along_axis(samples, best[None], axis=0)[0]
    best_f = np.take_along_axis(values, best[None], axis=0)[0]

    use_vertex = ~flat & (f_vertex >= best_f)
    return wrap_phase(np.where(use_vertex, vertex, best_theta))


def _screen_objective(theta, psi_nn, phi_n, model: PhaseShiftModel):
    """Single-precision objective with ``psi_nn``/``phi_n`` pre-normalized.

    Written with in-place updates; this is the hot loop of the grid search.
    """
    f32 = np.float32
    x = theta.astype(f32)
    c = np.cos(x)
    s = np.sin(x, out=x)
    # base = (sin(theta - phi) + 1) / 2
    base = s * f32(0.5 * math.cos(model.phi))
    base -= c * f32(0.5 * math.sin(model.phi))
    base += f32(0.5)
    np.maximum(base, f32(0.0), out=base)
    np.power(base, f32(model.k), out=base)
    beta = base
    beta *= f32(1.0 - model.beta_min)
    beta += f32(model.beta_min)
    c *= np.real(phi_n).astype(f32)
    s *= np.imag(phi_n).astype(f32)
    c += s
    c += beta * np.real(psi_nn).astype(f32)
    c *= beta
    return c


# float32 screening error stays far below this (normalized units)
_SCREEN_TOL = 1e-5
_WINDOW = 48


def _grid_argmax(lo, hi, t, psi_nn, phi_n, model, block=64):
    """Exact float64 argmax of ``f`` over the grids ``lo + (hi - lo) * t``.

    Rows are screened in single precision; the run of grid points that come
    within the screening tolerance of the row maximum is re-scored in double
    precision.  Rows where that run is too long are re-scored in full.
    Work is done in row blocks that stay in cache.
    """
    n, G = len(lo), len(t)
    idx = np.empty(n, dtype=np.intp)
    best = np.empty(n)
    scale = np.abs(psi_nn) + np.abs(phi_n)
    scale = np.where(scale > 0, scale, 1.0)
    psi_s, phi_s = psi_nn / scale, phi_n / scale
    for start in range(0, n, block):
        sl = slice(start, start + block)
        width = hi[sl] - lo[sl]
        grid = lo[sl, None] + width[:, None] * t
        screen = _screen_objective(grid, psi_s[sl, None], phi_s[sl, None], model)
        peak = screen.max(axis=1)
        near = screen >= (peak - np.float32(_SCREEN_TOL))[:, None]
        first = np.argmax(near, axis=1)
        last = G - 1 - np.argmax(near[:, ::-1], axis=1)
        full = last - first >= _WINDOW
        start_w = np.minimum(first, G - _WINDOW) if G >= _WINDOW else np.zeros_like(first)
        win = np.minimum(start_w[:, None] + np.arange(min(_WINDOW, G)), G - 1)
        rows = np.arange(len(first))

        theta_w = lo[sl, None] + width[:, None] * t[win]
        vals = element_objective(theta_w, psi_nn[sl, None], phi_n[sl, None], model)
        k = np.argmax(vals, axis=1)
        i = win[rows, k]
        b = vals[rows, k]
        for r in np.flatnonzero(full):
            row_vals = element_objective(grid[r], psi_nn[start + r], phi_n[start + r], model)
            i[r] = np.argmax(row_vals)
            b[r] = row_vals[i[r]]
        idx[sl] = i
        best[sl] = b
    return idx, best


def solve_element_1d(psi_nn, phi_n, model: PhaseShiftModel, grid_points: int = 1000,
                     full_circle: bool = False):
    """Grid search over the trust region, polished by golden section.

    The golden-section pass runs between the neighbours of the best grid
    point and is kept only if it improves on that grid point.
    """
    if grid_points < 3:
        raise ValueError("grid_points must be at least 3")
    shape = np.shape(phi_n)
    psi_nn = np.real(np.asarray(psi_nn, dtype=complex)).reshape(-1)
    phi_n = np.asarray(phi_n, dtype=complex).reshape(-1)
    psi_nn = np.broadcast_to(psi_nn, phi_n.shape)
    if full_circle:
        lo = np.full(phi_n.shape, -np.pi)
        hi = np.full(phi_n.shape, np.pi)
    else:
        lo, hi = trust_region(_arg(phi_n))
        lo, hi = np.atleast_1d(lo), np.atleast_1d(hi)
    t = np.linspace(0.0, 1.0, grid_points)
    i, best_f = _grid_argmax(lo, hi, t, psi_nn, phi_n, model)
    width = hi - lo
    best_theta = lo + width * t[i]
    left = lo + width * t[np.maximum(i - 1, 0)]
    right = lo + width * t[np.minimum(i + 1, grid_points - 1)]

    x, fx = golden_section_max(
        lambda th: element_objective(th, psi_nn, phi_n, model), left, right, iters=GOLDEN_ITERS
    )
    out = wrap_phase(np.where(fx > best_f, x, best_theta))
    return float(out[0]) if shape == () else out.reshape(shape)


def discrete_levels(bits: int) -> np.ndarray:
    """The ``2**bits`` equally spaced phase levels, wrapped into [-pi, pi)."""
    if bits < 1:
        raise ValueError("bits must be at least 1")
    K = 2**bits
    return wrap_phase(TWO_PI * np.arange(K) / K)


def solve_element_discrete(psi_nn, phi_n, model: PhaseShiftModel, bits: int):
    """Exhaustive search over the discrete phase levels."""
    levels = discrete_levels(bits)
    beta = model.beta(levels)
    bc = beta * np.cos(levels)
    bs = beta * np.sin(levels)
    psi_nn = np.real(np.asarray(psi_nn))[..., None]
    phi_n = np.asarray(phi_n)[..., None]
    vals = beta * beta * psi_nn + np.real(phi_n) * bc + np.imag(phi_n) * bs
    best = levels[np.argmax(vals, axis=-1)]
    return float(best) if np.ndim(best) == 0 else best


def solve_element_ideal(phi_n):
    """Unit-amplitude optimum: align the element phase with ``phi_n``."""
    return _arg(phi_n)
