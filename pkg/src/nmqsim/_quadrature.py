"""Panel-based quadrature for oscillatory improper frequency integrals.

Used for the time-domain kernel transforms of spectra that have no closed
form (finite temperature, impedance-derived, tabulated). Integrands look
like f(w)*cos(w*tau) or f(w)*sin(w*tau) on [0, inf) with f >= 0 decaying.

Strategy: march Gauss-Legendre panels whose width resolves the local
oscillation (width <= pi/(4*tau)). Absolutely convergent tails terminate
on their own; slowly decaying oscillatory tails are summed as an
alternating series of half-period panels accelerated by repeated
averaging (Euler transformation).
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import NumericalError

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)

ABS_TOL = 1e-10
REL_TOL = 1e-8


def _panel(f: Callable, trig: Callable, tau: float, a: float, b: float) -> float:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    w = mid + half * _GL_X
    return half * float(np.sum(_GL_W * f(w) * trig(w * tau)))


def _euler_tail(f, trig, tau, start, n_pairs=24, levels=6):
    """Sum half-period panels from `start` with repeated averaging."""
    width = np.pi / tau
    partial = np.empty(n_pairs)
    acc = 0.0
    for k in range(n_pairs):
        acc += _panel(f, trig, tau, start + k * width, start + (k + 1) * width)
        partial[k] = acc
    s = partial.copy()
    for _ in range(levels):
        if len(s) < 2:
            break
        s = 0.5 * (s[1:] + s[:-1])
    est = s[-1]
    err = abs(s[-1] - s[-2]) if len(s) >= 2 else abs(est)
    return est, err


def _singular_head(f, trig, tau, b, exponent):
    """int_0^b f(w) trig(w tau) dw when f ~ w^-exponent at the origin.

    Substituting v = w^(1-exponent) restores a smooth integrand.
    """
    p = 1.0 - exponent
    vmax = b**p
    v = 0.5 * (_GL_X + 1.0) * vmax
    w = v ** (1.0 / p)
    g = f(w) * w**exponent * trig(w * tau)
    return 0.5 * vmax / p * float(np.sum(_GL_W * g))


def fourier_semiinfinite(
    f: Callable,
    tau: float,
    kind: str,
    scale: float,
    *,
    upper: float | None = None,
    lower: float = 0.0,
    singular_exponent: float = 0.0,
    abs_tol: float = ABS_TOL,
    rel_tol: float = REL_TOL,
    max_panels: int = 20000,
) -> tuple[float, float]:
    """Integrate f(w)*cos(w*tau) (kind='cos') or *sin (kind='sin') over w.

    `scale` is the characteristic decay/variation scale of f in frequency.
    `upper` truncates the integral (finite support); None means infinite.
    `lower` starts the integration above 0 (infrared cutoff), and
    `singular_exponent` = a > 0 declares an integrable f ~ w^-a origin
    singularity, absorbed by a power substitution on the first panel.
    Returns (value, error_estimate); raises NumericalError when the panel
    budget is exhausted before the tail settles.
    """
    trig = np.cos if kind == "cos" else np.sin
    tau = float(tau)
    osc_cap = np.pi / (4.0 * tau) if tau > 0 else np.inf

    def panel_width(x: float) -> float:
        # grow with distance once past the spectral bulk, capped so each
        # panel sees at most an eighth of an oscillation
        return min(osc_cap, max(scale / 8.0, x / 8.0))

    acc = 0.0
    x = float(lower)
    if singular_exponent > 0.0 and lower == 0.0:
        w0 = min(panel_width(0.0), upper if upper is not None else np.inf)
        acc = _singular_head(f, trig, tau, w0, singular_exponent)
        x = w0
    quiet = 0
    hard_upper = np.inf if upper is None else float(upper)
    n = 0
    last = np.inf
    while n < max_panels:
        if x >= hard_upper:
            return acc, last if np.isfinite(last) else 0.0
        b = min(x + panel_width(x), hard_upper)
        p = _panel(f, trig, tau, x, b)
        acc += p
        x = b
        n += 1
        last = abs(p)
        tol = abs_tol + rel_tol * abs(acc)
        quiet = quiet + 1 if last < tol else 0
        if quiet >= 4 and x > 4.0 * scale:
            return acc, last
        # Once the oscillation cap binds and several periods have passed,
        # sum the remaining alternating half-period panels with averaging.
        if tau > 0 and x > 8.0 * scale and x * tau > 4.0 * np.pi:
            tail, terr = _euler_tail(f, trig, tau, x)
            return acc + tail, terr
    raise NumericalError(
        f"oscillatory quadrature did not settle after {max_panels} panels",
        estimate=last,
    )
