"""Adaptive Dormand-Prince 5(4) integration of the augmented coherence system.

State vector (9 reals):

    y = [Re x+, Im x+, Re x-, Im x-, Gamma, Z, F+, F-, Phi]

where Gamma is the integrated decay exponent, Z the relaxation function
(integrated in damped form Z' = kappa(g+ - g-) - Gamma' Z), F+- are the
damped coherence-condition integrals F = e^(-Gamma) f so that
f_pm = e^(Gamma) F_pm, and Phi accumulates the Lamb shift for the phase
phi(t) = wq t + kappa Phi(t).

Rates are read from a uniform table by cubic 4-point interpolation (C^1),
which keeps the high-order error estimator from rejecting steps at table
nodes. Steps are clipped to land exactly on requested output times, and
the coherence normalization |x+|^2 - |x-|^2 - 1 is re-checked after every
accepted step.

The whole stepper is numba-jittable and runs unchanged as plain Python
when NMQ_DISABLE_NUMBA is set (see _jit).
"""
from __future__ import annotations

import numpy as np

from ._jit import njit

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 0.2, 0.3, 0.8, 8.0 / 9.0
_A21 = 0.2
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
# solution minus embedded 4th-order weights
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

OK = 0
STEP_UNDERFLOW = 1


@njit(inline="always")
def _rhs(s, y, dy, kappa, wq, cp, cm, cl, t0, h, n_int, secular):
    # natural-spline coefficient tables: row i holds descending powers of
    # (s - t_i) on the i-th interval of the uniform rate grid
    i = int((s - t0) / h)
    if i < 0:
        i = 0
    if i > n_int - 1:
        i = n_int - 1
    u = s - (t0 + i * h)
    gpv = ((cp[i, 0] * u + cp[i, 1]) * u + cp[i, 2]) * u + cp[i, 3]
    gmv = ((cm[i, 0] * u + cm[i, 1]) * u + cm[i, 2]) * u + cm[i, 3]
    wlv = ((cl[i, 0] * u + cl[i, 1]) * u + cl[i, 2]) * u + cl[i, 3]
    gsum = gpv + gmv
    dgamma = kappa * gsum
    if secular:
        dy[0] = 0.0
        dy[1] = 0.0
        dy[2] = 0.0
        dy[3] = 0.0
    else:
        phi = wq * s + kappa * y[8]
        cr = -0.5 * kappa * gsum
        ci = -kappa * wlv
        co = np.cos(2.0 * phi)
        si = np.sin(2.0 * phi)
        # (cr + i ci) * e^{-2 i phi}
        kr = cr * co + ci * si
        ki = ci * co - cr * si
        # dx+ = coef * conj(x-);  dx- = coef * conj(x+)
        dy[0] = kr * y[2] + ki * y[3]
        dy[1] = ki * y[2] - kr * y[3]
        dy[2] = kr * y[0] + ki * y[1]
        dy[3] = ki * y[0] - kr * y[1]
    dy[4] = dgamma
    dy[5] = kappa * (gpv - gmv) - dgamma * y[5]
    dy[6] = kappa * gpv - dgamma * y[6]
    dy[7] = kappa * gmv - dgamma * y[7]
    dy[8] = wlv


@njit
def integrate_coherence(
    t_eval,
    kappa,
    wq,
    cp,
    cm,
    cl,
    tbl_t0,
    tbl_h,
    rtol,
    atol,
    max_step,
    secular,
):
    """Integrate from t=0 (identity initial data), recording at t_eval.

    cp/cm/cl are (n_intervals, 4) natural-spline coefficient tables for the
    two rates and the Lamb shift. Returns (Y, drift, status): Y has shape
    (len(t_eval), 9); drift is the largest | |x+|^2 - |x-|^2 - 1 | seen at
    accepted steps; status is OK or STEP_UNDERFLOW.
    """
    n_int = cp.shape[0]
    n_out = len(t_eval)
    Y = np.zeros((n_out, 9))
    y = np.zeros(9)
    y[0] = 1.0
    t = 0.0
    drift = 0.0

    k1 = np.empty(9)
    k2 = np.empty(9)
    k3 = np.empty(9)
    k4 = np.empty(9)
    k5 = np.empty(9)
    k6 = np.empty(9)
    k7 = np.empty(9)
    ytmp = np.empty(9)
    ynew = np.empty(9)

    i_out = 0
    if t_eval[0] == 0.0:
        for j in range(9):
            Y[0, j] = y[j]
        i_out = 1
    t_end = t_eval[n_out - 1]

    _rhs(t, y, k1, kappa, wq, cp, cm, cl, tbl_t0, tbl_h, n_int, secular)
    h = min(max_step, 1e-3)
    status = OK

    while t < t_end:
        # clip to the next output time and the horizon
        t_next_out = t_eval[i_out] if i_out < n_out else t_end
        if h > max_step:
            h = max_step
        hit_out = False
        if t + h >= t_next_out - 1e-14 * max(1.0, abs(t_next_out)):
            h = t_next_out - t
            hit_out = True
        if h < 1e-14 * max(1.0, abs(t)):
            status = STEP_UNDERFLOW
            break

        # stages
        for j in range(9):
            ytmp[j] = y[j] + h * _A21 * k1[j]
        _rhs(t + _C2 * h, ytmp, k2, kappa, wq, cp, cm, cl, tbl_t0, tbl_h, n_int, secular)
        for j in range(9):
            ytmp[j] = y[j] + h * (_A31 * k1[j] + _A32 * k2[j])
        _rhs(t + _C3 * h, ytmp, k3, kappa, wq, cp, cm, cl, tbl_t0, tbl_h, n_int, secular)
        for j in range(9):
            ytmp[j] = y[j] + h * (_A41 * k1[j] + _A42 * k2[j] + _A43 * k3[j])
        _rhs(t + _C4 * h, ytmp, k4, kappa, wq, cp, cm, cl, tbl_t0, tbl_h, n_int, secular)
        for j in range(9):
            ytmp[j] = y[j] + h * (_A51 * k1[j] + _A52 * k2[j] + _A53 * k3[j] + _A54 * k4[j])
        _rhs(t + _C5 * h, ytmp, k5, kappa, wq, cp, cm, cl, tbl_t0, tbl_h, n_int, secular)
        for j in range(9):
            ytmp[j] = y[j] + h * (
                _A61 * k1[j] + _A62 * k2[j] + _A63 * k3[j] + _A64 * k4[j] + _A65 * k5[j]
            )
        _rhs(t + h, ytmp, k6, kappa, wq, cp, cm, cl, tbl_t0, tbl_h, n_int, secular)
        for j in range(9):
            ynew[j] = y[j] + h * (
                _B1 * k1[j] + _B3 * k3[j] + _B4 * k4[j] + _B5 * k5[j] + _B6 * k6[j]
            )
        _rhs(t + h, ynew, k7, kappa, wq, cp, cm, cl, tbl_t0, tbl_h, n_int, secular)

        # embedded error estimate
        err = 0.0
        for j in range(9):
            e = h * (
                _E1 * k1[j] + _E3 * k3[j] + _E4 * k4[j] + _E5 * k5[j] + _E6 * k6[j] + _E7 * k7[j]
            )
            ay = abs(y[j])
            an = abs(ynew[j])
            sc = atol + rtol * (ay if ay > an else an)
            q = e / sc
            err += q * q
        err = np.sqrt(err / 9.0)

        if err <= 1.0:
            t = t + h
            for j in range(9):
                y[j] = ynew[j]
                k1[j] = k7[j]  # FSAL
            d = abs(y[0] * y[0] + y[1] * y[1] - y[2] * y[2] - y[3] * y[3] - 1.0)
            if d > drift:
                drift = d
            if hit_out:
                for j in range(9):
                    Y[i_out, j] = y[j]
                i_out += 1
        # step-size controller
        if err == 0.0:
            fac = 5.0
        else:
            fac = 0.9 * err ** (-0.2)
            if fac < 0.2:
                fac = 0.2
            if fac > 5.0:
                fac = 5.0
        h = h * fac
        if h > max_step:
            h = max_step

    return Y, drift, status
