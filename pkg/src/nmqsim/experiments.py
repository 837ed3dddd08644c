"""Observable signatures: Pauli expectation traces, precession spectra, and
the Ramsey X/Y probability difference.

Rotation conventions (ideal, instantaneous pulses):
    R_y(pi/2)|0>  = (|0> + |1>)/sqrt(2)
    R_x(-pi/2)|0> = (|0> + i|1>)/sqrt(2)
The Ramsey difference compares return probabilities after Y-up/Y-down and
X-down/X-up sequences separated by an idle delay under the dynamical map.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import DomainError, GridError
from .propagator import QubitState, Trajectory, apply_map

_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class ExperimentResult:
    """A named data series with its full parameter echo."""

    kind: str                     # trace | spectrum | ramsey
    abscissa: np.ndarray
    values: dict[str, np.ndarray]
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if np.any(np.diff(self.abscissa) <= 0):
            raise GridError("abscissa must be strictly increasing")


def sigma_expectations(
    traj: Trajectory, rho0: QubitState
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """<sigma_x>, <sigma_y>, <sigma_z> along the trajectory.

    The off-diagonal element evolves as
    rho_01(t) = e^{i phi - Gamma/2} (x+ rho_01(0) + x- rho_10(0)), so
    sx = 2 Re rho_01, sy = -2 Im rho_01, and the population difference
    relaxes as sz = Z + e^{-Gamma} sz(0).
    """
    r01 = rho0.matrix[0, 1]
    r10 = rho0.matrix[1, 0]
    sz0 = float(rho0.matrix[0, 0].real - rho0.matrix[1, 1].real)
    env = np.exp(1j * traj.phase - 0.5 * traj.decay)
    coher = env * (traj.x_plus * r01 + traj.x_minus * r10)
    sx = 2.0 * coher.real
    sy = -2.0 * coher.imag
    sz = traj.relax + np.exp(-traj.decay) * sz0
    return sx, sy, sz


def precession_spectrum(
    t: np.ndarray,
    trace: np.ndarray,
    *,
    omega_q: float = 1.0,
    window: str = "hann",
    zero_pad: int = 8,
    min_periods: float = 20.0,
) -> tuple[np.ndarray, np.ndarray]:
    """One-sided magnitude spectrum of a precession trace.

    Returns (omega/omega_q, |FFT|). Requires a uniform grid covering at
    least `min_periods` precession periods. A Hann window (default)
    suppresses onset leakage; `window='none'` keeps the raw transform.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(trace, dtype=float)
    if t.ndim != 1 or t.shape != y.shape or len(t) < 2:
        raise GridError("time grid and trace must be matching 1-d arrays")
    dt = np.diff(t)
    if np.any(dt <= 0) or not np.allclose(dt, dt[0], rtol=1e-9, atol=0.0):
        raise GridError("spectrum requires a uniform time grid")
    span = t[-1] - t[0]
    if span < min_periods * 2.0 * np.pi / omega_q:
        raise GridError(
            f"record covers {span * omega_q / (2 * np.pi):.1f} precession periods"
            f" (< {min_periods})"
        )
    if window == "hann":
        w = np.hanning(len(y))
    elif window == "none":
        w = np.ones_like(y)
    else:
        raise DomainError(f"unknown window {window!r}")
    if zero_pad < 1:
        raise DomainError("zero_pad must be >= 1")
    n = len(y) * int(zero_pad)
    mag = np.abs(np.fft.rfft(y * w, n))
    omega = 2.0 * np.pi * np.fft.rfftfreq(n, dt[0])
    return omega / omega_q, mag


def ramsey_delta_p(traj: Trajectory, t_d) -> np.ndarray | float:
    """Probability difference p(0|YY) - p(0|XX) at delay(s) t_d.

    Closed form from the map: e^{-Gamma/2} (cos(phi) Re x- - sin(phi) Im x-),
    evaluated by interpolation on the trajectory grid. Identically zero in
    secular (Markovian) mode.
    """
    td = np.asarray(t_d, dtype=float)
    scalar = td.ndim == 0
    td = np.atleast_1d(td)
    if np.any(td < 0) or np.any(td > traj.t[-1] * (1 + 1e-12)):
        raise DomainError("delay time outside the trajectory range")
    gam = np.interp(td, traj.t, traj.decay)
    phi = np.interp(td, traj.t, traj.phase)
    xr = np.interp(td, traj.t, traj.x_minus.real)
    xi = np.interp(td, traj.t, traj.x_minus.imag)
    dp = np.exp(-0.5 * gam) * (np.cos(phi) * xr - np.sin(phi) * xi)
    return float(dp[0]) if scalar else dp


def _rot_y(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rot_x(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _traj_index(traj: Trajectory, t_d: float) -> int:
    i = int(np.argmin(np.abs(traj.t - t_d)))
    if abs(traj.t[i] - t_d) > 1e-9 * max(1.0, abs(t_d)):
        raise DomainError("t_d must coincide with a trajectory grid point")
    return i


def ramsey_protocol_direct(traj: Trajectory, axis: str, t_d: float) -> float:
    """Return probability of |0> from the explicit pulse/idle/pulse sequence.

    axis='Y': rotate by +pi/2 about Y, idle for t_d, rotate by -pi/2.
    axis='X': rotate by -pi/2 about X, idle for t_d, rotate by +pi/2.
    """
    if axis not in ("X", "Y"):
        raise DomainError("axis must be 'X' or 'Y'")
    i = _traj_index(traj, t_d)
    ps = traj.state_at(i)
    if axis == "Y":
        u_in, u_out = _rot_y(np.pi / 2.0), _rot_y(-np.pi / 2.0)
    else:
        u_in, u_out = _rot_x(-np.pi / 2.0), _rot_x(np.pi / 2.0)
    ket0 = np.array([1.0, 0.0], dtype=complex)
    rho = np.outer(u_in @ ket0, (u_in @ ket0).conj())
    evolved = apply_map(ps.choi, QubitState(rho))
    back = u_out @ evolved.matrix @ u_out.conj().T
    return float(back[0, 0].real)
