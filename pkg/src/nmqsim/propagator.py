"""Dynamical map of the qubit: decay/relaxation/phase functions, coherence
functions, the Choi matrix, and complete-positivity certificates.

Basis convention: |0> is the sigma_z = +1 eigenstate and the ground state
of H = -(wq/2) sigma_z. With that choice the noiseless limit gives
rho_01(t) = e^{i wq t} rho_01(0), i.e. <sigma_x(t)> = cos(wq t) for
rho_01(0) = 1/2.

The Choi matrix indexes operator pairs (j1, j2) in the order
(0,0), (0,1), (1,0), (1,1):

        [ (1+Z+E)/2      0          0       x+ P ]
    C = [    0       (1+Z-E)/2    x- P        0  ]     E = e^{-Gamma},
        [    0        x-* P*    (1-Z-E)/2     0  ]     P = e^{i phi - Gamma/2}
        [  x+* P*        0          0    (1-Z+E)/2 ]

The trajectory integrator accumulates Gamma, Z, f_pm and the phase
alongside the coherence ODE in one adaptive pass (shared step control).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _ode
from .errors import DomainError, NumericalError, StiffnessError
from .rates import RateTable

_GAMMA_EXP_CAP = 700.0  # e^Gamma guard; the map is numerically dead far earlier

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class QubitState:
    """2x2 density matrix in the computational basis.

    Hermiticity and unit trace are enforced at construction (1e-12);
    positivity is queried through `psd_violation` / `validate` so that
    states produced by an (approximate) non-CP map remain inspectable.
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (2, 2):
            raise DomainError("qubit state must be a 2x2 matrix")
        if np.abs(m - m.conj().T).max() > 1e-12:
            raise DomainError("qubit state must be Hermitian (tol 1e-12)")
        if abs(np.trace(m).real - 1.0) > 1e-12 or abs(np.trace(m).imag) > 1e-12:
            raise DomainError("qubit state must have unit trace (tol 1e-12)")
        self.matrix = m

    @classmethod
    def from_bloch(cls, x: float, y: float, z: float) -> "QubitState":
        r = np.sqrt(x * x + y * y + z * z)
        if r > 1.0 + 1e-12:
            raise DomainError("Bloch vector must have length <= 1")
        m = 0.5 * (np.eye(2) + x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z)
        return cls(m)

    @property
    def bloch(self) -> tuple[float, float, float]:
        m = self.matrix
        return (
            float(np.trace(SIGMA_X @ m).real),
            float(np.trace(SIGMA_Y @ m).real),
            float(np.trace(SIGMA_Z @ m).real),
        )

    def psd_violation(self) -> float:
        """How far below zero the smallest eigenvalue sits (0 when PSD)."""
        return max(0.0, -float(np.linalg.eigvalsh(self.matrix)[0]))

    def validate(self, psd_tol: float = 1e-10) -> None:
        if self.psd_violation() > psd_tol:
            raise DomainError(
                f"state is not positive semidefinite (violation {self.psd_violation():.3e})"
            )

    def __repr__(self):
        x, y, z = self.bloch
        return f"QubitState(bloch=({x:.6g}, {y:.6g}, {z:.6g}))"


@dataclass(frozen=True)
class PropagatorState:
    """Map data at a single time: decay exponent, relaxation, phase,
    coherence functions, and the assembled Choi matrix."""

    t: float
    decay: float        # Gamma(t)
    relax: float        # Z(t)
    phase: float        # phi(t)
    x_plus: complex
    x_minus: complex
    choi: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class CPReport:
    """Complete-positivity certificate at one time."""

    lambdas: tuple[float, float, float, float]
    necessary_ok: bool
    sufficient_ok: bool
    necessary_margin: float   # Gamma
    sufficient_margin: float  # e^-Gamma f+ f- - |x-|^2


# -- table-based integral functions ---------------------------------------
#
# These integrate the same cubic 4-point interpolant the trajectory ODE
# reads, so standalone values and trajectory values agree to solver
# accuracy on any table (and exactly for constant rates).

_GLQ_X, _GLQ_W = np.polynomial.legendre.leggauss(8)


def _check_range(rt: RateTable, t: float) -> None:
    if t < 0 or t > rt.t_max * (1 + 1e-12):
        raise DomainError(f"t={t} outside rate table range [0, {rt.t_max}]")


def _spline_integral(coeffs: np.ndarray, h: float, t: float) -> float:
    """Integral from 0 to t of a natural-spline column.

    `coeffs` is the (n-1, 4) array of descending powers of (s - t_i).
    """
    if t <= 0.0:
        return 0.0
    n_int = coeffs.shape[0]
    full = min(int(np.floor(t / h + 1e-12)), n_int)
    c = coeffs[:full]
    acc = float(
        np.sum(c[:, 0]) * h**4 / 4.0
        + np.sum(c[:, 1]) * h**3 / 3.0
        + np.sum(c[:, 2]) * h**2 / 2.0
        + np.sum(c[:, 3]) * h
    )
    rem = t - full * h
    if rem > 0 and full < n_int:
        c0, c1, c2, c3 = coeffs[full]
        acc += c0 * rem**4 / 4.0 + c1 * rem**3 / 3.0 + c2 * rem**2 / 2.0 + c3 * rem
    return acc


def decay_function(rt: RateTable, kappa: float, t: float) -> float:
    """Gamma(t) = kappa * integral of (gamma_plus + gamma_minus)."""
    _check_range(rt, t)
    cp, cm, _ = rt.spline_coeffs()
    return kappa * _spline_integral(cp + cm, rt.step, t)


def relaxation_function(rt: RateTable, kappa: float, t: float) -> float:
    """Z(t) = kappa e^{-Gamma(t)} int_0^t e^{Gamma(s)} (g+ - g-) ds.

    Gauss-Legendre panels per table interval on the splined rates, with
    Gamma(s) evaluated from the running quartic antiderivative.
    """
    _check_range(rt, t)
    if t == 0.0:
        return 0.0
    h = rt.step
    cp, cm, _ = rt.spline_coeffs()
    cs = cp + cm
    cd = cp - cm
    n_int = cs.shape[0]
    gamma0 = 0.0  # Gamma at the left edge of the current interval
    acc = 0.0
    for i in range(n_int):
        left = i * h
        if left >= t:
            break
        w_max = min(t - left, h)
        c0, c1, c2, c3 = cs[i]
        d0, d1, d2, d3 = cd[i]
        # sub-panels keep the Gamma increment per Gauss panel modest
        dgam = kappa * abs(c0 * h**4 / 4 + c1 * h**3 / 3 + c2 * h**2 / 2 + c3 * h)
        m = max(1, int(np.ceil(dgam / 0.5)))
        edges = np.linspace(0.0, w_max, m + 1)
        for a, b in zip(edges[:-1], edges[1:]):
            u = a + 0.5 * (b - a) * (_GLQ_X + 1.0)
            w = 0.5 * (b - a) * _GLQ_W
            gam = gamma0 + kappa * (
                c0 * u**4 / 4.0 + c1 * u**3 / 3.0 + c2 * u**2 / 2.0 + c3 * u
            )
            gd = ((d0 * u + d1) * u + d2) * u + d3
            acc += float(np.sum(w * np.exp(gam) * gd)) * kappa
        gamma0 += kappa * (c0 * h**4 / 4.0 + c1 * h**3 / 3.0 + c2 * h**2 / 2.0 + c3 * h)
    gam_t = decay_function(rt, kappa, t)
    return float(np.exp(-gam_t) * acc)


def phase_function(rt: RateTable, kappa: float, omega_q: float, t: float) -> float:
    """phi(t) = omega_q t + kappa * integral of the Lamb shift."""
    _check_range(rt, t)
    _, _, cl = rt.spline_coeffs()
    return omega_q * t + kappa * _spline_integral(cl, rt.step, t)


# -- trajectory integration ---------------------------------------------


@dataclass(frozen=True)
class Trajectory:
    """Solution of the coherence system plus accumulated map functions,
    sampled on the requested grid."""

    t: np.ndarray
    x_plus: np.ndarray
    x_minus: np.ndarray
    decay: np.ndarray
    relax: np.ndarray
    phase: np.ndarray
    f_plus: np.ndarray
    f_minus: np.ndarray
    omega_q: float
    kappa: float
    secular: bool
    conservation_drift: float

    def __len__(self):
        return len(self.t)

    def state_at(self, i: int) -> PropagatorState:
        ch = choi_from_functions(
            self.decay[i], self.relax[i], self.phase[i], self.x_plus[i], self.x_minus[i]
        )
        return PropagatorState(
            t=float(self.t[i]),
            decay=float(self.decay[i]),
            relax=float(self.relax[i]),
            phase=float(self.phase[i]),
            x_plus=complex(self.x_plus[i]),
            x_minus=complex(self.x_minus[i]),
            choi=ch,
        )

    def cp_report_at(self, i: int, tol: float = 1e-10) -> CPReport:
        return cp_certificate(
            self.state_at(i), float(self.f_plus[i]), float(self.f_minus[i]), tol=tol
        )


def solve_coherence(
    rt: RateTable,
    kappa: float,
    omega_q: float,
    t_grid,
    *,
    secular: bool = False,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    conservation_tol: float | None = 1e-6,
) -> Trajectory:
    """Integrate the coherence system with the augmented map functions.

    x_pm obey dx_pm/dt = kappa(-i lamb - (g+ + g-)/2) e^{-2i phi} conj(x_mp)
    from x+(0)=1, x-(0)=0. The adaptive stepper is capped at pi/(8 wq) so
    the e^{-2i phi} oscillation is always resolved; `secular=True` freezes
    the coefficient to zero (x+ = 1, x- = 0 exactly).
    """
    t_eval = np.asarray(t_grid, dtype=float)
    if t_eval.ndim != 1 or len(t_eval) < 1 or np.any(np.diff(t_eval) <= 0):
        raise DomainError("t_grid must be increasing")
    if t_eval[0] < 0:
        raise DomainError("t_grid must start at or after 0")
    if t_eval[-1] > rt.t_max * (1 + 1e-12):
        raise DomainError("t_grid extends beyond the rate table")
    max_step = np.pi / (8.0 * omega_q)
    cp, cm, cl = rt.spline_coeffs()
    Y, drift, status = _ode.integrate_coherence(
        t_eval,
        float(kappa),
        float(omega_q),
        cp,
        cm,
        cl,
        0.0,
        rt.step,
        float(rtol),
        float(atol),
        float(max_step),
        bool(secular),
    )
    if status == _ode.STEP_UNDERFLOW:
        raise StiffnessError("step size underflow in coherence integration")
    if conservation_tol is not None and drift > conservation_tol:
        raise NumericalError(
            f"|x+|^2 - |x-|^2 drifted by {drift:.3e} (tol {conservation_tol:.0e})",
            estimate=drift,
        )
    gamma = Y[:, 4]
    egamma = np.exp(np.minimum(gamma, _GAMMA_EXP_CAP))
    return Trajectory(
        t=t_eval,
        x_plus=Y[:, 0] + 1j * Y[:, 1],
        x_minus=Y[:, 2] + 1j * Y[:, 3],
        decay=gamma.copy(),
        relax=Y[:, 5].copy(),
        phase=omega_q * t_eval + kappa * Y[:, 8],
        f_plus=egamma * Y[:, 6],
        f_minus=egamma * Y[:, 7],
        omega_q=float(omega_q),
        kappa=float(kappa),
        secular=bool(secular),
        conservation_drift=float(drift),
    )


def constant_rate_table(
    gamma_plus: float,
    gamma_minus: float,
    lamb: float,
    omega_q: float,
    t_max: float,
    kappa: float = 1.0,
) -> RateTable:
    """Table of frozen rates (Markovian limits or a memoryless bath)."""
    t = np.linspace(0.0, t_max, 5)
    ones = np.ones_like(t)
    return RateTable(
        t=t,
        gamma_plus=gamma_plus * ones,
        gamma_minus=gamma_minus * ones,
        lamb=lamb * ones,
        omega_q=omega_q,
        kappa=kappa,
    )


# -- Choi matrix and the map ---------------------------------------------


def choi_from_functions(
    decay: float, relax: float, phase: float, x_plus: complex, x_minus: complex
) -> np.ndarray:
    """Assemble the 4x4 Choi matrix from the map functions."""
    E = np.exp(-decay)
    P = np.exp(1j * phase - 0.5 * decay)
    Z = relax
    c = np.zeros((4, 4), dtype=complex)
    c[0, 0] = 0.5 * (1.0 + Z + E)
    c[1, 1] = 0.5 * (1.0 + Z - E)
    c[2, 2] = 0.5 * (1.0 - Z - E)
    c[3, 3] = 0.5 * (1.0 - Z + E)
    c[0, 3] = x_plus * P
    c[3, 0] = np.conj(c[0, 3])
    c[1, 2] = x_minus * P
    c[2, 1] = np.conj(c[1, 2])
    return c


def choi_matrix(ps: PropagatorState) -> np.ndarray:
    """The Choi matrix of a propagator state (already assembled)."""
    return ps.choi


def apply_map(choi: np.ndarray, rho0: QubitState) -> QubitState:
    """Propagate a state: rho(t) = sum_ab C_ab tau_a rho(0) tau_b^dagger
    with tau_(j1,j2) = |j1><j2|."""
    c4 = np.asarray(choi, dtype=complex).reshape(2, 2, 2, 2)
    out = np.einsum("abcd,bd->ac", c4, rho0.matrix)
    # symmetrize away representation roundoff before the state checks
    out = 0.5 * (out + out.conj().T)
    return QubitState(out)


def cp_certificate(
    ps: PropagatorState, f_plus: float, f_minus: float, tol: float = 1e-10
) -> CPReport:
    """Choi eigenvalues plus the necessary and sufficient positivity tests.

    The eigenvalues come from the two 2x2 blocks of the Choi matrix:
    lambda_{1,2} = (1 + E +- sqrt(Z^2 + 4E|x+|^2))/2 and lambda_{3,4}
    likewise with E -> -E and x+ -> x-. Necessary: Gamma >= 0. Sufficient:
    e^{-Gamma} f+ f- >= |x-|^2, with f_pm = kappa int_0^t e^Gamma g_pm ds
    carrying one power of the coupling group each.
    """
    E = np.exp(-ps.decay)
    Z = ps.relax
    r_plus = np.sqrt(Z * Z + 4.0 * E * abs(ps.x_plus) ** 2)
    r_minus = np.sqrt(Z * Z + 4.0 * E * abs(ps.x_minus) ** 2)
    lams = (
        0.5 * (1.0 + E + r_plus),
        0.5 * (1.0 + E - r_plus),
        0.5 * (1.0 - E + r_minus),
        0.5 * (1.0 - E - r_minus),
    )
    lhs = E * f_plus * f_minus
    rhs = abs(ps.x_minus) ** 2
    s_margin = lhs - rhs
    return CPReport(
        lambdas=lams,
        necessary_ok=ps.decay >= -tol,
        sufficient_ok=s_margin >= -tol * (1.0 + abs(lhs) + rhs),
        necessary_margin=float(ps.decay),
        sufficient_margin=float(s_margin),
    )


# -- constant-rate (Markovian, secular) propagator ------------------------


def _markov_functions(
    gp_m: float, gm_m: float, lamb_m: float, kappa: float, omega_q: float, t
):
    t = np.asarray(t, dtype=float)
    gsum = gp_m + gm_m
    gamma = kappa * gsum * t
    if gsum > 0:
        z_inf = (gp_m - gm_m) / gsum
        relax = z_inf * -np.expm1(-gamma)
        scale = np.where(gamma > 0, np.expm1(np.minimum(gamma, _GAMMA_EXP_CAP)) / gsum, 0.0)
        f_plus = gp_m * scale
        f_minus = gm_m * scale
    else:
        relax = np.zeros_like(t)
        f_plus = np.zeros_like(t)
        f_minus = np.zeros_like(t)
    phase = (omega_q + kappa * lamb_m) * t
    return gamma, relax, phase, f_plus, f_minus


def markovian_propagator(
    gp_m: float, gm_m: float, lamb_m: float, kappa: float, omega_q: float, t: float
) -> PropagatorState:
    """Constant-rate secular map: exponential decay at the asymptotic rates,
    Lamb-shifted precession, x+ = 1 and x- = 0 identically."""
    if t < 0:
        raise DomainError("t must be nonnegative")
    gamma, relax, phase, _, _ = _markov_functions(gp_m, gm_m, lamb_m, kappa, omega_q, t)
    ch = choi_from_functions(float(gamma), float(relax), float(phase), 1.0 + 0j, 0.0 + 0j)
    return PropagatorState(
        t=float(t),
        decay=float(gamma),
        relax=float(relax),
        phase=float(phase),
        x_plus=1.0 + 0j,
        x_minus=0.0 + 0j,
        choi=ch,
    )


def markovian_trajectory(
    gp_m: float, gm_m: float, lamb_m: float, kappa: float, omega_q: float, t_grid
) -> Trajectory:
    """Closed-form secular trajectory on a grid (reference for comparisons)."""
    t = np.asarray(t_grid, dtype=float)
    gamma, relax, phase, f_plus, f_minus = _markov_functions(
        gp_m, gm_m, lamb_m, kappa, omega_q, t
    )
    ones = np.ones_like(t, dtype=complex)
    return Trajectory(
        t=t,
        x_plus=ones,
        x_minus=np.zeros_like(t, dtype=complex),
        decay=gamma,
        relax=relax,
        phase=phase,
        f_plus=f_plus,
        f_minus=f_minus,
        omega_q=float(omega_q),
        kappa=float(kappa),
        secular=True,
        conservation_drift=0.0,
    )
