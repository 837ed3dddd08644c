"""Bath spectral densities and their time-domain kernel transforms.

A bath enters the qubit dynamics only through its spectral density J(w)
and the symmetrized noise power spectrum coth(beta*w/2)*J(w). The rate
integrals consume the two kernel transforms

    C(tau) = int_0^inf dw  Sbar(w) cos(w tau)
    S(tau) = int_0^inf dw  J(w)    sin(w tau)

which have closed forms for the zero-temperature Ohmic and 1/f^alpha
models and are computed by oscillation-aware quadrature otherwise.

All frequencies are measured in units of the qubit frequency and times in
its inverse; amplitudes R and A are dimensionless after that rescaling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import gamma as _gamma_fn

from ._quadrature import fourier_semiinfinite
from .errors import DomainError, NumericalError

OHMIC = "ohmic"
ONE_OVER_F = "one_over_f"
IMPEDANCE = "impedance"
TABULATED = "tabulated"

_EPS = np.finfo(float).eps


def coupled_capacitance(C_e: float, C_J: float, C_g: float) -> float:
    """Series/parallel combination that loads the impedance: C_e + C_e^2/(C_J+C_e+C_g)."""
    return C_e + C_e**2 / (C_J + C_e + C_g)


def impedance_to_spectral_density(
    Z: Callable[[float], complex], C_e: float, C_J: float, C_g: float, omega: float
) -> float:
    """Spectral density seen by the qubit through a coupling capacitor.

    J(w) = Im[ i w Z(w) / (1 + i w C~ Z(w)) ] with C~ the loaded capacitance.
    """
    if omega < 0:
        raise DomainError("frequency must be nonnegative")
    if min(C_e, C_J, C_g) < 0:
        raise DomainError("capacitances must be nonnegative")
    ct = coupled_capacitance(C_e, C_J, C_g)
    z = complex(Z(omega))
    den = 1.0 + 1j * omega * ct * z
    if abs(den) < 1e3 * _EPS * max(1.0, abs(1j * omega * ct * z)):
        raise NumericalError(
            f"impedance denominator vanishes at omega={omega} (resonant pole)"
        )
    return float((1j * omega * z / den).imag)


@dataclass(frozen=True)
class BathSpectrum:
    """A bath model: spectral density plus inverse temperature.

    Construct through the `ohmic`, `one_over_f`, `from_impedance` or
    `tabulated` classmethods, which validate parameters. beta=inf encodes
    zero temperature.
    """

    kind: str
    beta: float = math.inf
    R: float = 0.0
    omega_c: float = 0.0
    A: float = 0.0
    alpha: float = 0.0
    omega_ir: float = 0.0
    Z: Callable[[float], complex] | None = None
    C_e: float = 0.0
    C_J: float = 0.0
    C_g: float = 0.0
    table_omega: np.ndarray | None = field(default=None, repr=False)
    table_J: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def ohmic(cls, R: float, omega_c: float, beta: float = math.inf) -> "BathSpectrum":
        if omega_c <= 0:
            raise DomainError("ohmic cutoff omega_c must be positive")
        if R < 0:
            raise DomainError("ohmic resistance scale R must be nonnegative")
        if beta <= 0:
            raise DomainError("inverse temperature beta must be positive")
        return cls(kind=OHMIC, R=float(R), omega_c=float(omega_c), beta=float(beta))

    @classmethod
    def one_over_f(
        cls,
        A: float,
        alpha: float,
        beta: float = math.inf,
        omega_ir: float | None = None,
    ) -> "BathSpectrum":
        if not 0.0 < alpha < 1.0:
            raise DomainError("1/f^alpha exponent must satisfy 0 < alpha < 1")
        if A < 0:
            raise DomainError("1/f^alpha amplitude A must be nonnegative")
        if beta <= 0:
            raise DomainError("inverse temperature beta must be positive")
        if math.isfinite(beta) and (omega_ir is None or omega_ir <= 0):
            # coth(beta w/2)/w^alpha ~ w^(-alpha-1) is infrared divergent
            raise DomainError(
                "finite-temperature 1/f^alpha requires an infrared cutoff omega_ir > 0"
            )
        return cls(
            kind=ONE_OVER_F,
            A=float(A),
            alpha=float(alpha),
            beta=float(beta),
            omega_ir=float(omega_ir or 0.0),
        )

    @classmethod
    def from_impedance(
        cls,
        Z: Callable[[float], complex],
        C_e: float,
        C_J: float,
        C_g: float,
        beta: float = math.inf,
    ) -> "BathSpectrum":
        if min(C_e, C_J, C_g) < 0:
            raise DomainError("capacitances must be nonnegative")
        return cls(kind=IMPEDANCE, Z=Z, C_e=C_e, C_J=C_J, C_g=C_g, beta=float(beta))

    @classmethod
    def tabulated(
        cls, omega: Sequence[float], J: Sequence[float], beta: float = math.inf
    ) -> "BathSpectrum":
        w = np.asarray(omega, dtype=float)
        j = np.asarray(J, dtype=float)
        if w.ndim != 1 or w.shape != j.shape or len(w) < 2:
            raise DomainError("tabulated spectrum needs matching 1-d omega and J arrays")
        if np.any(np.diff(w) <= 0):
            raise DomainError("tabulated frequencies must be strictly increasing")
        if w[0] <= 0:
            raise DomainError("tabulated frequencies must be positive (log interpolation)")
        if np.any(j < 0):
            raise DomainError("tabulated spectral density must be nonnegative")
        return cls(kind=TABULATED, table_omega=w, table_J=j, beta=float(beta))

    @classmethod
    def tabulated_from_csv(cls, path, beta: float = math.inf) -> "BathSpectrum":
        """Load a two-column (omega, J) CSV with a one-line header."""
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if data.shape[1] != 2:
            raise DomainError(f"{path}: expected two columns (omega, J)")
        return cls.tabulated(data[:, 0], data[:, 1], beta=beta)

    # -- queries -------------------------------------------------------

    @property
    def zero_temperature(self) -> bool:
        return math.isinf(self.beta)

    def frequency_scale(self) -> float:
        """Characteristic decay/variation scale of J, for quadrature panels."""
        if self.kind == OHMIC:
            return self.omega_c
        if self.kind == ONE_OVER_F:
            return 1.0
        if self.kind == TABULATED:
            return float(self.table_omega[-1])
        return 1.0

    def support_upper(self) -> float | None:
        return float(self.table_omega[-1]) if self.kind == TABULATED else None

    def has_closed_form_kernels(self) -> bool:
        return self.zero_temperature and self.kind in (OHMIC, ONE_OVER_F)


def spectral_density(spec: BathSpectrum, omega) -> float | np.ndarray:
    """J(omega) for the given model; domain-checked."""
    w = np.asarray(omega, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    if np.any(w < 0):
        raise DomainError("spectral density is defined for omega >= 0")
    if spec.kind == OHMIC:
        out = spec.R * w * np.exp(-w / spec.omega_c)
    elif spec.kind == ONE_OVER_F:
        if np.any(w <= spec.omega_ir if spec.omega_ir > 0 else w == 0):
            raise DomainError("1/f^alpha spectral density diverges at omega = 0")
        out = spec.A * w ** (-spec.alpha)
        if spec.omega_ir > 0:
            out = np.where(w > spec.omega_ir, out, 0.0)
    elif spec.kind == TABULATED:
        out = _tabulated_J(spec, w)
    elif spec.kind == IMPEDANCE:
        out = np.array(
            [
                impedance_to_spectral_density(spec.Z, spec.C_e, spec.C_J, spec.C_g, wi)
                for wi in w
            ]
        )
    else:  # pragma: no cover - constructors forbid this
        raise DomainError(f"unknown bath kind {spec.kind!r}")
    return float(out[0]) if scalar else out


def _tabulated_J(spec: BathSpectrum, w: np.ndarray) -> np.ndarray:
    """Log-linear in omega, zero outside the tabulated support."""
    lo, hi = spec.table_omega[0], spec.table_omega[-1]
    inside = (w >= lo) & (w <= hi)
    out = np.zeros_like(w)
    if np.any(inside):
        out[inside] = np.interp(
            np.log(w[inside]), np.log(spec.table_omega), spec.table_J
        )
    return out


def _coth(x: np.ndarray) -> np.ndarray:
    return 1.0 / np.tanh(x)


def symmetrized_psd(spec: BathSpectrum, omega) -> float | np.ndarray:
    """Symmetrized noise power coth(beta*omega/2) * J(omega); J itself at T=0."""
    w = np.asarray(omega, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    if np.any(w <= 0):
        raise DomainError("symmetrized PSD is defined for omega > 0")
    j = np.atleast_1d(spectral_density(spec, w))
    out = j if spec.zero_temperature else _coth(0.5 * spec.beta * w) * j
    return float(out[0]) if scalar else out


# -- kernel transforms -------------------------------------------------

CLOSED_FORM = "closed-form"
QUADRATURE = "quadrature"


@dataclass(frozen=True)
class KernelSamples:
    """C and S sampled on a tau grid, tagged with how they were computed."""

    tau: np.ndarray
    C: np.ndarray
    S: np.ndarray
    method: str

    def __post_init__(self):
        if np.any(np.diff(self.tau) <= 0):
            raise DomainError("tau grid must be strictly increasing")


def _ohmic_kernels_t0(R: float, wc: float, tau: np.ndarray):
    x = wc * tau
    den = (1.0 + x * x) ** 2
    C = R * wc**2 * (1.0 - x * x) / den
    S = 2.0 * R * wc**3 * tau / den
    return C, S


def one_over_f_kernel_constants(alpha: float) -> tuple[float, float]:
    """Prefactors of the tau^(alpha-1) cosine/sine transforms of w^(-alpha)."""
    g = _gamma_fn(1.0 - alpha)
    return g * math.sin(math.pi * alpha / 2.0), g * math.cos(math.pi * alpha / 2.0)


def _one_over_f_kernels_t0(A: float, alpha: float, tau: np.ndarray):
    kc, ks = one_over_f_kernel_constants(alpha)
    t = tau ** (alpha - 1.0)
    return A * kc * t, A * ks * t


def kernel_transforms(
    spec: BathSpectrum, tau, method: str = "auto"
) -> tuple[float, float] | tuple[np.ndarray, np.ndarray]:
    """Evaluate (C(tau), S(tau)).

    method: 'auto' prefers the closed form when one exists; 'closed-form'
    demands it; 'quadrature' forces numerical integration (used by the
    consistency cross-checks).
    """
    t = np.asarray(tau, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if np.any(t < 0):
        raise DomainError("kernel transforms are defined for tau >= 0")
    if spec.kind == ONE_OVER_F and np.any(t == 0):
        raise DomainError("1/f^alpha kernels diverge as tau^(alpha-1) at tau = 0")

    if method == "auto":
        method = CLOSED_FORM if spec.has_closed_form_kernels() else QUADRATURE
    if method == CLOSED_FORM:
        if not spec.has_closed_form_kernels():
            raise DomainError(f"no closed-form kernels for this spectrum ({spec.kind}, beta={spec.beta})")
        if spec.kind == OHMIC:
            C, S = _ohmic_kernels_t0(spec.R, spec.omega_c, t)
        else:
            C, S = _one_over_f_kernels_t0(spec.A, spec.alpha, t)
    elif method == QUADRATURE:
        C = np.empty_like(t)
        S = np.empty_like(t)
        scale = spec.frequency_scale()
        upper = spec.support_upper()
        lower = spec.omega_ir if spec.kind == ONE_OVER_F else 0.0
        sing = spec.alpha if (spec.kind == ONE_OVER_F and lower == 0.0) else 0.0
        fC = lambda w: np.atleast_1d(symmetrized_psd(spec, np.maximum(w, 1e-300)))
        fS = lambda w: np.atleast_1d(spectral_density(spec, np.maximum(w, 1e-300)))
        for i, ti in enumerate(t):
            C[i], _ = fourier_semiinfinite(
                fC, ti, "cos", scale, upper=upper, lower=lower, singular_exponent=sing
            )
            S[i], _ = fourier_semiinfinite(
                fS, ti, "sin", scale, upper=upper, lower=lower, singular_exponent=sing
            )
    else:
        raise DomainError(f"unknown kernel method {method!r}")
    if scalar:
        return float(C[0]), float(S[0])
    return C, S


def kernel_samples(spec: BathSpectrum, tau_grid, method: str = "auto") -> KernelSamples:
    """Sample both kernels on a grid, recording the method used."""
    t = np.asarray(tau_grid, dtype=float)
    used = method
    if method == "auto":
        used = CLOSED_FORM if spec.has_closed_form_kernels() else QUADRATURE
    C, S = kernel_transforms(spec, t, method=used)
    return KernelSamples(tau=t, C=np.asarray(C), S=np.asarray(S), method=used)
