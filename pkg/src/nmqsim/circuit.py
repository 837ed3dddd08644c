"""Qubit frequency and qubit-bath coupling from lumped circuit parameters."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import DomainError

TRANSMON_RATIO_WARN = 20.0


@dataclass(frozen=True)
class TransmonCircuit:
    """Lumped parameters of a capacitively shunted junction coupled to a line.

    E_C, E_J are the charging and Josephson energies; C_J bundles shunt plus
    intrinsic capacitance, C_e couples to the environment, C_g is the gate
    capacitance. The two-level truncation is assumed throughout.
    """

    E_C: float
    E_J: float
    C_e: float = 0.0
    C_J: float = 0.0
    C_g: float = 0.0

    def __post_init__(self):
        if self.E_C < 0 or self.E_J < 0:
            raise DomainError("E_C and E_J must be nonnegative")
        if min(self.C_e, self.C_J, self.C_g) < 0:
            raise DomainError("capacitances must be nonnegative")
        if self.C_e + self.C_J + self.C_g <= 0:
            raise DomainError("total capacitance must be positive")
        if self.E_C > 0 and self.E_J / self.E_C < TRANSMON_RATIO_WARN:
            warnings.warn(
                f"E_J/E_C = {self.E_J / self.E_C:.3g} is outside the"
                " charge-insensitive regime (>= 20)",
                stacklevel=2,
            )


def qubit_frequency(c: TransmonCircuit) -> float:
    """Transition frequency of the two lowest levels: sqrt(8 E_C E_J) - E_C."""
    return math.sqrt(8.0 * c.E_C * c.E_J) - c.E_C


def coupling_eta(c: TransmonCircuit) -> float:
    """Dimensionless transverse coupling (2C_e/C_total) * (E_J/4E_C)^(1/4)."""
    if c.E_C <= 0:
        raise DomainError("coupling_eta requires E_C > 0")
    cap = 2.0 * c.C_e / (c.C_J + c.C_g + c.C_e)
    return cap * (c.E_J / (4.0 * c.E_C)) ** 0.25
