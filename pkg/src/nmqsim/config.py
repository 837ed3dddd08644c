"""Run configuration: TOML parsing, validation, and deterministic emission.

All frequencies in a config are expressed in units of the qubit frequency
and all times in its inverse, so internally omega_q = 1. A bath's coupling
can be given three ways (exactly one per bath):

* ``coupling`` - the dimensionless group g that multiplies the Markovian
  decay rate (for an Ohmic bath g = kappa * R * exp(-1/omega_c); for a
  1/f^alpha bath g = kappa * A). The spectral amplitude is then normalized
  so that J(omega_q) = 1 and kappa = g.
* ``kappa`` with an explicit amplitude (``R`` or ``A``).
* a ``[circuit]`` block, which supplies kappa = eta^2 (charge factors are
  folded into the group) while the bath carries an explicit amplitude.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, fields
from typing import Any

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from .baths import BathSpectrum
from .circuit import TransmonCircuit, coupling_eta, qubit_frequency
from .errors import ConfigError

EXPERIMENT_KINDS = ("rates", "evolve", "cp-check", "spectrum", "ramsey")
BATH_KINDS = ("ohmic", "one_over_f", "tabulated")


@dataclass(frozen=True)
class BathConfig:
    label: str
    kind: str
    coupling: float | None = None
    kappa: float | None = None
    omega_c: float | None = None
    R: float | None = None
    alpha: float | None = None
    A: float | None = None
    beta: float = math.inf
    omega_ir: float | None = None
    csv: str | None = None

    def validate(self, have_circuit: bool) -> None:
        where = f"bath[{self.label}]"
        if self.kind not in BATH_KINDS:
            raise ConfigError(
                f"{where}.kind: unknown bath kind {self.kind!r}"
                f" (expected one of {', '.join(BATH_KINDS)})",
                field=f"{where}.kind",
            )
        n_coupling = (self.coupling is not None) + (self.kappa is not None)
        if n_coupling > 1 or (n_coupling == 0 and not have_circuit):
            raise ConfigError(
                f"{where}: exactly one coupling specification required"
                " (coupling, kappa, or a [circuit] block)",
                field=f"{where}.coupling",
            )
        if self.coupling is not None and self.coupling < 0:
            raise ConfigError(f"{where}.coupling must be nonnegative", f"{where}.coupling")
        if self.kind == "ohmic":
            if self.omega_c is None or self.omega_c <= 0:
                raise ConfigError(f"{where}.omega_c must be positive", f"{where}.omega_c")
            if self.coupling is None and self.R is None:
                raise ConfigError(f"{where}: explicit kappa requires R", f"{where}.R")
        if self.kind == "one_over_f":
            if self.alpha is None or not 0 < self.alpha < 1:
                raise ConfigError(f"{where}.alpha must lie in (0, 1)", f"{where}.alpha")
            if self.coupling is None and self.A is None:
                raise ConfigError(f"{where}: explicit kappa requires A", f"{where}.A")
        if self.kind == "tabulated" and not self.csv:
            raise ConfigError(f"{where}.csv: tabulated bath needs a CSV path", f"{where}.csv")

    def build(self, circuit_kappa: float | None = None) -> tuple[BathSpectrum, float]:
        """Instantiate the spectrum and resolve the coupling kappa."""
        if self.kind == "ohmic":
            if self.coupling is not None:
                # normalize J(omega_q) = 1 so kappa equals the group g
                spec = BathSpectrum.ohmic(
                    R=math.exp(1.0 / self.omega_c), omega_c=self.omega_c, beta=self.beta
                )
                return spec, self.coupling
            spec = BathSpectrum.ohmic(R=self.R, omega_c=self.omega_c, beta=self.beta)
        elif self.kind == "one_over_f":
            if self.coupling is not None:
                spec = BathSpectrum.one_over_f(
                    A=1.0, alpha=self.alpha, beta=self.beta, omega_ir=self.omega_ir
                )
                return spec, self.coupling
            spec = BathSpectrum.one_over_f(
                A=self.A, alpha=self.alpha, beta=self.beta, omega_ir=self.omega_ir
            )
        else:
            spec = BathSpectrum.tabulated_from_csv(self.csv, beta=self.beta)
        kappa = self.kappa if self.kappa is not None else circuit_kappa
        if kappa is None:
            raise ConfigError(f"bath[{self.label}]: no coupling available")
        return spec, float(kappa)


@dataclass(frozen=True)
class CircuitConfig:
    E_C: float
    E_J: float
    C_e: float
    C_J: float
    C_g: float

    def derived(self) -> tuple[float, float, float]:
        """(qubit frequency in energy units, eta, kappa = eta^2)."""
        c = TransmonCircuit(self.E_C, self.E_J, self.C_e, self.C_J, self.C_g)
        eta = coupling_eta(c)
        return qubit_frequency(c), eta, eta * eta


@dataclass(frozen=True)
class RunConfig:
    baths: tuple[BathConfig, ...]
    rates_t_max: float = 60.0
    rates_points: int = 1201
    evolve_t_max: float = 60.0
    evolve_points: int = 601
    fft_t_max: float = 4000.0
    fft_dt: float = 0.2
    fft_window: str = "hann"
    fft_zero_pad: int = 8
    ramsey_periods: float = 2.5
    ramsey_delays: int = 1001
    rtol: float = 1e-10
    atol: float = 1e-12
    bloch0: tuple[float, float, float] = (1.0, 0.0, 0.0)
    experiments: tuple[str, ...] = ("rates",)
    out_dir: str = ""
    circuit: CircuitConfig | None = None
    preset: str = ""

    def validate(self) -> None:
        if not self.baths:
            raise ConfigError("at least one [[bath]] block is required", field="bath")
        labels = [b.label for b in self.baths]
        if len(set(labels)) != len(labels):
            raise ConfigError("bath labels must be unique", field="bath.label")
        for b in self.baths:
            b.validate(have_circuit=self.circuit is not None)
        for name in ("rates_t_max", "evolve_t_max", "fft_t_max", "fft_dt",
                     "ramsey_periods", "rtol", "atol"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"grid.{name} must be positive", field=name)
        if self.rates_points < 2 or self.evolve_points < 2 or self.ramsey_delays < 2:
            raise ConfigError("point counts must be at least 2", field="grid")
        if self.fft_window not in ("hann", "none"):
            raise ConfigError(
                f"fft_window must be 'hann' or 'none', got {self.fft_window!r}",
                field="grid.fft_window",
            )
        if self.fft_zero_pad < 1:
            raise ConfigError("fft_zero_pad must be >= 1", field="grid.fft_zero_pad")
        for e in self.experiments:
            if e not in EXPERIMENT_KINDS:
                raise ConfigError(
                    f"unknown experiment {e!r} (expected one of {', '.join(EXPERIMENT_KINDS)})",
                    field="run.experiments",
                )
        r = float(np.linalg.norm(self.bloch0))
        if r > 1.0 + 1e-12:
            raise ConfigError("initial Bloch vector must have length <= 1", field="state.bloch")

    def resolve_kappa(self) -> float | None:
        return self.circuit.derived()[2] if self.circuit is not None else None


# -- TOML load/dump ------------------------------------------------------


def _get(table: dict, key: str, typ, where: str, default=None, required=False):
    if key not in table:
        if required:
            raise ConfigError(f"missing required key {where}.{key}", field=f"{where}.{key}")
        return default
    v = table[key]
    if typ is float and isinstance(v, int):
        v = float(v)
    if not isinstance(v, typ):
        raise ConfigError(
            f"{where}.{key}: expected {getattr(typ, '__name__', typ)}, got {type(v).__name__}",
            field=f"{where}.{key}",
        )
    return v


def config_from_dict(data: dict[str, Any]) -> RunConfig:
    known = {"bath", "grid", "ramsey", "solver", "state", "run", "output", "circuit"}
    for k in data:
        if k not in known:
            raise ConfigError(f"unknown top-level section {k!r}", field=k)
    baths_raw = data.get("bath", [])
    if isinstance(baths_raw, dict):
        baths_raw = [baths_raw]
    baths = []
    for i, b in enumerate(baths_raw):
        where = f"bath[{i}]"
        kind = _get(b, "kind", str, where, required=True)
        baths.append(
            BathConfig(
                label=_get(b, "label", str, where, default=kind),
                kind=kind,
                coupling=_get(b, "coupling", float, where),
                kappa=_get(b, "kappa", float, where),
                omega_c=_get(b, "omega_c", float, where),
                R=_get(b, "R", float, where),
                alpha=_get(b, "alpha", float, where),
                A=_get(b, "A", float, where),
                beta=_get(b, "beta", float, where, default=math.inf),
                omega_ir=_get(b, "omega_ir", float, where),
                csv=_get(b, "csv", str, where),
            )
        )
    grid = data.get("grid", {})
    ramsey = data.get("ramsey", {})
    solver = data.get("solver", {})
    state = data.get("state", {})
    run = data.get("run", {})
    output = data.get("output", {})
    circuit = None
    if "circuit" in data:
        c = data["circuit"]
        circuit = CircuitConfig(
            E_C=_get(c, "E_C", float, "circuit", required=True),
            E_J=_get(c, "E_J", float, "circuit", required=True),
            C_e=_get(c, "C_e", float, "circuit", default=0.0),
            C_J=_get(c, "C_J", float, "circuit", default=0.0),
            C_g=_get(c, "C_g", float, "circuit", default=0.0),
        )
    bloch = state.get("bloch", [1.0, 0.0, 0.0])
    if not (isinstance(bloch, list) and len(bloch) == 3):
        raise ConfigError("state.bloch must be a list of three numbers", field="state.bloch")
    cfg = RunConfig(
        baths=tuple(baths),
        rates_t_max=_get(grid, "rates_t_max", float, "grid", default=60.0),
        rates_points=_get(grid, "rates_points", int, "grid", default=1201),
        evolve_t_max=_get(grid, "evolve_t_max", float, "grid", default=60.0),
        evolve_points=_get(grid, "evolve_points", int, "grid", default=601),
        fft_t_max=_get(grid, "fft_t_max", float, "grid", default=4000.0),
        fft_dt=_get(grid, "fft_dt", float, "grid", default=0.2),
        fft_window=_get(grid, "fft_window", str, "grid", default="hann"),
        fft_zero_pad=_get(grid, "fft_zero_pad", int, "grid", default=8),
        ramsey_periods=_get(ramsey, "periods", float, "ramsey", default=2.5),
        ramsey_delays=_get(ramsey, "n_delays", int, "ramsey", default=1001),
        rtol=_get(solver, "rtol", float, "solver", default=1e-10),
        atol=_get(solver, "atol", float, "solver", default=1e-12),
        bloch0=tuple(float(x) for x in bloch),
        experiments=tuple(run.get("experiments", ["rates"])),
        out_dir=_get(output, "directory", str, "output", default=""),
        circuit=circuit,
        preset=_get(run, "preset", str, "run", default=""),
    )
    cfg.validate()
    return cfg


def load_config(path) -> RunConfig:
    with open(path, "rb") as fh:
        try:
            data = _toml.load(fh)
        except _toml.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: TOML parse error: {exc}") from exc
    return config_from_dict(data)


def _fmt_value(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt_value(x) for x in v) + "]"
    raise TypeError(f"cannot format {type(v)} for TOML")


def dump_config(cfg: RunConfig) -> str:
    """Deterministic TOML rendering; parses back to an equal RunConfig."""
    lines: list[str] = []
    lines.append("[grid]")
    for key in (
        "rates_t_max", "rates_points", "evolve_t_max", "evolve_points",
        "fft_t_max", "fft_dt", "fft_window", "fft_zero_pad",
    ):
        lines.append(f"{key} = {_fmt_value(getattr(cfg, key))}")
    lines.append("")
    lines.append("[ramsey]")
    lines.append(f"periods = {_fmt_value(cfg.ramsey_periods)}")
    lines.append(f"n_delays = {_fmt_value(cfg.ramsey_delays)}")
    lines.append("")
    lines.append("[solver]")
    lines.append(f"rtol = {_fmt_value(cfg.rtol)}")
    lines.append(f"atol = {_fmt_value(cfg.atol)}")
    lines.append("")
    lines.append("[state]")
    lines.append(f"bloch = {_fmt_value(list(cfg.bloch0))}")
    lines.append("")
    lines.append("[run]")
    lines.append(f"experiments = {_fmt_value(list(cfg.experiments))}")
    if cfg.preset:
        lines.append(f"preset = {_fmt_value(cfg.preset)}")
    lines.append("")
    lines.append("[output]")
    lines.append(f"directory = {_fmt_value(cfg.out_dir)}")
    if cfg.circuit is not None:
        lines.append("")
        lines.append("[circuit]")
        for f in fields(cfg.circuit):
            lines.append(f"{f.name} = {_fmt_value(getattr(cfg.circuit, f.name))}")
    for b in cfg.baths:
        lines.append("")
        lines.append("[[bath]]")
        for f in fields(b):
            v = getattr(b, f.name)
            if v is None:
                continue
            lines.append(f"{f.name} = {_fmt_value(v)}")
    lines.append("")
    return "\n".join(lines)
