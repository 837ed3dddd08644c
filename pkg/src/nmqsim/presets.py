"""Built-in parameter presets for the reference runs.

Each preset reproduces one published-figure scenario: canonical-rate
curves (fig2-*), the decay-function comparison (fig3), precession spectra
(fig4a/fig4b), and the Ramsey X/Y probability difference (fig5). Couplings
are the dimensionless groups described in `config`; with g = 1e-4 the
Markovian coherence time is T2 = 1/g = 1e4 (in 1/omega_q).
"""
from __future__ import annotations

from .config import BathConfig, RunConfig
from .errors import ConfigError


def _ohmic(label: str, omega_c: float, g: float) -> BathConfig:
    return BathConfig(label=label, kind="ohmic", coupling=g, omega_c=omega_c)


def _one_over_f(label: str, alpha: float, g: float) -> BathConfig:
    return BathConfig(label=label, kind="one_over_f", coupling=g, alpha=alpha)


PRESETS: dict[str, RunConfig] = {
    # canonical rates out to 20 T2 for both reference baths
    "fig2-ohmic": RunConfig(
        baths=(_ohmic("ohmic", 5.0, 1e-4),),
        rates_t_max=2.0e5,
        rates_points=4001,
        evolve_t_max=1.0e5,
        evolve_points=2001,
        experiments=("rates",),
        preset="fig2-ohmic",
    ),
    "fig2-f": RunConfig(
        baths=(_one_over_f("one_over_f", 0.95, 1e-4),),
        rates_t_max=2.0e5,
        rates_points=4001,
        evolve_t_max=1.0e5,
        evolve_points=2001,
        experiments=("rates",),
        preset="fig2-f",
    ),
    # decay function Gamma(t)/t against the Markovian rate
    "fig3": RunConfig(
        baths=(_ohmic("ohmic", 3.0, 1e-4), _one_over_f("one_over_f", 0.95, 1e-4)),
        rates_t_max=60.0,
        rates_points=6001,
        evolve_t_max=60.0,
        evolve_points=2401,
        experiments=("rates", "evolve"),
        preset="fig3",
    ),
    # precession spectra at stronger coupling (T2 = 1e3)
    "fig4a": RunConfig(
        baths=(_one_over_f("one_over_f", 0.95, 1e-3),),
        rates_t_max=4000.0,
        rates_points=200001,
        evolve_t_max=4000.0,
        evolve_points=2001,
        fft_t_max=4000.0,
        fft_dt=0.2,
        experiments=("evolve", "cp-check", "spectrum"),
        preset="fig4a",
    ),
    "fig4b": RunConfig(
        baths=(_ohmic("ohmic", 5.0, 1e-3),),
        rates_t_max=4000.0,
        rates_points=80001,
        evolve_t_max=4000.0,
        evolve_points=2001,
        fft_t_max=4000.0,
        fft_dt=0.2,
        experiments=("evolve", "cp-check", "spectrum"),
        preset="fig4b",
    ),
    # Ramsey probability difference over 2.5 precession periods
    "fig5": RunConfig(
        baths=(_ohmic("ohmic", 3.0, 1e-4), _one_over_f("one_over_f", 0.95, 1e-4)),
        rates_t_max=20.0,
        rates_points=2001,
        evolve_t_max=16.0,
        evolve_points=1601,
        ramsey_periods=2.5,
        ramsey_delays=1001,
        experiments=("ramsey",),
        preset="fig5",
    ),
}


def get_preset(name: str) -> RunConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r} (available: {', '.join(sorted(PRESETS))})",
            field="preset",
        ) from None


def list_presets() -> list[tuple[str, RunConfig]]:
    """Presets in stable (sorted) order with their configurations."""
    return [(name, PRESETS[name]) for name in sorted(PRESETS)]
