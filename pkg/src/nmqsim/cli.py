"""Command-line front end.

Subcommands: rates, evolve, cp-check, spectrum, ramsey, verify,
list-presets. A run is driven by a TOML config (--config) or a built-in
preset (--preset); outputs are CSV series / JSON reports under --out,
the NMQ_OUT_DIR environment variable, or ./nmqsim-out.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical failure (the failing stage is named on stderr).
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from .baths import BathSpectrum
from .config import RunConfig, load_config
from .errors import ConfigError, NumericalError
from .experiments import (
    precession_spectrum,
    ramsey_delta_p,
    ramsey_protocol_direct,
    sigma_expectations,
)
from .oracle import run_verification
from .output import format_float, write_csv, write_json
from .presets import get_preset, list_presets
from .propagator import (
    QubitState,
    Trajectory,
    apply_map,
    markovian_trajectory,
    solve_coherence,
)
from .rates import RateTable, build_rate_table, markovian_limits

_DENSE_STEP = {"one_over_f": 0.02, "ohmic": 0.05}


def _dense_points(kind: str, t_max: float) -> int:
    """Internal rate-table density for trajectory-backed stages."""
    h = _DENSE_STEP.get(kind, 0.05)
    if t_max > 2e4:
        # long-horizon runs: coarser sampling keeps spline tables bounded;
        # the rates vary slowly there and enter only through integrals
        h = 0.1
    elif kind == "one_over_f" and t_max > 1e4:
        h = 0.05
    return int(math.ceil(t_max / h)) + 1


def _resolve_out_dir(cfg: RunConfig, cli_out: str | None) -> Path:
    if cli_out:
        return Path(cli_out)
    if cfg.out_dir:
        return Path(cfg.out_dir)
    env = os.environ.get("NMQ_OUT_DIR", "").strip()
    return Path(env) if env else Path("nmqsim-out")


class _BathRun:
    """One bath resolved from the config: spectrum, coupling, tables."""

    def __init__(self, cfg: RunConfig, idx: int):
        self.cfg = cfg
        self.bc = cfg.baths[idx]
        circuit_kappa = cfg.resolve_kappa()
        self.spec, self.kappa = self.bc.build(circuit_kappa)
        self.label = self.bc.label
        self._tables: dict[tuple[float, int], RateTable] = {}

    def table(self, t_max: float, n_points: int) -> RateTable:
        key = (t_max, n_points)
        if key not in self._tables:
            self._tables[key] = build_rate_table(
                self.spec, 1.0, t_max, n_points, kappa=self.kappa
            )
        return self._tables[key]

    def dense_table(self, t_max: float) -> RateTable:
        return self.table(t_max, _dense_points(self.bc.kind, t_max))

    def trajectory(self, t_eval, *, secular=False) -> Trajectory:
        rt = self.dense_table(float(np.max(t_eval)))
        return solve_coherence(
            rt, self.kappa, 1.0, t_eval,
            secular=secular, rtol=self.cfg.rtol, atol=self.cfg.atol,
        )

    def markovian(self, t_eval) -> Trajectory:
        gp_m, gm_m, lamb_m = markovian_limits(self.spec, 1.0)
        return markovian_trajectory(gp_m, gm_m, lamb_m, self.kappa, 1.0, t_eval)


def _stage_rates(run: _BathRun, out: Path) -> Path:
    cfg = run.cfg
    rt = run.table(cfg.rates_t_max, cfg.rates_points)
    g1, g2 = rt.canonical()
    return write_csv(
        out / f"rates_{run.label}.csv",
        cfg,
        {
            "t": rt.t,
            "gamma_plus": rt.gamma_plus,
            "gamma_minus": rt.gamma_minus,
            "lamb_shift": rt.lamb,
            "gamma_tilde_1": g1,
            "gamma_tilde_2": g2,
        },
    )


def _evolve_columns(run: _BathRun, traj: Trajectory) -> dict[str, np.ndarray]:
    n = len(traj)
    lam = np.empty((n, 4))
    nec = np.empty(n)
    suf = np.empty(n)
    bloch = np.empty((n, 3))
    rho0 = QubitState.from_bloch(*run.cfg.bloch0)
    for i in range(n):
        rep = traj.cp_report_at(i)
        lam[i] = rep.lambdas
        nec[i] = 1.0 if rep.necessary_ok else 0.0
        suf[i] = 1.0 if rep.sufficient_ok else 0.0
        bloch[i] = apply_map(traj.state_at(i).choi, rho0).bloch
    return {
        "t": traj.t,
        "gamma_decay": traj.decay,
        "relaxation": traj.relax,
        "phase": traj.phase,
        "re_x_plus": traj.x_plus.real,
        "im_x_plus": traj.x_plus.imag,
        "re_x_minus": traj.x_minus.real,
        "im_x_minus": traj.x_minus.imag,
        "lambda_1": lam[:, 0],
        "lambda_2": lam[:, 1],
        "lambda_3": lam[:, 2],
        "lambda_4": lam[:, 3],
        "cp_necessary": nec,
        "cp_sufficient": suf,
        "bloch_x": bloch[:, 0],
        "bloch_y": bloch[:, 1],
        "bloch_z": bloch[:, 2],
    }


def _stage_evolve(run: _BathRun, out: Path) -> Path:
    cfg = run.cfg
    t_eval = np.linspace(0.0, cfg.evolve_t_max, cfg.evolve_points)
    traj = run.trajectory(t_eval)
    cols = _evolve_columns(run, traj)
    return write_csv(out / f"evolve_{run.label}.csv", cfg, cols)


def _stage_cp_check(run: _BathRun, out: Path) -> tuple[Path, bool]:
    cfg = run.cfg
    t_eval = np.linspace(0.0, cfg.evolve_t_max, cfg.evolve_points)
    traj = run.trajectory(t_eval)
    cols = _evolve_columns(run, traj)
    keep = ("t", "lambda_1", "lambda_2", "lambda_3", "lambda_4",
            "cp_necessary", "cp_sufficient")
    cp_cols = {k: cols[k] for k in keep}
    ok = bool(np.all(cols["cp_necessary"] > 0.5) and np.all(cols["cp_sufficient"] > 0.5))
    path = write_csv(out / f"cp_{run.label}.csv", cfg, cp_cols)
    verdict = "PASS" if ok else "FAIL"
    min4 = cols["lambda_4"].min()
    print(f"cp-check {run.label}: {verdict} (min lambda_4 = {format_float(min4)})")
    return path, ok


def _stage_spectrum(run: _BathRun, out: Path) -> Path:
    cfg = run.cfg
    n = int(round(cfg.fft_t_max / cfg.fft_dt)) + 1
    t_eval = np.linspace(0.0, cfg.fft_t_max, n)
    rho0 = QubitState.from_bloch(*cfg.bloch0)
    sx_nm, _, _ = sigma_expectations(run.trajectory(t_eval), rho0)
    sx_m, _, _ = sigma_expectations(run.markovian(t_eval), rho0)
    omega, mag_nm = precession_spectrum(
        t_eval, sx_nm, window=cfg.fft_window, zero_pad=cfg.fft_zero_pad
    )
    _, mag_m = precession_spectrum(
        t_eval, sx_m, window=cfg.fft_window, zero_pad=cfg.fft_zero_pad
    )
    band = omega <= 5.0
    return write_csv(
        out / f"spectrum_{run.label}.csv",
        cfg,
        {"omega": omega[band], "fft_nonmarkov": mag_nm[band], "fft_markov": mag_m[band]},
    )


def _stage_ramsey(run: _BathRun, out: Path) -> Path:
    cfg = run.cfg
    period = 2.0 * np.pi
    t_d = np.linspace(0.0, cfg.ramsey_periods * period, cfg.ramsey_delays)
    traj = run.trajectory(t_d)
    dp = ramsey_delta_p(traj, t_d)
    p_yy = np.empty_like(dp)
    p_xx = np.empty_like(dp)
    for i, td in enumerate(t_d):
        p_yy[i] = ramsey_protocol_direct(traj, "Y", td)
        p_xx[i] = ramsey_protocol_direct(traj, "X", td)
    return write_csv(
        out / f"ramsey_{run.label}.csv",
        cfg,
        {"t_d_over_period": t_d / period, "delta_p": dp, "p_yy": p_yy, "p_xx": p_xx},
    )


_STAGES = {
    "rates": _stage_rates,
    "evolve": _stage_evolve,
    "spectrum": _stage_spectrum,
    "ramsey": _stage_ramsey,
}


def _report_circuit(cfg: RunConfig) -> None:
    if cfg.circuit is None:
        return
    wq, eta, kappa = cfg.circuit.derived()
    print(f"circuit: omega_q = {format_float(wq)} (energy units), "
          f"eta = {format_float(eta)}, kappa = eta^2 = {format_float(kappa)}")
    for bc in cfg.baths:
        spec, k = bc.build(kappa)
        if bc.kind == "ohmic":
            g = k * spec.R * math.exp(-1.0 / spec.omega_c)
            print(f"bath {bc.label}: implied coupling group g = {format_float(g)}")
        elif bc.kind == "one_over_f":
            print(f"bath {bc.label}: implied coupling group g = {format_float(k * spec.A)}")


def run_stage(cfg: RunConfig, stage: str, out_dir: Path) -> int:
    """Execute one pipeline stage for every configured bath."""
    _report_circuit(cfg)
    cp_all_ok = True
    for idx in range(len(cfg.baths)):
        run = _BathRun(cfg, idx)
        try:
            if stage == "cp-check":
                _, ok = _stage_cp_check(run, out_dir)
                cp_all_ok = cp_all_ok and ok
            else:
                path = _STAGES[stage](run, out_dir)
                print(f"{stage} {run.label}: wrote {path}")
        except NumericalError as exc:
            print(f"numerical failure in stage '{stage}' (bath {run.label}): {exc}",
                  file=sys.stderr)
            return 3
    if stage == "cp-check" and not cp_all_ok:
        print("cp-check: certificate violated at sampled times")
    return 0


def _cmd_verify(args, cfg: RunConfig | None, out_dir: Path) -> int:
    reports = run_verification(fast=args.fast)
    payload = {
        "reports": [asdict(r) for r in reports],
        "all_passed": all(r.passed for r in reports),
    }
    path = write_json(out_dir / "verify_report.json", payload)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: max deviation {r.max_deviation:.3e} "
              f"(tol {r.tolerance:.0e}) at {r.location:.6g}")
    print(f"report: {path}")
    return 0 if payload["all_passed"] else 1


def _cmd_list_presets(args) -> int:
    for name, cfg in list_presets():
        parts = []
        for b in cfg.baths:
            desc = f"{b.kind}(g={b.coupling:g}"
            if b.omega_c is not None:
                desc += f", omega_c={b.omega_c:g}"
            if b.alpha is not None:
                desc += f", alpha={b.alpha:g}"
            parts.append(desc + ")")
        print(f"{name}: {' + '.join(parts)}; experiments: {', '.join(cfg.experiments)}; "
              f"rates to t={cfg.rates_t_max:g}")
    return 0


def _load(args) -> RunConfig:
    if args.preset and args.config:
        raise ConfigError("give either --preset or --config, not both")
    if args.preset:
        cfg = get_preset(args.preset)
    elif args.config:
        cfg = load_config(args.config)
    else:
        raise ConfigError("a run needs --preset <name> or --config <path>")
    if args.tolerance_scale != 1.0:
        if args.tolerance_scale <= 0:
            raise ConfigError("--tolerance-scale must be positive")
        cfg = replace(
            cfg,
            rtol=cfg.rtol * args.tolerance_scale,
            atol=cfg.atol * args.tolerance_scale,
        )
    return cfg


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nmqsim",
        description="Qubit idle-time dynamics beyond the Markov approximation.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--config", help="TOML run configuration")
        sp.add_argument("--preset", help="built-in preset name")
        sp.add_argument("--out", help="output directory")
        sp.add_argument(
            "--tolerance-scale", type=float, default=1.0,
            help="multiply solver rtol/atol by this factor",
        )

    for name, doc in (
        ("rates", "emit the rate table as CSV"),
        ("evolve", "emit map functions, Choi eigenvalues and Bloch components"),
        ("cp-check", "emit complete-positivity certificates and a verdict"),
        ("spectrum", "emit precession spectra (beyond-Markov vs Markov)"),
        ("ramsey", "emit the Ramsey X/Y probability difference"),
    ):
        add_common(sub.add_parser(name, help=doc))
    vp = sub.add_parser("verify", help="run the oracle suite; nonzero exit on failure")
    vp.add_argument("--out", help="output directory")
    vp.add_argument("--fast", action="store_true", help="reduced grids")
    sub.add_parser("list-presets", help="list built-in presets")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list-presets":
            return _cmd_list_presets(args)
        if args.command == "verify":
            out_dir = Path(args.out) if args.out else Path(
                os.environ.get("NMQ_OUT_DIR", "").strip() or "nmqsim-out"
            )
            return _cmd_verify(args, None, out_dir)
        cfg = _load(args)
        out_dir = _resolve_out_dir(cfg, args.out)
        return run_stage(cfg, args.command, out_dir)
    except ConfigError as exc:
        field = f" (field: {exc.field})" if getattr(exc, "field", None) else ""
        print(f"configuration error: {exc}{field}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
