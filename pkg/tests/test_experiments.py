import numpy as np
import pytest

from nmqsim.baths import BathSpectrum
from nmqsim.config import config_from_dict, dump_config
from nmqsim.errors import DomainError, GridError
from nmqsim.experiments import (
    ExperimentResult,
    precession_spectrum,
    ramsey_delta_p,
    ramsey_protocol_direct,
    sigma_expectations,
)
from nmqsim.propagator import (
    QubitState,
    apply_map,
    constant_rate_table,
    markovian_trajectory,
    solve_coherence,
)
from nmqsim.rates import build_rate_table, markovian_limits

OHMIC3 = BathSpectrum.ohmic(R=np.exp(1.0 / 3.0), omega_c=3.0)  # J(1) = 1


@pytest.fixture(scope="module")
def short_traj():
    rt = build_rate_table(OHMIC3, 1.0, 20.0, 1001, kappa=1e-3)
    return rt, solve_coherence(rt, 1e-3, 1.0, np.linspace(0.0, 16.0, 801))


def test_noiseless_precession_is_cosine():
    rt = constant_rate_table(0.0, 0.0, 0.0, 1.0, 130.0)
    traj = solve_coherence(rt, 0.0, 1.0, np.linspace(0, 130, 2601))
    sx, sy, sz = sigma_expectations(traj, QubitState.from_bloch(1, 0, 0))
    assert np.abs(sx - np.cos(traj.t)).max() < 1e-12
    assert np.abs(sy + np.sin(traj.t)).max() < 1e-12
    assert np.abs(sz).max() < 1e-14


def test_markovian_trace_is_damped_shifted_cosine():
    gp_m, gm_m, lamb_m = markovian_limits(OHMIC3, 1.0)
    kappa = 1e-3
    t = np.linspace(0, 200, 2001)
    traj = markovian_trajectory(gp_m, gm_m, lamb_m, kappa, 1.0, t)
    sx, _, _ = sigma_expectations(traj, QubitState.from_bloch(1, 0, 0))
    t2 = 2.0 / (kappa * (gp_m + gm_m))
    expect = np.exp(-t / t2) * np.cos((1.0 + kappa * lamb_m) * t)
    assert np.abs(sx - expect).max() < 1e-12


def test_sigma_expectations_match_map_trace(short_traj):
    _, traj = short_traj
    rng = np.random.default_rng(11)
    v = rng.normal(size=3)
    v *= rng.uniform(0, 1) ** (1 / 3) / np.linalg.norm(v)
    rho0 = QubitState.from_bloch(*v)
    sx, sy, sz = sigma_expectations(traj, rho0)
    for i in range(0, len(traj), 97):
        out = apply_map(traj.state_at(i).choi, rho0)
        bx, by, bz = out.bloch
        assert abs(sx[i] - bx) < 1e-10
        assert abs(sy[i] - by) < 1e-10
        assert abs(sz[i] - bz) < 1e-10


# -- spectra ----------------------------------------------------------------


def test_spectrum_grid_validation():
    t = np.linspace(0, 200, 2001)
    y = np.cos(t)
    bad_t = t.copy()
    bad_t[7] += 1e-3
    with pytest.raises(GridError):
        precession_spectrum(bad_t, y)
    with pytest.raises(GridError):
        precession_spectrum(t[:100], y[:100])  # too few periods
    with pytest.raises(DomainError):
        precession_spectrum(t, y, window="flat-top")


def test_markovian_peak_at_shifted_frequency():
    gp_m, gm_m, lamb_m = markovian_limits(OHMIC3, 1.0)
    kappa = 1e-2  # strong shift so the displacement spans many bins
    t = np.arange(0.0, 400.0, 0.2)
    traj = markovian_trajectory(gp_m, gm_m, lamb_m, kappa, 1.0, t)
    sx, _, _ = sigma_expectations(traj, QubitState.from_bloch(1, 0, 0))
    omega, mag = precession_spectrum(t, sx, zero_pad=8)
    peak = omega[np.argmax(mag)]
    bin_width = omega[1] - omega[0]
    assert abs(peak - (1.0 + kappa * lamb_m)) <= bin_width


def test_experiment_result_metadata_roundtrip():
    import sys

    cfg = config_from_dict(
        {"bath": [{"kind": "ohmic", "omega_c": 5.0, "coupling": 1e-4}]}
    )
    res = ExperimentResult(
        kind="trace",
        abscissa=np.linspace(0, 1, 5),
        values={"sx": np.zeros(5)},
        metadata={"config": dump_config(cfg)},
    )
    toml = __import__("tomllib" if sys.version_info >= (3, 11) else "tomli")
    parsed = config_from_dict(toml.loads(res.metadata["config"]))
    assert parsed == cfg
    with pytest.raises(GridError):
        ExperimentResult("trace", np.array([0.0, 0.0, 1.0]), {})


# -- Ramsey -----------------------------------------------------------------


def test_ramsey_markovian_difference_is_zero():
    gp_m, gm_m, lamb_m = markovian_limits(OHMIC3, 1.0)
    t = np.linspace(0, 20, 401)
    traj = markovian_trajectory(gp_m, gm_m, lamb_m, 1e-3, 1.0, t)
    dp = ramsey_delta_p(traj, t)
    assert np.abs(dp).max() == 0.0
    # the Z-rotation symmetry of the secular generator: equal probabilities
    for td in t[::50]:
        assert ramsey_protocol_direct(traj, "Y", td) == pytest.approx(
            ramsey_protocol_direct(traj, "X", td), abs=1e-14
        )


def test_ramsey_direct_protocol_matches_closed_form(short_traj):
    _, traj = short_traj
    rng = np.random.default_rng(5)
    idx = rng.integers(0, len(traj), size=50)
    for i in idx:
        td = float(traj.t[i])
        dp_closed = ramsey_delta_p(traj, td)
        dp_direct = ramsey_protocol_direct(traj, "Y", td) - ramsey_protocol_direct(
            traj, "X", td
        )
        assert abs(dp_closed - dp_direct) < 1e-10


def test_ramsey_zero_delay_and_noiseless():
    # with pulses about fixed (lab-frame) axes the noiseless return
    # probability follows the free precession, (1 + cos(wq t_d))/2, and is
    # identical for the two pulse orderings; at zero delay it is 1 exactly
    rt = constant_rate_table(0.0, 0.0, 0.0, 1.0, 4 * np.pi)
    traj = solve_coherence(rt, 0.0, 1.0, np.linspace(0, 4 * np.pi, 201))
    assert ramsey_delta_p(traj, 0.0) == 0.0
    assert ramsey_protocol_direct(traj, "Y", 0.0) == pytest.approx(1.0, abs=1e-12)
    assert ramsey_protocol_direct(traj, "X", 0.0) == pytest.approx(1.0, abs=1e-12)
    for td in traj.t[::20]:
        p_y = ramsey_protocol_direct(traj, "Y", float(td))
        p_x = ramsey_protocol_direct(traj, "X", float(td))
        assert p_y == pytest.approx(0.5 * (1 + np.cos(td)), abs=1e-12)
        assert p_x == pytest.approx(p_y, abs=1e-13)
    # a full precession period restores the initial state exactly
    assert ramsey_protocol_direct(traj, "Y", float(traj.t[100])) == pytest.approx(
        0.5 * (1 + np.cos(traj.t[100])), abs=1e-12
    )


def test_ramsey_nonmarkovian_asymmetry(short_traj):
    # with x- != 0 the two rotation axes give different return probabilities
    _, traj = short_traj
    td = float(traj.t[300])
    assert abs(traj.x_minus[300]) > 0
    p_yy = ramsey_protocol_direct(traj, "Y", td)
    p_xx = ramsey_protocol_direct(traj, "X", td)
    assert abs(p_yy - p_xx) > 1e-7


def test_ramsey_axis_validation(short_traj):
    _, traj = short_traj
    with pytest.raises(DomainError):
        ramsey_protocol_direct(traj, "Z", 1.0)
