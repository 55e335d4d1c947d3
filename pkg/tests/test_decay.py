import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heisenberg_damped.decay_lab import (
    OBSERVABLES,
    NormSeries,
    ProfileError,
    ProfileSpec,
    expected_slopes,
    fit_decay_exponent,
    make_report,
    run_scenario,
    synth_field,
    verify_theorem,
)
from heisenberg_damped.group import GroupParams
from heisenberg_damped.hermite import MultiIndex
from heisenberg_damped.plancherel import build_grid, weighted_norm

P1 = GroupParams(1)
TIMES = np.geomspace(1.0, 1000.0, 32)


def synthetic_series(values, times=TIMES):
    norms = {name: np.asarray(values, dtype=float) for name in OBSERVABLES}
    return NormSeries(np.asarray(times, dtype=float), norms, P1, 0, 0, 1)


def flat_series(n=1, k_max=32):
    params = GroupParams(n)
    grid = build_grid(params, 1e-7, 0.125, 36, 8)
    u0 = synth_field(ProfileSpec("flat", 1.0, (0.0, 0.125)), grid, k_max)
    u1 = synth_field(ProfileSpec("zero", target="u1"), grid, k_max)
    return run_scenario(u0, u1, TIMES)


@pytest.fixture(scope="module")
def n1_flat():
    return flat_series()


def test_flat_single_mode_profile():
    grid = build_grid(P1, 0.01, 1.0, 4, 4)
    spec = ProfileSpec("flat", 1.0, (0.0, 0.5), modes=((MultiIndex.of(0), 1.0),))
    fld = synth_field(spec, grid, 3)
    inside = np.abs(grid.nodes) <= 0.5
    np.testing.assert_array_equal(fld.values[inside, 0, 0], 1.0)
    np.testing.assert_array_equal(fld.values[~inside, 0, 0], 0.0)
    assert not np.any(fld.values[:, 1:, :])


def test_bandlimited_profile_vanishes_outside_band():
    grid = build_grid(P1, 0.1, 4.0, 12, 6)
    fld = synth_field(ProfileSpec("bandlimited", 2.0, (1.0, 2.0)), grid, 2)
    lam = np.abs(grid.nodes)
    outside = (lam <= 1.0) | (lam >= 2.0)
    assert not np.any(fld.values[outside])
    assert np.all(fld.values[~outside, :, 0].real > 0)
    assert np.max(np.abs(fld.values)) <= 2.0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_power_profile_norm(n):
    params = GroupParams(n)
    grid = build_grid(params, 1e-9, 1.0, 40, 8, symmetric=False)
    spec = ProfileSpec("power", 1.0, (0.0, 1.0), sigma=1.0, modes=((MultiIndex.zero(n), 1.0),))
    fld = synth_field(spec, grid, 1)
    assert weighted_norm(fld) ** 2 == pytest.approx(params.c_n / (n + 3), rel=1e-10)


@pytest.mark.parametrize("n, sigma", [(1, -1.0), (1, -1.5), (2, -1.5)])
def test_power_profile_must_be_square_integrable(n, sigma):
    grid = build_grid(GroupParams(n), 1e-4, 1.0, 4, 4)
    with pytest.raises(ProfileError):
        synth_field(ProfileSpec("power", 1.0, (0.0, 1.0), sigma=sigma), grid, 2)
    # away from zero the same exponent is harmless
    synth_field(ProfileSpec("power", 1.0, (0.01, 1.0), sigma=sigma), grid, 2)


def test_profile_validation():
    with pytest.raises(ProfileError):
        ProfileSpec("gaussian")
    with pytest.raises(ProfileError):
        ProfileSpec("flat", support=(1.0, 0.5))
    with pytest.raises(ProfileError):
        ProfileSpec("flat", target="u2")
    grid = build_grid(GroupParams(2), 0.1, 1.0, 2, 2)
    with pytest.raises(ProfileError):
        synth_field(ProfileSpec("flat", modes=((MultiIndex.of(0), 1.0),)), grid, 2)
    with pytest.raises(ProfileError):
        synth_field(ProfileSpec("flat", modes=((MultiIndex.of(3, 0), 1.0),)), grid, 2)


def test_zero_data_give_zero_series():
    grid = build_grid(P1, 1e-3, 1.0, 4, 4)
    zero = synth_field(ProfileSpec("zero"), grid, 4)
    series = run_scenario(zero, zero, TIMES)
    for name in OBSERVABLES:
        assert not np.any(series[name])


def test_single_mode_hyperbolic_ratio():
    # one narrow panel around lambda_0 = 1/2 with mu = 1, so z = 1/2
    grid = build_grid(P1, 0.5 - 1e-9, 0.5 + 1e-9, 1, 1, symmetric=False)
    spec = ProfileSpec("flat", 1.0, (0.4, 0.6), modes=((MultiIndex.of(0), 1.0),))
    u0 = synth_field(spec, grid, 0)
    u1 = synth_field(ProfileSpec("zero", target="u1"), grid, 0)
    times = np.array([0.0, 1.0, math.pi, 5.0])
    series = run_scenario(u0, u1, times)
    ratio = series["u"] / series["u"][0]
    z = grid.nodes[0]
    w = math.sqrt(z - 0.25)
    expected = np.abs(np.exp(-times / 2) * (np.cos(w * times) + np.sin(w * times) / (2 * w)))
    np.testing.assert_allclose(ratio, expected, rtol=1e-12)
    assert ratio[2] == pytest.approx(math.exp(-math.pi / 2), rel=1e-8)


def test_flat_ground_mode_matches_watson_asymptotics():
    grid = build_grid(P1, 1e-9, 0.125, 40, 8, symmetric=False)
    spec = ProfileSpec("flat", 1.0, (0.0, 0.125), modes=((MultiIndex.of(0), 1.0),))
    u0 = synth_field(spec, grid, 0)
    u1 = synth_field(ProfileSpec("zero", target="u1"), grid, 0)
    times = np.array([1e3, 1e4])
    series = run_scenario(u0, u1, times)
    # ||u(t)||^2 ~ c_1 Gamma(2) / (2t)^2
    leading = P1.c_n / (2 * times) ** 2
    ratio = series["u"] ** 2 / leading
    assert ratio[1] == pytest.approx(1.0, abs=2e-3)
    assert abs(ratio[1] - 1) < abs(ratio[0] - 1)


def test_run_scenario_checks_inputs():
    g1 = build_grid(P1, 1e-3, 1.0, 4, 4)
    g2 = build_grid(P1, 1e-3, 2.0, 4, 4)
    a = synth_field(ProfileSpec("flat"), g1, 2)
    with pytest.raises(ValueError):
        run_scenario(a, synth_field(ProfileSpec("flat"), g2, 2), TIMES)
    with pytest.raises(ValueError):
        run_scenario(a, synth_field(ProfileSpec("flat"), g1, 3), TIMES)
    with pytest.raises(ValueError):
        run_scenario(a, a, [2.0, 1.0, 3.0])
    with pytest.raises(ValueError):
        run_scenario(a, a, [-1.0, 1.0])


def test_fit_of_exact_power_law():
    fit = fit_decay_exponent(synthetic_series((1 + TIMES) ** -2.0), "u", (100, 1000))
    assert fit.slope == pytest.approx(-2.0, abs=1e-12)
    assert fit.stderr == pytest.approx(0.0, abs=1e-12)


def test_fit_recovers_intercept():
    fit = fit_decay_exponent(synthetic_series(3 * (1 + TIMES) ** -1.0), "gradu", (100, 1000))
    assert fit.slope == pytest.approx(-1.0, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(3), abs=1e-12)
    assert fit.window == (100, 1000)


def test_fit_refusals():
    with pytest.raises(ValueError, match="at least 8"):
        fit_decay_exponent(synthetic_series((1 + TIMES) ** -1.0), "u", (500, 1000))
    zeros = synthetic_series(np.zeros_like(TIMES))
    with pytest.raises(ValueError, match="not positive"):
        fit_decay_exponent(zeros, "u", (100, 1000))


def test_series_needs_increasing_times():
    with pytest.raises(ValueError):
        synthetic_series(np.ones(3), times=[1.0, 1.0, 2.0])


@pytest.mark.parametrize("n, slopes", [(1, [-1.0, -1.5, -2.0, -2.0]), (2, [-1.5, -2.0, -2.5, -2.5])])
def test_expected_slopes(n, slopes):
    exp = expected_slopes(GroupParams(n))
    assert [exp[k] for k in ("u", "gradu", "dtu", "Tu")] == slopes


def test_flat_profile_rates(n1_flat):
    report = make_report(n1_flat, (100, 1000))
    check = verify_theorem(report, P1)
    assert check.passed
    assert report.fits["u"].slope == pytest.approx(-1.0, abs=0.05)
    assert all(f.stderr >= 0 for f in report.rows())


def test_rates_are_ordered(n1_flat):
    report = make_report(n1_flat, (100, 1000))
    s = {name: f.slope for name, f in report.fits.items()}
    assert s["dtu"] <= s["gradu"] <= s["u"]


def test_slope_check_needs_report(n1_flat):
    with pytest.raises(TypeError):
        verify_theorem(n1_flat, P1, "L1_and_L2")
    with pytest.raises(ValueError):
        verify_theorem(n1_flat, P1, "H1")


def test_failing_tolerance_is_reported(n1_flat):
    report = make_report(n1_flat, (100, 1000), tols={"u": 1e-6})
    assert report.fits["u"].passed is False
    assert not verify_theorem(report, P1).passed


def test_l2_check_needs_calibration_sample():
    with pytest.raises(ValueError):
        verify_theorem(synthetic_series(np.ones(4), times=[2.0, 3.0, 4.0, 5.0]), P1, "L2_only")


def test_l2_check_flags_growth():
    series = synthetic_series(np.linspace(1.0, 2.0, len(TIMES)))
    check = verify_theorem(series, P1, "L2_only")
    assert not check.details["u"]["pass"]
    assert check.details["u"]["worst_ratio"] == pytest.approx(2.0)


def test_bandlimited_l2_scenario_passes():
    grid = build_grid(P1, 0.05, 2.0, 24, 8)
    u0 = synth_field(ProfileSpec("bandlimited", 1.0, (0.05, 2.0)), grid, 32)
    u1 = synth_field(ProfileSpec("bandlimited", 1.0, (0.05, 2.0), target="u1"), grid, 32)
    check = verify_theorem(run_scenario(u0, u1, TIMES), P1, "L2_only")
    assert check.passed


def test_monotone_dissipation_in_elliptic_band():
    # every mode has z = mu |lambda| <= 9 * 0.025 < 1/4, and u1 = 0
    grid = build_grid(P1, 1e-6, 0.025, 12, 6)
    u0 = synth_field(ProfileSpec("flat", 1.0, (0.0, 0.025)), grid, 4)
    u1 = synth_field(ProfileSpec("zero", target="u1"), grid, 4)
    times = np.concatenate([[0.0], np.geomspace(0.01, 1e4, 80)])
    series = run_scenario(u0, u1, times)
    assert np.all(np.diff(series["u"]) <= 0)


band = st.tuples(st.floats(1e-3, 1.0), st.floats(1.2, 30.0)).map(lambda p: (p[0], p[0] * p[1]))


@given(band, st.sampled_from(["flat", "bandlimited"]), st.floats(-2, 2), st.floats(-2, 2),
       st.integers(1, 2))
def test_l2_data_bounds(support, kind, a0, a1, n):
    """Norm-level consequences of the per-mode bounds for L^2 data.

    ||u(t)|| <= ||u0|| + ||u1||, and the energy ||d_t u||^2 + ||grad u||^2 never
    exceeds its initial value ||u1||^2 + ||grad u0||^2.
    """
    params = GroupParams(n)
    grid = build_grid(params, support[0], support[1], 6, 4)
    u0 = synth_field(ProfileSpec(kind, a0, support), grid, 6)
    u1 = synth_field(ProfileSpec(kind, a1, support, target="u1"), grid, 6)
    times = np.concatenate([[0.0], np.geomspace(0.1, 1e3, 24)])
    series = run_scenario(u0, u1, times)
    slack = 1e-12 * (1 + series["u"][0] + series["dtu"][0] + series["gradu"][0])
    assert np.all(series["u"] <= weighted_norm(u0) + weighted_norm(u1) + slack)
    energy = series["dtu"] ** 2 + series["gradu"] ** 2
    assert np.all(np.diff(energy) <= slack ** 2 + 1e-12 * energy[0])
    assert energy[0] == pytest.approx(weighted_norm(u1) ** 2 + weighted_norm(u0, 1, 1) ** 2,
                                      rel=1e-12, abs=1e-300)


@given(st.floats(1e-3, 0.05), st.floats(0.1, 3.0))
def test_flat_profiles_decay_at_the_l1_rate(lo_scale, amplitude):
    # for a flat profile reaching down to 0 the u-norm decays like (1+t)^(-Q/4) whatever the amplitude
    grid = build_grid(P1, 1e-7, 0.125, 36, 8)
    u0 = synth_field(ProfileSpec("flat", amplitude, (0.0, 0.125)), grid, 8)
    u1 = synth_field(ProfileSpec("flat", lo_scale * amplitude, (0.0, 0.125), target="u1"), grid, 8)
    fit = fit_decay_exponent(run_scenario(u0, u1, TIMES), "u", (100, 1000))
    assert fit.slope == pytest.approx(-1.0, abs=0.05)
