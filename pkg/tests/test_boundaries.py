"""Closed-form squint boundaries against the brute-force phase oracle."""

import math

import numpy as np
import pytest

import oracles
from squintlab import (
    SPEED_OF_LIGHT,
    UNBOUNDED,
    ArrayGeometry,
    CarrierGrid,
    FieldModel,
    PathParams,
    SquintThresholds,
    antenna_boundary,
    boundary_bounds,
    boundary_coefficients,
    boundary_report,
    classify_path,
    freq_boundary,
    is_unbounded,
    max_distance_variation,
    max_squint_phase,
    near_field_threshold,
    near_field_threshold_approx,
    subband_phase_limit,
)

THR = SquintThresholds()


def make_geom(n, fc=7e9):
    return ArrayGeometry(n, fc)


def make_path(theta=0.3, d=40.0, r=0.0):
    return PathParams(1.0 + 0j, theta, d, r)


# ---------------------------------------------------------------------------
# distance variation and phase extremes
# ---------------------------------------------------------------------------


def test_single_antenna_has_zero_variation():
    geom = make_geom(1)
    assert max_distance_variation(geom, make_path()) == 0.0
    assert max_distance_variation(geom, make_path(), "far") == 0.0


@pytest.mark.parametrize("theta", [0.25, 0.5, 0.9])
def test_far_variation_is_linear_in_aperture(theta):
    geom = make_geom(513, 7e9)
    got = max_distance_variation(geom, make_path(theta=theta), "far")
    assert got == pytest.approx(512 * geom.spacing_m * theta / 2.0, rel=1e-15)
    # theta -> 1 limit is 128 wavelengths (~5.48 m at 7 GHz)
    limit = max_distance_variation(geom, make_path(theta=1 - 1e-12), "far")
    assert limit == pytest.approx(128 * geom.wavelength_m, rel=1e-9)


def test_near_variation_matches_elementwise_scan():
    geom = make_geom(1024, 7e9)
    path = make_path(theta=0.1, d=10.0)
    got = max_distance_variation(geom, path)
    want = oracles.max_range_spread(1024, 0.1, 10.0, geom.spacing_m)
    assert got == pytest.approx(want, rel=1e-12)
    assert got == pytest.approx(5.55, rel=2e-2)


@pytest.mark.parametrize("seed", range(5))
def test_variation_is_even_in_angle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 512))
    theta = float(rng.uniform(0.01, 0.99))
    d = float(rng.uniform(1.0, 300.0))
    geom = make_geom(n)
    for mode in ("near", "far"):
        assert max_distance_variation(geom, make_path(theta=theta, d=d), mode) == pytest.approx(
            max_distance_variation(geom, make_path(theta=-theta, d=d), mode), rel=1e-14
        )


def test_zero_bandwidth_limit_has_no_squint():
    geom = make_geom(256)
    grid = CarrierGrid(16, 1e-9)
    assert max_squint_phase(geom, grid, make_path()) < 1e-12


def test_broadside_far_mode_has_no_squint():
    geom = make_geom(256)
    grid = CarrierGrid.from_bandwidth(600e6, 16)
    assert max_squint_phase(geom, grid, make_path(theta=0.0), "far") == 0.0


def test_phase_extreme_matches_grid_oracle_after_rescale():
    geom = make_geom(512, 7e9)
    grid = CarrierGrid.from_bandwidth(300e6, 4096)
    path = make_path(theta=0.3, d=40.0)
    closed = max_squint_phase(geom, grid, path)
    grid_max = oracles.squint_phase_grid_max(512, 4096, 0.3, 40.0, 300e6, 7e9)
    assert grid_max == pytest.approx(closed * 4095 / 4096, rel=1e-9)


# ---------------------------------------------------------------------------
# frequency-domain boundary
# ---------------------------------------------------------------------------


def test_freq_boundary_bounds_match_published_numbers():
    geom = make_geom(512, 7e9)
    grid = CarrierGrid.from_bandwidth(300e6, 64)
    report = boundary_report(geom, grid, make_path(theta=0.3, d=40.0), THR)
    low = report.bounds["freq_near"].lower
    high = report.bounds["freq_near"].upper
    # angle->1 limit collapses to 4 (kappa_a+kappa_f) f_c / (N-1), exactly 7e9/511
    assert low == pytest.approx(7e9 / 511, rel=1e-12)
    assert low == pytest.approx(13.7e6, rel=1e-2)
    assert high == pytest.approx(200e6, rel=2e-2)


def test_freq_boundary_interpolates_between_its_bounds():
    geom = make_geom(512, 7e9)
    path = make_path(theta=0.999, d=40.0)
    value = freq_boundary(geom, path, THR)
    want = THR.total * SPEED_OF_LIGHT / oracles.max_range_spread(512, 0.999, 40.0, geom.spacing_m)
    assert value == pytest.approx(want, rel=1e-12)
    assert 7e9 / 511 < value < 200e6


def test_freq_boundary_definition_ties_to_distance_variation():
    geom = make_geom(512, 7e9)
    path = make_path(theta=0.42, d=33.0)
    want = THR.total * SPEED_OF_LIGHT / max_distance_variation(geom, path)
    assert freq_boundary(geom, path, THR) == pytest.approx(want, rel=1e-14)


def test_far_freq_boundary_is_unbounded_at_broadside():
    geom = make_geom(512)
    assert is_unbounded(freq_boundary(geom, make_path(theta=0.0), THR, "far"))
    assert not is_unbounded(freq_boundary(geom, make_path(theta=0.0), THR, "near"))


# ---------------------------------------------------------------------------
# antenna-domain boundary
# ---------------------------------------------------------------------------


def test_antenna_boundary_lower_bound_is_angle_one_limit():
    geom = make_geom(64, 7e9)
    grid = CarrierGrid.from_bandwidth(300e6, 64)
    report = boundary_report(geom, grid, make_path(theta=0.5, d=40.0), THR)
    # 4 (kappa_a+kappa_f) f_c / B + 1 = 7e9/3e8 + 1, c cancels exactly
    assert report.bounds["antenna_near"].lower == pytest.approx(7e9 / 3e8 + 1, rel=1e-12)


def test_antenna_boundary_matches_brute_force_largest_n():
    value = antenna_boundary(300e6, make_path(theta=0.3, d=40.0), 7e9, THR)
    assert value == pytest.approx(76.7, rel=5e-3)
    # largest integer below the closed form admits the phase budget; the next
    # integer violates it (scan on the closed-form phase extreme)
    grid = CarrierGrid.from_bandwidth(300e6, 64)
    cap = THR.total * math.pi
    below = max_squint_phase(make_geom(int(value)), grid, make_path(theta=0.3, d=40.0))
    above = max_squint_phase(make_geom(int(value) + 1), grid, make_path(theta=0.3, d=40.0))
    assert below < cap <= above
    oracle_n = oracles.largest_admissible_antennas(0.3, 40.0, 300e6, 7e9, 4096, cap)
    assert abs(oracle_n - int(value)) <= 1


def test_far_antenna_boundary_closed_form():
    got = antenna_boundary(300e6, make_path(theta=0.3), 7e9, THR, "far")
    assert got == pytest.approx(7e9 / (3e8 * 0.3) + 1, rel=1e-12)
    assert got == pytest.approx(78.8, rel=1e-3)


def test_far_antenna_boundary_unbounded_at_broadside():
    assert is_unbounded(antenna_boundary(300e6, make_path(theta=0.0), 7e9, THR, "far"))


def test_antenna_boundary_rejects_nonpositive_bandwidth():
    with pytest.raises(ValueError):
        antenna_boundary(0.0, make_path(), 7e9, THR)


def test_coefficients_follow_their_definitions():
    path = make_path(theta=0.3, d=40.0)
    co = boundary_coefficients(300e6, path, 7e9, THR)
    lam = SPEED_OF_LIGHT / 7e9
    s = lam / 2
    kc = THR.total * SPEED_OF_LIGHT
    assert co.a1 == pytest.approx(s * s / 4, rel=1e-15)
    assert co.a4 == pytest.approx(40.0 * s, rel=1e-15)
    assert co.a2 == pytest.approx(co.a4 * 0.3, rel=1e-15)
    assert co.a3 == pytest.approx((kc * kc + 2 * kc * 40.0 * 300e6) / 300e6**2, rel=1e-15)
    ka_c = THR.kappa_a * SPEED_OF_LIGHT
    assert co.a5 == pytest.approx((ka_c * ka_c + 4 * ka_c * 40.0 * 7e9) / (4 * 7e9 * 7e9), rel=1e-15)


# ---------------------------------------------------------------------------
# near-field threshold
# ---------------------------------------------------------------------------


def test_threshold_lower_bound_is_angle_one_limit():
    geom = make_geom(64, 7e9)
    grid = CarrierGrid.from_bandwidth(300e6, 64)
    report = boundary_report(geom, grid, make_path(theta=0.9, d=40.0), THR)
    assert report.bounds["near_threshold"].lower == pytest.approx(1.25, rel=1e-12)


def test_threshold_matches_smallest_n_scan():
    value = near_field_threshold(make_path(theta=0.3, d=40.0), 7e9, THR.kappa_a)
    assert value == pytest.approx(1.83, rel=5e-3)
    assert oracles.smallest_near_antennas(0.3, 40.0, 7e9, THR.kappa_a) == math.ceil(value)


def test_threshold_at_broadside_equals_its_upper_bound():
    geom = make_geom(64, 7e9)
    grid = CarrierGrid.from_bandwidth(300e6, 64)
    path = make_path(theta=1e-300, d=40.0)
    report = boundary_report(geom, grid, path, THR)
    co = report.coeffs
    assert report.near_field_threshold == pytest.approx(
        math.sqrt(co.a5 / co.a1) + 1, rel=1e-9
    )
    assert report.bounds["near_threshold"].upper == pytest.approx(
        math.sqrt(co.a5 / co.a1) + 1, rel=1e-12
    )


@pytest.mark.parametrize("seed", range(5))
def test_threshold_approximation_tracks_closed_form(seed):
    rng = np.random.default_rng(40 + seed)
    for _ in range(50):
        theta = float(rng.uniform(0.1, 0.999))
        d = float(rng.uniform(10.0, 500.0))
        exact = near_field_threshold(make_path(theta=theta, d=d), 7e9, THR.kappa_a)
        approx = near_field_threshold_approx(theta, THR.kappa_a)
        assert approx == pytest.approx(2 * THR.kappa_a / theta + 1, rel=1e-14)
        assert abs(approx - exact) / exact < 0.10


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


def test_classification_covers_all_three_regimes():
    grid = CarrierGrid.from_bandwidth(300e6, 64)
    path = make_path(theta=0.3, d=40.0)
    assert classify_path(make_geom(8192), grid, path, THR) is FieldModel.WIDEBAND_NEAR
    assert classify_path(make_geom(1), grid, path, THR) is FieldModel.FAR
    narrow = CarrierGrid.from_bandwidth(1e6, 64)
    assert classify_path(make_geom(16), narrow, path, THR) is FieldModel.NARROWBAND_NEAR


def test_wideband_test_precedes_the_near_far_split():
    # Huge bandwidth marks even a tiny array wideband-near before the
    # near-field threshold can demote it to far-field.
    wide = CarrierGrid.from_bandwidth(8e10, 16)
    path = make_path(theta=0.1, d=10.0)
    geom = make_geom(2)
    assert near_field_threshold(path, 7e9, THR.kappa_a) > 2
    assert classify_path(geom, wide, path, THR) is FieldModel.WIDEBAND_NEAR


# ---------------------------------------------------------------------------
# sub-band delay-spread limit
# ---------------------------------------------------------------------------


def test_subband_limit_single_path_is_unbounded():
    assert is_unbounded(subband_phase_limit([make_path()], THR.kappa_f))


def test_subband_limit_two_paths():
    paths = [make_path(d=30.0, r=10.0), make_path(d=50.0, r=10.0)]
    got = subband_phase_limit(paths, THR.kappa_f)
    assert got == pytest.approx(0.125 * SPEED_OF_LIGHT / 10.0, rel=1e-12)
    assert got == pytest.approx(3.75e6, rel=1e-2)


def test_subband_limit_identical_ranges_is_unbounded():
    paths = [make_path(d=30.0, r=20.0), make_path(d=40.0, r=10.0)]
    assert is_unbounded(subband_phase_limit(paths, THR.kappa_f))


def test_subband_limit_rejects_empty_list():
    with pytest.raises(ValueError):
        subband_phase_limit([], THR.kappa_f)


# ---------------------------------------------------------------------------
# ordering propositions and bound sandwiches
# ---------------------------------------------------------------------------


def _theta_grid():
    return np.linspace(1e-3, 0.999, 1000)


def test_near_boundaries_strictly_decrease_in_angle():
    geom = make_geom(512, 7e9)
    freqs = [freq_boundary(geom, make_path(theta=t, d=40.0), THR) for t in _theta_grid()]
    ants = [antenna_boundary(300e6, make_path(theta=t, d=40.0), 7e9, THR) for t in _theta_grid()]
    assert all(b < a for a, b in zip(freqs, freqs[1:]))
    assert all(b < a for a, b in zip(ants, ants[1:]))


def test_far_boundaries_strictly_decrease_in_angle():
    geom = make_geom(512, 7e9)
    freqs = [freq_boundary(geom, make_path(theta=t, d=40.0), THR, "far") for t in _theta_grid()]
    ants = [antenna_boundary(300e6, make_path(theta=t), 7e9, THR, "far") for t in _theta_grid()]
    assert all(b < a for a, b in zip(freqs, freqs[1:]))
    assert all(b < a for a, b in zip(ants, ants[1:]))


def test_near_boundary_grows_with_distance():
    vals = [
        freq_boundary(make_geom(512), make_path(theta=0.3, d=d), THR)
        for d in np.linspace(1.0, 500.0, 200)
    ]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("seed", range(5))
def test_near_boundaries_are_tighter_than_far(seed):
    rng = np.random.default_rng(60 + seed)
    geom = make_geom(512, 7e9)
    for _ in range(100):
        theta = float(rng.uniform(1e-3, 0.999)) * (1 if rng.random() < 0.5 else -1)
        d = float(rng.uniform(1.0, 500.0))
        path = make_path(theta=theta, d=d)
        assert freq_boundary(geom, path, THR) < freq_boundary(geom, path, THR, "far")
        near_n = antenna_boundary(300e6, path, 7e9, THR)
        far_n = antenna_boundary(300e6, path, 7e9, THR, "far")
        assert near_n < far_n


@pytest.mark.parametrize("seed", range(5))
def test_bound_sandwich_holds_for_all_rows(seed):
    rng = np.random.default_rng(80 + seed)
    for _ in range(50):
        theta = float(rng.uniform(1e-3, 0.999))
        d = float(rng.uniform(1.0, 500.0))
        n = int(rng.integers(2, 2048))
        b = float(rng.uniform(1e6, 2e9))
        geom = make_geom(n)
        grid = CarrierGrid.from_bandwidth(b, 16)
        report = boundary_report(geom, grid, make_path(theta=theta, d=d), THR)
        values = {
            "freq_near": report.freq_boundary_near_hz,
            "antenna_near": report.antenna_boundary_near,
            "freq_far": report.freq_boundary_far_hz,
            "antenna_far": report.antenna_boundary_far,
            "near_threshold": report.near_field_threshold,
        }
        for name, value in values.items():
            bound = report.bounds[name]
            assert bound.lower <= value
            assert value <= bound.upper or is_unbounded(bound.upper)


@pytest.mark.parametrize("seed", range(4))
def test_boundaries_are_even_in_angle(seed):
    rng = np.random.default_rng(90 + seed)
    geom = make_geom(256)
    for _ in range(25):
        theta = float(rng.uniform(1e-3, 0.999))
        d = float(rng.uniform(1.0, 500.0))
        plus, minus = make_path(theta=theta, d=d), make_path(theta=-theta, d=d)
        assert freq_boundary(geom, plus, THR) == pytest.approx(
            freq_boundary(geom, minus, THR), rel=1e-14
        )
        assert antenna_boundary(3e8, plus, 7e9, THR) == pytest.approx(
            antenna_boundary(3e8, minus, 7e9, THR), rel=1e-14
        )
        assert near_field_threshold(plus, 7e9, THR.kappa_a) == pytest.approx(
            near_field_threshold(minus, 7e9, THR.kappa_a), rel=1e-14
        )


def test_threshold_precedes_both_wideband_boundaries():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        theta = float(rng.uniform(1e-3, 0.999)) * (1 if rng.random() < 0.5 else -1)
        d = float(rng.uniform(1.0, 500.0))
        fc = float(rng.uniform(6.4e9, 7.2e9))
        b = float(rng.uniform(1e5, fc * 0.99))
        path = make_path(theta=theta, d=d)
        tilde = near_field_threshold(path, fc, THR.kappa_a)
        assert tilde < antenna_boundary(b, path, fc, THR)
        assert tilde < antenna_boundary(b, path, fc, THR, "far")
        # consequence: an array strictly below the threshold can only be
        # squint-limited through the bandwidth clause, never the antenna one
        n_small = max(math.floor(tilde) - 1, 1)
        geom = ArrayGeometry(n_small, fc)
        if b < freq_boundary(geom, path, THR):
            grid = CarrierGrid.from_bandwidth(b, 4)
            assert classify_path(geom, grid, path, THR) is FieldModel.FAR


def test_bounds_helper_matches_report_field():
    geom = make_geom(512, 7e9)
    grid = CarrierGrid.from_bandwidth(300e6, 64)
    path = make_path(theta=0.3, d=40.0)
    direct = boundary_bounds(geom, grid, path, THR)
    report = boundary_report(geom, grid, path, THR)
    assert direct == report.bounds


def test_unbounded_value_orders_above_floats():
    assert UNBOUNDED > 1e300
    assert not UNBOUNDED < 1e300
    assert min(5.0, UNBOUNDED) == 5.0
    assert UNBOUNDED == UNBOUNDED
    assert is_unbounded(UNBOUNDED)
