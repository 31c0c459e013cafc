import math

import numpy as np
import pytest

from corridorcov.defaults import reference_scenario
from corridorcov.geometry import borderline_geometry
from corridorcov.oracle import (
    Association,
    OracleAssumptions,
    coverage_by_quadrature,
    coverage_with_refinement,
    evaluate_sinr,
    point_sinr,
    received_powers,
)
from corridorcov.propagation import InterferenceMode

D2R = math.pi / 180.0


def test_default_bs_layout():
    s = reference_scenario(13, 40)
    a = OracleAssumptions()
    assert a.resolve_positions(s) == (-1000.0, 0.0, 1000.0, 2000.0)
    with pytest.raises(ValueError):
        OracleAssumptions(bs_positions=(0.0,)).resolve_positions(s)
    with pytest.raises(ValueError):
        OracleAssumptions(bs_positions=(0.0, 0.0)).resolve_positions(s)


def test_midpoint_symmetry():
    # equidistant from BS-1/BS-2 at the half-region edge: equal powers,
    # SumAll SINR <= 1 when both lobes cover the point
    s = reference_scenario(13, 40)
    a = OracleAssumptions(interference=InterferenceMode.SUM_ALL,
                          include_noise=False)
    powers, _ = received_powers(500.0, 200.0, s, a)
    assert powers[1, 0] == pytest.approx(powers[2, 0], rel=1e-12)
    assert powers[1, 0] > 0
    _, val = evaluate_sinr(500.0, 200.0, s, a)
    assert val[0] <= 1.0


def test_borderline_point_recovers_threshold():
    # at the first border's top endpoint, noiseless dominant-only SINR == tau
    s = reference_scenario(13, 40)
    b = borderline_geometry(s)
    a = OracleAssumptions(include_noise=False)
    serving, v = point_sinr(b.d3, 300.0, s, a)
    assert serving == 1  # BS-1 at x=0
    assert v == pytest.approx(s.tau, rel=1e-6)


def test_gain_support_zeroes_power():
    # elevation 56.3 degrees from BS-1 is outside its [8, 48] lobe
    s = reference_scenario(8, 40)
    powers, _ = received_powers(100.0, 150.0, s, OracleAssumptions())
    assert powers[1, 0] == 0.0
    assert powers[2, 0] > 0.0  # BS-2 sees the point at a low elevation


def test_no_lobe_coverage_gives_zero():
    # lobes end below every corridor elevation: p_in == 0 and points report
    # zero SINR with nearest serving fallback
    s = reference_scenario(1.0, 1.5)
    assert coverage_by_quadrature(s, OracleAssumptions(), 64, 64) == 0.0
    serving, v = point_sinr(250.0, 200.0, s, OracleAssumptions())
    assert v == 0.0
    assert serving == 1  # nearest is BS-1


def test_strongest_covers_superset_of_nearest():
    s = reference_scenario(10, 40)
    xs = np.linspace(0.5, 499.5, 200)
    zs = np.linspace(100.5, 299.5, 120)
    xx, zz = np.meshgrid(xs, zs)
    a_s = OracleAssumptions(association=Association.STRONGEST,
                            interference=InterferenceMode.SUM_ALL)
    a_n = OracleAssumptions(association=Association.NEAREST,
                            interference=InterferenceMode.SUM_ALL)
    _, v_s = evaluate_sinr(xx.ravel(), zz.ravel(), s, a_s)
    _, v_n = evaluate_sinr(xx.ravel(), zz.ravel(), s, a_n)
    assert np.all(v_s >= v_n)  # pointwise dominance
    assert np.all((v_s >= s.tau) | ~(v_n >= s.tau))  # membership superset


def test_refinement_stability():
    s = reference_scenario(13, 40)
    p, p2, delta = coverage_with_refinement(s, OracleAssumptions(), 1000, 1000)
    assert delta <= 0.005
    assert 0.0 <= p <= 1.0


def test_quadrature_grid_floor():
    s = reference_scenario(13, 40)
    with pytest.raises(ValueError):
        coverage_by_quadrature(s, OracleAssumptions(), 32, 64)


def test_quadrature_deterministic():
    s = reference_scenario(17, 40)
    a = OracleAssumptions()
    assert (coverage_by_quadrature(s, a, 128, 128)
            == coverage_by_quadrature(s, a, 128, 128))


def test_borderline_recovery_within_half_db():
    # midpoints within one cell of the analytical borders stay within
    # 0.5 dB of the threshold under dominant/noiseless/rectangular
    # assumptions, inside the beam-overlap region the border describes
    s = reference_scenario(13, 40)
    b = borderline_geometry(s)
    a = OracleAssumptions(include_noise=False)
    beam = a.resolve_beam(s)
    hs = np.linspace(s.h1 + 0.5, s.h2 - 0.5, 400)

    # first border: serving BS-1, interferer BS-2, both lobes active
    for off in (-1.0, 1.0):
        xq = b.d2 + hs * (b.d3 - b.d2) / s.h2 + off
        t1 = np.arctan2(hs, np.abs(xq))
        t2 = np.arctan2(hs, np.abs(xq - s.d1))
        sel = (beam.gain(t1) > 0) & (beam.gain(t2) > 0)
        _, v = evaluate_sinr(xq, hs, s, a)
        assert np.all(np.abs(10 * np.log10(v[sel]) - s.tau_db) <= 0.5)

    # second border: serving BS-2 (above BS-1's lobe), interferer BS-3
    for off in (-1.0, 1.0):
        xq = b.d4 + hs * (b.d5 - b.d4) / s.h2 + off
        t1 = np.arctan2(hs, np.abs(xq))
        t2 = np.arctan2(hs, np.abs(xq - s.d1))
        t3 = np.arctan2(hs, np.abs(xq + s.d1))
        sel = (beam.gain(t1) == 0) & (beam.gain(t2) > 0) & (beam.gain(t3) > 0)
        assert np.count_nonzero(sel) > 10
        _, v = evaluate_sinr(xq, hs, s, a)
        assert np.all(np.abs(10 * np.log10(v[sel]) - s.tau_db) <= 0.5)


def test_custom_bs_positions():
    # dropping BS-4 moves fourth-station interference out of the picture
    s = reference_scenario(13, 40)
    a3 = OracleAssumptions(bs_positions=(-s.d1, 0.0, s.d1))
    p3 = coverage_by_quadrature(s, a3, 256, 256)
    p4 = coverage_by_quadrature(s, OracleAssumptions(), 256, 256)
    assert p3 >= p4  # removing an interferer cannot reduce coverage
