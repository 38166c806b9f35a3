"""Ray-trace oracle: geometry, amplitudes, and trace generation."""

import math

import numpy as np
import pytest

from tracechan import (
    Environment,
    PathType,
    Rectangle,
    RtScenario,
    fresnel_parameter,
    generate_trace,
    knife_edge_loss_db,
    los_blocked,
    linear_trajectory,
    static_trajectory,
    trace_diffraction,
    trace_reflections,
    validate_trace,
)
from tracechan.raytrace import trace_los, trace_link_snapshot

F_C = 28e9
LAM = 299792458.0 / F_C

P_TX = np.array([0.0, 0.0, 1.0])
P_RX = np.array([10.0, 0.0, 1.0])

WALL_Y5 = Rectangle([-10.0, 5.0, 0.0], [30.0, 0.0, 0.0], [0.0, 0.0, 10.0])


def test_rectangle_validation():
    with pytest.raises(ValueError, match="parallel"):
        Rectangle([0, 0, 0], [1, 0, 0], [2, 0, 0])
    with pytest.raises(ValueError, match="gamma"):
        Rectangle([0, 0, 0], [1, 0, 0], [0, 1, 0], gamma=1.5)
    with pytest.raises(ValueError, match="edge"):
        Rectangle([0, 0, 0], [1, 0, 0], [0, 1, 0], diffracting_edges=(4,))


def test_rectangle_edges_form_perimeter():
    rect = Rectangle([0, 0, 0], [2, 0, 0], [0, 0, 3])
    e0 = rect.edge_points(0)
    e3 = rect.edge_points(3)
    np.testing.assert_allclose(e0[0], [0, 0, 0])
    np.testing.assert_allclose(e0[1], [2, 0, 0])
    np.testing.assert_allclose(e3[0], [0, 0, 3])
    np.testing.assert_allclose(e3[1], [0, 0, 0])


def test_los_blocked_basic():
    blocker = Rectangle([2.0, -2.0, 0.0], [0.0, 4.0, 0.0], [0.0, 0.0, 4.0])
    env = Environment((blocker,))
    assert los_blocked(P_TX, P_RX, env)
    assert not los_blocked(P_TX, np.array([-5.0, 0.0, 1.0]), env)
    # endpoint resting on the plane does not occlude
    on_plane = np.array([2.0, 0.0, 1.0])
    assert not los_blocked(on_plane, np.array([1.0, 0.0, 1.0]), Environment((blocker,)))


def test_free_space_gain_and_delay():
    path = trace_los(np.zeros(3), np.array([100.0, 0.0, 0.0]), F_C)
    assert path is not None
    gain_db = 20.0 * math.log10(path.amp_scale * LAM / (4 * math.pi * path.length))
    # record-level check instead: build through the snapshot helper
    paths = trace_link_snapshot(np.zeros(3), np.array([100.0, 0.0, 0.0]), Environment(), F_C)
    assert len(paths) == 1 and paths[0].path_type is PathType.LOS


def test_free_space_record_numbers():
    tx = static_trajectory([0, 0, 0], 0.0, 1.0, 1)
    rx = static_trajectory([100.0, 0, 0], 0.0, 1.0, 1)
    scn = RtScenario(Environment(), F_C, {0: tx, 1: rx}, ((0, 1),))
    rec = generate_trace(scn).records[0]
    assert 20.0 * math.log10(rec.gain_mag) == pytest.approx(-101.3909, abs=5e-4)
    assert rec.delay == pytest.approx(333.564e-9, abs=1e-12)
    assert (rec.aod_az, rec.aod_zen) == (0.0, 90.0)
    assert (rec.aoa_az, rec.aoa_zen) == (-180.0, 90.0)
    # total phase at the carrier: -2 pi L / lambda, wrapped
    want = -2 * math.pi * 100.0 / LAM
    want = math.remainder(want, 2 * math.pi)
    assert rec.phase == pytest.approx(want, abs=1e-6)


def test_single_wall_reflection_geometry():
    env = Environment((WALL_Y5,))
    paths = trace_reflections(P_TX, P_RX, env, F_C, max_order=1)
    assert len(paths) == 1
    p = paths[0]
    assert p.length == pytest.approx(math.sqrt(10**2 + 10**2), rel=1e-12)
    assert p.amp_scale == pytest.approx(0.7)
    # departure toward the bounce point at (5, 5, 1): azimuth 45 deg
    az = math.degrees(math.atan2(p.first_leg[1], p.first_leg[0]))
    assert az == pytest.approx(45.0, abs=1e-9)


def test_reflection_skipped_when_point_off_face():
    short_wall = Rectangle([-10.0, 5.0, 0.0], [12.0, 0.0, 0.0], [0.0, 0.0, 10.0])
    # face ends at x = 2; the specular point x = 5 misses it
    paths = trace_reflections(P_TX, P_RX, Environment((short_wall,)), F_C, max_order=1)
    assert paths == []


def test_reflection_blocked_by_other_face():
    # the wall bounce leg tx -> (5, 5, 1) crosses y = 2 at (2, 2, 1)
    blocker = Rectangle([1.0, 2.0, 0.0], [2.0, 0.0, 0.0], [0.0, 0.0, 10.0])
    env = Environment((WALL_Y5, blocker))
    paths = trace_reflections(P_TX, P_RX, env, F_C, max_order=1)
    assert paths == []


def test_parallel_walls_multi_order():
    lo = Rectangle([-10.0, -5.0, 0.0], [40.0, 0.0, 0.0], [0.0, 0.0, 10.0])
    hi = Rectangle([-10.0, 5.0, 0.0], [40.0, 0.0, 0.0], [0.0, 0.0, 10.0])
    env = Environment((lo, hi))
    rx = np.array([20.0, 0.0, 1.0])
    paths = trace_reflections(P_TX, rx, env, F_C, max_order=4)
    # two mirror sequences per order in a corridor
    assert len(paths) == 8
    lengths = sorted(p.length for p in paths)
    assert lengths[0] == pytest.approx(math.sqrt(20**2 + 10**2), rel=1e-12)
    assert any(
        L == pytest.approx(math.sqrt(20**2 + 20**2), rel=1e-12) for L in lengths
    )
    orders = sorted(round(math.log(p.amp_scale, 0.7)) for p in paths)
    assert orders == [1, 1, 2, 2, 3, 3, 4, 4]


def test_reflection_longer_than_los():
    env = Environment((WALL_Y5,))
    los = trace_los(P_TX, P_RX, F_C, env)
    for p in trace_reflections(P_TX, P_RX, env, F_C):
        assert p.length > los.length


def test_knife_edge_loss_values():
    assert knife_edge_loss_db(0.0) == pytest.approx(6.0329, abs=5e-4)
    assert knife_edge_loss_db(2.4) == pytest.approx(20.5393, abs=5e-4)
    assert knife_edge_loss_db(-0.78) == 0.0
    assert knife_edge_loss_db(-5.0) == 0.0
    # near-continuous at the knee: the step is a few thousandths of a dB
    assert knife_edge_loss_db(-0.78 + 1e-9) == pytest.approx(0.0, abs=0.01)
    # monotone increasing into shadow
    assert knife_edge_loss_db(3.0) > knife_edge_loss_db(1.0) > knife_edge_loss_db(0.0)


def test_fresnel_parameter_value():
    assert fresnel_parameter(1.0, 50.0, 50.0, 0.01) == pytest.approx(math.sqrt(8.0), rel=1e-12)
    assert fresnel_parameter(-1.0, 50.0, 50.0, 0.01) == pytest.approx(-math.sqrt(8.0), rel=1e-12)


SCREEN = Rectangle(
    [5.0, -20.0, 0.0], [0.0, 40.0, 0.0], [0.0, 0.0, 10.0],
    diffracting_edges=(2,),  # top edge at z = 10
)


def test_diffraction_only_when_blocked():
    env = Environment((SCREEN,))
    rx_high = np.array([10.0, 0.0, 25.0])  # ray clears the screen top
    assert not los_blocked(P_TX, rx_high, env)
    assert trace_diffraction(P_TX, rx_high, env, F_C) == []
    rx_low = np.array([10.0, 0.0, 1.0])
    paths = trace_diffraction(P_TX, rx_low, env, F_C)
    assert len(paths) == 1
    assert paths[0].path_type is PathType.DIFFRACTION


def test_diffraction_point_is_fermat_minimum():
    env = Environment((SCREEN,))
    rx = np.array([10.0, 3.0, 1.0])
    p = trace_diffraction(P_TX, rx, env, F_C)[0]
    apex = P_TX + p.first_leg
    assert apex[2] == pytest.approx(10.0, abs=1e-6)  # on the top edge
    e0, e1 = SCREEN.edge_points(2)
    edge_dir = (e1 - e0) / np.linalg.norm(e1 - e0)
    for eps in (-0.01, 0.01):
        moved = apex + eps * edge_dir
        perturbed = np.linalg.norm(moved - P_TX) + np.linalg.norm(rx - moved)
        assert perturbed >= p.length - 1e-12


def test_diffraction_loss_applied():
    env = Environment((SCREEN,))
    rx = np.array([10.0, 0.0, 1.0])
    p = trace_diffraction(P_TX, rx, env, F_C)[0]
    # deep shadow here: amp well below the J(0) half-plane value
    assert 0.0 < p.amp_scale < 10 ** (-6.0329 / 20.0)
    assert p.length >= np.linalg.norm(rx - P_TX)


def test_diffraction_grazing_edge_no_loss():
    # the marked face does not block; another face does. h goes negative and
    # for a clearly grazing edge the knife-edge loss vanishes.
    side = Rectangle(
        [5.0, -30.0, 0.0], [0.0, 20.0, 0.0], [0.0, 0.0, 10.0],
        diffracting_edges=(1,),  # vertical edge at y = -10, 10 m off the ray
    )
    blocker = Rectangle([5.0, -2.0, 0.0], [0.0, 4.0, 0.0], [0.0, 0.0, 4.0])
    env = Environment((side, blocker))
    rx = np.array([10.0, 0.0, 1.0])
    paths = trace_diffraction(P_TX, rx, env, F_C)
    assert len(paths) == 1
    assert paths[0].amp_scale == pytest.approx(1.0)


def test_reciprocity_swaps_departure_and_arrival():
    wall = Rectangle([2.0, 4.0, -3.0], [6.0, 0.5, 0.0], [0.0, 0.0, 12.0], gamma=0.6)
    screen = Rectangle(
        [4.0, -6.0, 0.0], [3.0, 12.0, 0.0], [0.0, 0.0, 7.0], diffracting_edges=(1, 3)
    )
    env = Environment((wall, screen))
    a = np.array([0.0, 0.3, 1.2])
    b = np.array([9.0, -0.4, 2.0])

    def records(p, q):
        tx = static_trajectory(p, 0.0, 1.0, 1)
        rx = static_trajectory(q, 0.0, 1.0, 1)
        scn = RtScenario(env, F_C, {0: tx, 1: rx}, ((0, 1),))
        return sorted(generate_trace(scn).records, key=lambda r: (r.path_type.value, r.delay))

    fwd = records(a, b)
    rev = records(b, a)
    assert [r.path_type for r in fwd] == [r.path_type for r in rev]
    for f, r in zip(fwd, rev):
        assert f.delay == pytest.approx(r.delay, abs=1e-15)
        assert f.gain_mag == pytest.approx(r.gain_mag, rel=1e-9)
        assert f.phase == pytest.approx(r.phase, abs=1e-6)
        assert f.aod_az == pytest.approx(r.aoa_az, abs=1e-9)
        assert f.aod_zen == pytest.approx(r.aoa_zen, abs=1e-9)
        assert f.aoa_az == pytest.approx(r.aod_az, abs=1e-9)
        assert f.aoa_zen == pytest.approx(r.aod_zen, abs=1e-9)


def test_snapshot_mechanism_precedence():
    env = Environment((WALL_Y5,))
    paths = trace_link_snapshot(P_TX, P_RX, env, F_C)
    types = [p.path_type for p in paths]
    assert types[0] is PathType.LOS
    assert PathType.REFLECTION in types
    assert PathType.DIFFRACTION not in types  # LoS present, no diffraction emitted


def test_generated_trace_validates_clean():
    wall = Rectangle([10.0, 5.0, 0.0], [0.0, 55.0, 0.0], [0.0, 0.0, 20.0],
                     diffracting_edges=(3,))
    street = Rectangle([10.0, 5.0, 0.0], [50.0, 0.0, 0.0], [0.0, 0.0, 20.0])
    env = Environment((wall, street))
    tx = static_trajectory([40.0, 0.0, 10.0], 0.0, 0.5, 20)
    rx = linear_trajectory([7.0, 20.0, 1.5], [0.0, -1.5, 0.0], 0.0, 0.5, 20)
    scn = RtScenario(env, F_C, {0: tx, 1: rx}, ((0, 1),))
    trace = generate_trace(scn)
    assert validate_trace(trace).ok
    for t in trace.snapshot_times(0, 1):
        group = trace.group(t, 0, 1)
        assert [r.path_id for r in group] == list(range(len(group)))
        has_los = any(r.path_type is PathType.LOS for r in group)
        has_diff = any(r.path_type is PathType.DIFFRACTION for r in group)
        assert not (has_los and has_diff)


def test_scenario_validation():
    t1 = static_trajectory([0, 0, 0], 0.0, 0.1, 5)
    t2 = static_trajectory([1, 0, 0], 0.0, 0.2, 5)
    with pytest.raises(ValueError, match="time grid"):
        RtScenario(Environment(), F_C, {0: t1, 1: t2}, ((0, 1),))
    with pytest.raises(ValueError, match="no trajectory"):
        RtScenario(Environment(), F_C, {0: t1}, ((0, 1),))
    with pytest.raises(ValueError, match="at least one"):
        RtScenario(Environment(), F_C, {}, ())
