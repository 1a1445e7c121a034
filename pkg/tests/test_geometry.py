import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swarm_isac.config import baseline_scenario
from swarm_isac.errors import GeometryError
from swarm_isac.geometry import SPEED_OF_LIGHT, build_layout


def planar_distance(p, q):
    return math.hypot(p[0] - q[0], p[1] - q[1])


def test_repeater_distances_table1(baseline):
    s, lay = baseline
    assert s.d == 8.0
    assert lay.l_An[0] == 250.0
    assert lay.l_An[-1] == 642.0
    np.testing.assert_allclose(lay.l_An, 250.0 + 8.0 * np.arange(50))


def test_single_repeater_has_zero_coupling_matrix():
    lay = build_layout(baseline_scenario(N=1))
    assert lay.l_nnp.shape == (1, 1)
    assert lay.l_nnp[0, 0] == 0.0


def test_drone_to_first_repeater_matches_independent_distance(baseline):
    s, lay = baseline
    drone = (500 * math.cos(math.pi / 6), 500 * math.sin(math.pi / 6))
    expected = planar_distance(drone, (250.0, 0.0))
    assert lay.l_Dn[0] == pytest.approx(expected, rel=1e-14)
    assert lay.l_Dn[0] == pytest.approx(309.82841873186896, rel=1e-12)


def test_drone_at_range_and_angle(baseline):
    s, lay = baseline
    assert np.linalg.norm(lay.drone_position - lay.ap_position) == pytest.approx(s.l_AD)
    ang = math.atan2(lay.drone_position[1], lay.drone_position[0])
    assert ang == pytest.approx(s.theta)


def test_wavelength_is_c_over_fc(baseline):
    s, _ = baseline
    assert s.wavelength == SPEED_OF_LIGHT / 15e9


def test_coupling_matrix_symmetric_zero_diagonal(baseline):
    _, lay = baseline
    assert np.array_equal(lay.l_nnp, lay.l_nnp.T)
    assert np.all(np.diag(lay.l_nnp) == 0)
    n, m = 3, 17
    assert lay.l_nnp[n, m] == abs(n - m) * 8.0


def test_rejects_nonpositive_spacing():
    with pytest.raises(GeometryError):
        baseline_scenario(N=3, d_m=0.0001).with_(d=0.0)


def test_no_repeaters_layout():
    lay = build_layout(baseline_scenario(N=0))
    assert lay.l_An.shape == (0,) and lay.l_nnp.shape == (0, 0)


@settings(max_examples=60, deadline=None)
@given(
    N=st.integers(1, 30),
    l_AD=st.floats(1.0, 2000.0),
    l_A1=st.floats(1.0, 500.0),
    d=st.floats(0.1, 50.0),
    theta=st.floats(0.0, math.pi),
)
def test_triangle_inequality(N, l_AD, l_A1, d, theta):
    s = baseline_scenario(N=N, l_AD_m=l_AD, l_A1_m=l_A1, d_m=d, theta_rad=theta)
    lay = build_layout(s)
    tol = 1e-9 * (l_AD + lay.l_An)
    assert np.all(np.abs(l_AD - lay.l_An) <= lay.l_Dn + tol)
    assert np.all(lay.l_Dn <= l_AD + lay.l_An + tol)


def test_permuting_repeaters_permutes_coupling(baseline):
    _, lay = baseline
    perm = np.random.default_rng(0).permutation(lay.l_An.size)
    pos = lay.repeater_positions[perm]
    direct = np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=2)
    np.testing.assert_allclose(lay.l_nnp[np.ix_(perm, perm)], direct, atol=1e-9)
