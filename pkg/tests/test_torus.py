import io

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from coamoeba.torus import (
    PointCloud,
    arg_map,
    circle_distance,
    directed_hausdorff,
    log_map,
    nearest_distance,
    read_csv,
    torus_distance,
    wrap_angle,
    write_csv,
    write_ply,
)

from oracles import nearest_brute, torus_dist

angles = st.floats(-20, 20, allow_nan=False)


def test_arg_map_examples():
    assert np.allclose(arg_map([1, 1]), [0, 0])
    assert np.allclose(arg_map([-1, 1j]), [np.pi, np.pi / 2])
    assert np.allclose(arg_map([np.exp(1 + 1j * np.pi / 4)]), [np.pi / 4])


def test_log_map_examples():
    assert np.allclose(log_map([1, 1]), [0, 0])
    assert np.allclose(log_map([np.e, np.e ** 2]), [1, 2])
    assert np.allclose(log_map([-np.e, 1j]), [1, 0])


def test_zero_coordinates_rejected():
    with pytest.raises(ValueError):
        arg_map([1, 0])


def test_torus_distance_examples():
    assert torus_distance([0.3, -1], [0.3, -1]) == 0
    assert torus_distance([np.pi, 0], [-np.pi, 0]) == pytest.approx(0)
    assert torus_distance([0, 0], [np.pi / 2, np.pi]) == pytest.approx(np.pi)
    with pytest.raises(ValueError):
        torus_distance([0, 0], [0, 0, 0])


def test_wrap_angle_representative():
    assert wrap_angle(-np.pi) == pytest.approx(np.pi)
    assert wrap_angle(np.pi) == pytest.approx(np.pi)
    assert wrap_angle(3 * np.pi / 2) == pytest.approx(-np.pi / 2)


@given(arrays(float, 5, elements=angles))
def test_wrap_angle_range_and_congruence(a):
    w = wrap_angle(a)
    assert np.all((w > -np.pi) & (w <= np.pi))
    assert np.allclose(circle_distance(w, a), 0, atol=1e-9)


@given(arrays(float, (3, 2), elements=angles))
def test_torus_distance_is_a_metric(p):
    a, b, c = p
    assert torus_distance(a, b) == pytest.approx(torus_distance(b, a))
    assert torus_distance(a, c) <= torus_distance(a, b) + torus_distance(b, c) + 1e-12
    assert 0 <= torus_distance(a, b) <= np.pi
    assert torus_distance(a, b) == pytest.approx(torus_dist(a, b))


@given(arrays(float, 3, elements=st.floats(-5, 5)), arrays(float, 3, elements=st.floats(-np.pi, np.pi)))
def test_log_and_arg_recover_the_point(r, theta):
    x = np.exp(r + 1j * theta)
    assert np.allclose(np.exp(log_map(x) + 1j * arg_map(x)), x, rtol=1e-12, atol=0)


def test_nearest_distance_matches_brute_force():
    rng = np.random.default_rng(3)
    cloud = rng.uniform(-np.pi, np.pi, (500, 3))
    cloud[:5] = np.pi  # boundary representatives
    q = rng.uniform(-np.pi, np.pi, (200, 3))
    assert np.allclose(nearest_distance(q, cloud), nearest_brute(q, cloud))
    assert directed_hausdorff(cloud, cloud) == 0
    assert directed_hausdorff(q, cloud) == pytest.approx(nearest_brute(q, cloud).max())


def test_csv_round_trip(tmp_path):
    cloud = PointCloud(2, np.array([[0.1, -3.0], [np.pi, 1e-17]]), provenance="test")
    path = tmp_path / "c.csv"
    write_csv(cloud, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "theta_1,theta_2"
    back = read_csv(path)
    assert np.array_equal(back.points, cloud.points)


def test_ply_header_and_rows():
    cloud = PointCloud(3, np.zeros((2, 3)), provenance="p")
    buf = io.StringIO()
    write_ply(cloud, buf)
    text = buf.getvalue().splitlines()
    assert text[0] == "ply" and "element vertex 2" in text and text.index("end_header") == len(text) - 3


def test_point_cloud_wraps_points():
    cloud = PointCloud(1, [[3 * np.pi]])
    assert cloud.points[0, 0] == pytest.approx(np.pi)
