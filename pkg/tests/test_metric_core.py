import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from singlab.metric_core import (DegenerateSpaceError, SampledSpace, attach_density, b_const, build_phi_chain,
                                 build_space, c_bound, check_uniform_curve, constant_density, estimate_delta,
                                 euclidean_grid, fourpoint_delta, geodesic_between, gromov_admissible_delta,
                                 gromov_product, metric_inequality_suite, phi_gromov, phi_halfspace,
                                 punctured_disk, random_tree, read_space, segment, validate_phi_chain,
                                 write_space)


@pytest.fixture(scope="module")
def disk64():
    s = punctured_disk(64)
    return s, attach_density(s, "inv_dist_sigma")


def test_build_space_rejects_bad_input():
    with pytest.raises(ValueError):
        build_space("punctured_disk", 0)
    with pytest.raises(ValueError):
        build_space("nonsense", 16)
    with pytest.raises(DegenerateSpaceError):
        build_space("single_vertex", 4)


def test_space_roundtrip(tmp_path):
    s = random_tree(30, seed=3)
    write_space(s, tmp_path / "t.txt")
    t = read_space(tmp_path / "t.txt")
    assert t.n_vertices == s.n_vertices
    np.testing.assert_allclose(t.lengths, s.lengths)
    np.testing.assert_allclose(t.coords, s.coords)


def test_read_space_reports_line(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("V 0 0 0\nV 1 1 0\nQ 1 2\n")
    with pytest.raises(ValueError, match="bad.txt:3"):
        read_space(p)


def test_quasi_hyperbolic_radial_distance(disk64):
    s, d = disk64
    r = s.fields["r"]
    ray = np.flatnonzero(s.fields["theta"] == 0)
    x = int(ray[np.argmin(np.abs(r[ray] - 0.05))])
    y = int(ray[np.argmin(np.abs(r[ray] - 0.5))])
    exact = math.log(r[y] / r[x])
    assert d(x, y) == pytest.approx(exact, rel=0.02)


def test_distance_is_symmetric_and_geodesic_consistent(disk64):
    s, d = disk64
    path = geodesic_between(s, d, 0, s.n_vertices - 1)
    assert path.l_rho == pytest.approx(d(0, s.n_vertices - 1), rel=1e-12)
    assert d(0, s.n_vertices - 1) == pytest.approx(d(s.n_vertices - 1, 0), rel=1e-12)


def test_tree_fourpoint_delta_is_zero():
    t = random_tree(120, seed=7)
    rep = estimate_delta(t, constant_density(t), 3000, 4, seed=1)
    assert rep.delta_fourpoint == 0.0


def test_grid_delta_grows():
    ds = [estimate_delta(g, constant_density(g), 2000, 6, seed=0).delta for g in map(euclidean_grid, (8, 16, 32))]
    assert ds[0] < ds[1] < ds[2]


def test_estimate_delta_deterministic_and_monotone_in_samples(disk64):
    s, d = disk64
    a = estimate_delta(s, d, 500, 4, seed=5)
    b = estimate_delta(s, d, 500, 4, seed=5)
    c = estimate_delta(s, d, 2000, 8, seed=5)
    assert a == b
    assert c.delta_fourpoint >= a.delta_fourpoint
    assert c.delta_thin_triangles >= a.delta_thin_triangles


def test_gromov_product_on_line():
    D = np.abs(np.subtract.outer(np.arange(4.0), np.arange(4.0)))
    assert gromov_product(D, 0, 2, 3) == 2.0
    delta, _ = fourpoint_delta(D)
    assert delta == 0.0


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=4, max_size=8))
def test_fourpoint_zero_for_points_on_a_line(xs):
    x = np.array(xs)
    D = np.abs(np.subtract.outer(x, x))
    assert fourpoint_delta(D)[0] <= 1e-9


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 20), st.floats(0, 100))
def test_phi_functions(delta, t):
    assert phi_halfspace(t, delta) >= min(delta, 1 / (22 * delta))
    assert phi_halfspace(t, delta) >= t - 6 * delta
    assert phi_gromov(t, delta) >= t - 2 * (delta + 2)


def test_phi_halfspace_at_zero():
    assert phi_halfspace(0.0, 1.0) == 1 / 22
    lo, hi = gromov_admissible_delta()
    assert lo == 2.0 and hi == pytest.approx(1 + math.sqrt(1.25))


def test_uniformity_constants():
    assert b_const(1.0) == pytest.approx(64 * math.exp(32))
    assert math.isinf(c_bound(3.0))


def test_check_uniform_curve_on_segment():
    s = segment(200)
    d = attach_density(s, "inv_dist_sigma")
    path = geodesic_between(s, d, 10, 150)
    res = check_uniform_curve(path, d, 2.0)
    assert res.passed
    assert res.ratio_quasigeodesic == pytest.approx(1.0)


def test_metric_suite_on_disk(disk64):
    s, d = disk64
    rep = metric_inequality_suite(s, d, 300, seed=0)
    assert rep.passed, rep.worst


def test_phi_chain_on_small_cone():
    from singlab.cone_geometry import export_cone_graph, make_lawson_cone

    s = export_cone_graph(make_lawson_cone(3, 3), 1e-40, 10.0, 256, 8)
    d = attach_density(s, "skin_model")
    ray = geodesic_between(s, d, int(np.flatnonzero(s.boundary)[0]), int(np.flatnonzero(s.cutoff)[0]))
    ch = build_phi_chain(s, d, ray, "gromov_product", 2.1, 3)
    assert validate_phi_chain(ch, d, seed=0).passed


def test_density_requires_sigma():
    g = euclidean_grid(4)
    with pytest.raises(ValueError):
        attach_density(g, "inv_dist_sigma")


def test_space_rejects_nonpositive_lengths():
    with pytest.raises(ValueError):
        SampledSpace.from_edges(np.zeros((2, 1)) + [[0], [1]], np.array([[0, 1]]), lengths=np.array([0.0]))
