import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from singlab.potential_lab import (DiscreteMeasure, EllipticityError, MaximumPrincipleError, NotSubcriticalError,
                                   OperatorSpec, RotationalKernels, bhp_ratio, certify_subcritical, discretize,
                                   disk_grid, disk_martin, green_function, green_matrix_columns, half_disk_grid,
                                   half_disk_minimal_growth, hardy_model, martin_integral, oscillation_decay,
                                   poisson_kernel, predicted_rate, radial_grid, solve_dirichlet,
                                   weighted_principal_eigenvalue)


@pytest.fixture(scope="module")
def disk64():
    return discretize(disk_grid(64))


def test_interval_green_function_is_exact_tent():
    dom = radial_grid(0.0, 1.0, 65)
    sys_ = discretize(dom)
    G = green_function(sys_, 20).values
    x, y = dom.coords[:, 0], dom.coords[20, 0]
    np.testing.assert_allclose(G, np.where(x <= y, x * (1 - y), y * (1 - x)), atol=1e-13)


def test_disk_green_function_log(disk64):
    dom = disk64.domain
    G = green_function(disk64, 0).values
    m = dom.interior & (dom.radius > 0.1) & (dom.radius < 0.9)
    np.testing.assert_allclose(G[m], -np.log(dom.radius[m]) / (2 * math.pi), rtol=5e-3)


def test_green_symmetry(disk64):
    i = disk64.interior_index
    a, b = int(i[100]), int(i[900])
    cols = green_matrix_columns(disk64, [a, b])
    pos = {int(v): k for k, v in enumerate(i)}
    assert cols[pos[b], 0] == pytest.approx(cols[pos[a], 1], rel=1e-10)


def test_dirichlet_constants_and_harmonic(disk64):
    assert np.allclose(solve_dirichlet(disk64, 1.0).values, 1.0)
    assert np.all(solve_dirichlet(disk64, 0.0).values == 0.0)
    X = disk64.domain.coords
    u = solve_dirichlet(disk64, lambda P: P[:, 0]).values
    assert np.abs(u - X[:, 0]).max() < 1e-4


@settings(max_examples=15, deadline=None)
@given(st.lists(st.floats(-3, 3, allow_nan=False), min_size=4, max_size=4))
def test_discrete_maximum_principle(coef):
    sys_ = discretize(disk_grid(16))
    th = np.arctan2(sys_.domain.coords[:, 1], sys_.domain.coords[:, 0])
    f = coef[0] + coef[1] * np.cos(th) + coef[2] * np.sin(2 * th) + coef[3] * np.cos(3 * th)
    u = solve_dirichlet(sys_, f).values
    fb = f[sys_.boundary_index]
    assert u.max() <= fb.max() + 1e-10 and u.min() >= fb.min() - 1e-10


def test_non_m_matrix_operator_rejected():
    sys_ = discretize(disk_grid(16), OperatorSpec(c=-50.0))
    with pytest.raises((MaximumPrincipleError, NotSubcriticalError)):
        solve_dirichlet(sys_, 1.0)
    with pytest.raises(NotSubcriticalError):
        certify_subcritical(sys_)


def test_ellipticity_checked():
    with pytest.raises(EllipticityError):
        discretize(disk_grid(8), OperatorSpec(a=-1.0))


def test_poisson_kernel_mean_value():
    th = np.linspace(0, 2 * np.pi, 2000, endpoint=False)
    x = np.array([[0.3, -0.2]])
    vals = [poisson_kernel(x, [math.cos(t), math.sin(t)])[0] for t in th]
    assert np.mean(vals) == pytest.approx(1.0, rel=1e-10)


def test_martin_kernel_small_resolution():
    m = disk_martin(64)
    assert m.sup_error < 5e-3
    assert m.independence < 2e-2


def test_martin_integral_linear_and_uniform():
    m = disk_martin(32)
    dom = m.system.domain
    kern = RotationalKernels(dom, m.sequence.limit.values)
    n = kern.boundary_nodes.size
    nu = DiscreteMeasure(kern.boundary_nodes, np.full(n, 1.0 / n))
    u = martin_integral(kern, nu).values
    inner = dom.interior & (dom.radius < 0.8)
    assert np.abs(u[inner] - 1).max() < 0.05
    np.testing.assert_allclose(martin_integral(kern, 3 * nu).values, 3 * u, rtol=1e-12)


def test_bhp_ratio_and_predicted_rate():
    u = np.array([1.0, 2.0, 3.0])
    v = np.array([1.0, 1.0, 1.0])
    assert bhp_ratio(u, v, np.array([True, True, True])) == 3.0
    assert predicted_rate(3.0) == 0.5


def test_oscillation_requires_three_levels():
    u = np.ones(5)
    with pytest.raises(ValueError):
        oscillation_decay(u, u, [np.ones(5, bool)] * 2)


def test_half_disk_minimal_growth_stable():
    res = half_disk_minimal_growth((32, 64))
    assert res[32]["c"] == pytest.approx(res[64]["c"], rel=0.05)


def test_half_disk_layout():
    dom = half_disk_grid(8)
    assert dom.coords[0].tolist() == [0.0, 0.0]
    assert np.all(dom.coords[:, 1] >= 0)


def test_hardy_lambda_decreasing():
    sys_, exh, sizes = hardy_model(400)
    eig = weighted_principal_eigenvalue(sys_, exh, sizes=sizes)
    assert eig.strictly_decreasing
    assert abs(eig.estimate - 0.25) < 0.0125


def test_grid_function_csv(tmp_path, disk64):
    g = solve_dirichlet(disk64, 1.0)
    g.to_csv(tmp_path / "u.csv")
    lines = (tmp_path / "u.csv").read_text().splitlines()
    assert len(lines) == disk64.domain.n_nodes + 1
