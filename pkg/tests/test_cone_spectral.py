import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from singlab.cone_geometry import (export_cone_graph, make_lawson_cone, minimality_residual,
                                   principal_curvatures, scalar_curvature, second_fundamental_norm,
                                   skin_density_on_cone)
from singlab.spectral_sov import (LinkOperatorSpec, NoRealExponentsError, attractor_limit_check,
                                  build_fixed_point_solution, indicial_exponents, jacobi_discriminant,
                                  link_principal_eigenvalue, mixed_record, radial_exponent_fit,
                                  radial_residual_check, scaling_action, shifted_bounds_check,
                                  theorem12_bounds_check)

SIMONS = make_lawson_cone(3, 3)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8))
def test_lawson_cone_is_minimal(p, q):
    c = make_lawson_cone(p, q, warn=False)
    assert abs(minimality_residual(c)) < 1e-12
    k = principal_curvatures(c, 2.0)
    assert abs(k.sum()) < 1e-12
    assert np.sum(k ** 2) == pytest.approx(second_fundamental_norm(c, 2.0) ** 2)
    assert scalar_curvature(c, 2.0) == pytest.approx(-(p + q) / 4)


def test_small_cone_warns():
    with pytest.warns(UserWarning):
        make_lawson_cone(1, 2)
    with pytest.raises(ValueError):
        make_lawson_cone(0, 3)


def test_skin_density_homogeneity():
    rule = skin_density_on_cone(SIMONS)
    assert rule(2.0) == pytest.approx(rule(1.0) / 2)
    assert rule.delta(1.0) == pytest.approx(1 / math.sqrt(6))


def test_cone_graph_layers():
    s = export_cone_graph(SIMONS, 0.1, 10, 8, 4)
    assert s.n_vertices == 8 * 16
    assert s.boundary.sum() == s.cutoff.sum() == 16


def test_jacobi_link_eigenvalue_and_exponents():
    mu, psi = link_principal_eigenvalue(LinkOperatorSpec(SIMONS))
    assert mu == -6.0 and psi == 1.0
    ind = indicial_exponents(mu, 7)
    assert (ind.alpha_plus, ind.alpha_minus) == (-2.0, -3.0)


@pytest.mark.parametrize("n", range(3, 10))
def test_jacobi_discriminant_sign(n):
    d = jacobi_discriminant(n)
    assert isinstance(d, Fraction)
    assert (d >= 0) == (n >= 7)
    if n < 7:
        with pytest.raises(NoRealExponentsError):
            indicial_exponents(-(n - 1), n)


@settings(max_examples=40, deadline=None)
@given(st.floats(-5.0, 20.0), st.integers(3, 12))
def test_indicial_roots_solve_quadratic(mu, n):
    h = (n - 2) / 2
    if h * h + mu < 1e-9:
        return
    ind = indicial_exponents(mu, n)
    for a in (ind.alpha_plus, ind.alpha_minus):
        assert a * a + (n - 2) * a - mu == pytest.approx(0, abs=1e-8 * (1 + abs(mu)))


def test_custom_potential_numeric_matches_constant():
    mu_c, _ = link_principal_eigenvalue(LinkOperatorSpec(SIMONS, "custom", custom=-2.5))
    mu_n, psi = link_principal_eigenvalue(LinkOperatorSpec(SIMONS, "custom", custom=lambda a, b: -2.5 + 0 * a,
                                                           grid=16))
    assert mu_n == pytest.approx(mu_c, abs=1e-8)
    assert np.allclose(psi, 1.0)


def test_radial_fit_and_residual():
    mu = -6.0
    for a in (-2.0, -3.0):
        assert radial_exponent_fit(mu, 7, a).alpha == pytest.approx(a, abs=1e-3)
    sol = build_fixed_point_solution(SIMONS, LinkOperatorSpec(SIMONS), "PLUS")
    assert radial_residual_check(SIMONS, LinkOperatorSpec(SIMONS), sol, [0.5, 1, 2]) < 1e-12


def test_radial_fit_flags_mixed_data():
    fit = radial_exponent_fit(-6.0, 7, boundary_values=(1.0, -1.0))
    assert not fit.monomial


def test_bounds_suite_values():
    rep = theorem12_bounds_check(SIMONS, 0.01)
    assert rep.mu == pytest.approx(-1.31)
    assert rep.passed
    assert rep.largest_passing_lambda == pytest.approx(5 / 96, abs=1e-4)
    bad = theorem12_bounds_check(SIMONS, 0.1)
    assert not bad.checks["mu_lower"]
    with pytest.raises(ValueError):
        theorem12_bounds_check(SIMONS, 0.0)


def test_shifted_bounds():
    rep = shifted_bounds_check(SIMONS, 8, 0.0)
    assert rep.passed
    with pytest.raises(ValueError):
        shifted_bounds_check(SIMONS, 6, 0.0)


@settings(max_examples=30, deadline=None)
@given(st.fractions(Fraction(1, 10), 10), st.fractions(Fraction(1, 10), 10))
def test_scaling_group_law_exact(e1, e2):
    rec = mixed_record(SIMONS, LinkOperatorSpec(SIMONS))
    lhs = scaling_action(scaling_action(rec, e2), e1)
    assert lhs.terms == scaling_action(rec, e1 * e2).terms
    assert lhs.value_at_p0() == 1


def test_attractor_directions():
    rec = mixed_record(SIMONS, LinkOperatorSpec(SIMONS))
    assert attractor_limit_check(rec, "TO_ZERO")["label"] == "MINUS"
    assert attractor_limit_check(rec, "TO_INFINITY")["label"] == "PLUS"


def test_scaling_rejects_bad_eta():
    rec = mixed_record(SIMONS, LinkOperatorSpec(SIMONS))
    with pytest.raises(ValueError):
        scaling_action(rec, 0)
