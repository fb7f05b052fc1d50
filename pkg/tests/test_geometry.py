from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftau.errors import GeometryError
from conftau.geometry import (
    BackgroundPotential,
    DomainShape,
    bump_deform,
    bump_moment_prediction,
    compute_moments,
    generalized_moment,
    generalized_moment_dzbar,
    point_in_domain,
    schwarz_eval,
    times_count,
)

# ellipse z = w + 0.1/w has semi-axes 1.1 and 0.9
A, B = 1.1, 0.9


def test_unit_disk_uniform(disk, one):
    m = compute_moments(disk, one, 8)
    assert m.t0 == pytest.approx(1.0, abs=1e-14)
    assert np.max(np.abs(m.t)) < 1e-14
    assert np.max(np.abs(m.v)) < 1e-14
    assert m.v0 == pytest.approx(-1.0, abs=1e-14)


@pytest.mark.parametrize("R", [0.5, 1.3, 2.0])
def test_disk_v0_closed_form(one, R):
    m = compute_moments(DomainShape.circle(R), one, 4)
    t0 = R * R
    assert m.t0 == pytest.approx(t0, abs=1e-13)
    assert m.v0 == pytest.approx(t0 * np.log(t0) - t0, abs=1e-13)


def test_ellipse_uniform_residue_values(ellipse, one):
    m = compute_moments(ellipse, one, 8)
    assert m.t0 == pytest.approx(0.99, abs=1e-13)
    assert m.t[1] == pytest.approx(0.05, abs=1e-13)
    assert m.v[1] == pytest.approx(0.099, abs=1e-13)
    others = np.delete(m.t, 1)
    assert np.max(np.abs(others)) < 1e-13


def test_disk_radial_density(disk, sq):
    m = compute_moments(disk, sq, 8)
    assert m.t0 == pytest.approx(0.5, abs=1e-14)
    assert np.max(np.abs(m.t)) < 1e-14
    # (2/pi) int log|z| |z|^2 over the unit disk = 4 int_0^1 r^3 log r dr
    assert m.v0 == pytest.approx(-0.25, abs=1e-14)


def test_ellipse_radial_density_charge(ellipse, sq):
    # (1/pi) int |z|^2 over an ellipse = a b (a^2 + b^2) / 4
    m = compute_moments(ellipse, sq, 8)
    assert m.t0 == pytest.approx(A * B * (A * A + B * B) / 4, abs=1e-13)
    assert m.t[1].imag == pytest.approx(0.0, abs=1e-14)


def test_generalized_moments(disk, ellipse, one):
    assert generalized_moment(disk, one, 0, 0) == pytest.approx(1.0, abs=1e-14)
    assert generalized_moment(disk, one, 1, 1) == pytest.approx(0.5, abs=1e-14)
    assert generalized_moment(ellipse, one, 2, 0) == pytest.approx(0.099, abs=1e-13)
    assert generalized_moment(ellipse, one, 1, 1) == pytest.approx(A * B * (A * A + B * B) / 4, abs=1e-13)


@pytest.mark.parametrize("a,b", [(0, 0), (1, 1), (2, 0), (0, 3), (2, 3)])
def test_generalized_moment_routes_agree(ellipse, sq, a, b):
    assert abs(generalized_moment(ellipse, sq, a, b) - generalized_moment_dzbar(ellipse, sq, a, b)) < 1e-13


def test_generalized_moment_matches_t0_and_v(ellipse, sq):
    m = compute_moments(ellipse, sq, 4)
    assert generalized_moment(ellipse, sq, 0, 0).real == pytest.approx(m.t0, abs=1e-14)
    for k in (1, 2, 3):
        assert abs(generalized_moment(ellipse, sq, k, 0) - m.v[k - 1]) < 1e-14


def test_spectral_convergence_in_M(one, sq):
    shape = DomainShape(1.0, np.array([0.02, 0.1 + 0.05j, -0.03j]))
    for pot in (one, sq):
        compute_moments(shape, pot, 8, 512, check_convergence=True, tol=1e-10)


def test_moment_reality(ellipse, sq):
    assert abs(generalized_moment(ellipse, sq, 0, 0).imag) < 1e-12
    assert abs(generalized_moment(ellipse, sq, 1, 1).imag) < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.floats(0.0, 2 * np.pi))
def test_rotation_covariance(alpha):
    one = BackgroundPotential.uniform()
    shape = DomainShape(1.0, np.array([0.0, 0.1, 0.03j]))
    m = compute_moments(shape, one, 6)
    mr = compute_moments(shape.rotated(alpha), one, 6)
    k = np.arange(1, 7)
    assert np.allclose(mr.t, m.t * np.exp(-1j * k * alpha), atol=1e-13)
    assert np.allclose(mr.v, m.v * np.exp(1j * k * alpha), atol=1e-13)
    assert mr.t0 == pytest.approx(m.t0, abs=1e-13)


def test_times_count_bounds_nonzero_times(ellipse, one, sq):
    for pot in (one, sq):
        K = times_count(ellipse, pot)
        m = compute_moments(ellipse, pot, K + 6)
        assert np.max(np.abs(m.t[K:])) < 1e-14


def test_schwarz_truncated_value(ellipse, one):
    m = compute_moments(ellipse, one, 2)
    assert schwarz_eval(m, 2.0) == pytest.approx(0.707375, abs=1e-12)


def test_schwarz_on_circle(disk, one):
    m = compute_moments(disk, one, 4)
    z = np.exp(1j * np.linspace(0, 6, 7))
    assert np.allclose(schwarz_eval(m, z), np.conj(z), atol=1e-13)


def test_schwarz_on_ellipse_curve(ellipse, one):
    m = compute_moments(ellipse, one, 60)
    _, z, _ = ellipse.boundary(64)
    assert np.max(np.abs(schwarz_eval(m, z) - np.conj(z))) < 1e-8


def test_schwarz_equals_dU_on_curve_radial(ellipse, sq):
    m = compute_moments(ellipse, sq, 80)
    _, z, _ = ellipse.boundary(32)
    assert np.max(np.abs(schwarz_eval(m, z) - sq.dU_dz(z, np.conj(z)))) < 1e-8


@pytest.mark.parametrize("xi", [0.0, 0.7, 2.5])
def test_bump_charge_on_unit_circle(disk, one, xi):
    eps = 1e-4
    _, d = bump_deform(disk, one, xi, eps, kernel_width=0.1)
    assert d.t0 == pytest.approx(eps / np.pi, abs=1e-15)
    assert abs(d.t[0] - eps / np.pi * np.exp(-1j * xi)) < 2e-3 * eps / np.pi


def test_bump_second_order(ellipse, one):
    errs = []
    for eps in (1e-4, 5e-5):
        b, d = bump_deform(ellipse, one, 0.7, eps)
        p0, pt = bump_moment_prediction(b)
        errs.append(max(abs(d.t0 - p0), np.max(np.abs(d.t - pt))))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


def test_degenerate_shapes_rejected():
    with pytest.raises(GeometryError):
        DomainShape(1.0, np.array([0, 0, 0.5])).validate()
    with pytest.raises(GeometryError):
        DomainShape.circle(1.0, center=2.0).validate()
    with pytest.raises(GeometryError):
        DomainShape(-1.0)


def test_sigma_floor_violation(disk):
    # sigma = |z|^2 - 1 vanishes on the unit circle
    pot = BackgroundPotential(np.array([[1.0, 0], [0, -0.25]]))
    with pytest.raises(GeometryError):
        compute_moments(disk, pot, 2)


def test_non_hermitian_T_rejected():
    with pytest.raises(GeometryError):
        BackgroundPotential(np.array([[0, 1.0], [0.5, 0]]))


def test_point_in_domain(ellipse):
    inside = point_in_domain(ellipse, np.array([0.0, 1.05, 0.85j]))
    outside = point_in_domain(ellipse, np.array([1.15, 0.95j, 3.0]))
    assert inside.all() and not outside.any()
