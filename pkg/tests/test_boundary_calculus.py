from dataclasses import replace

import numpy as np
import pytest

from sslaplace.boundary_calculus import (
    BoundaryField,
    SphericalHarmonicField,
    TrigSeries,
    real_sph_harm,
    sample,
    second_tangential_derivative_fd,
    second_tangential_derivative_spectral,
    tangential_laplacian_sphere,
    zero_mean_check,
)
from sslaplace.geometry import make_circle, make_fourier_curve, make_sphere_quadrature, mesh_curve

SIN2 = TrigSeries.preset("sin2theta")


def _fd(spec, mesh):
    return second_tangential_derivative_fd(sample(spec, mesh))


def _central_difference_oracle(spec, curve, t, h=1e-5):
    """d/ds (df/ds) with df/ds = f_t / |g'| differentiated by a central difference in t."""

    def dfds(u):
        return spec(u, 1) / curve.speed(u)

    return (dfds(t + h) - dfds(t - h)) / (2 * h) / curve.speed(t)


def test_spectral_circle_examples():
    mesh = mesh_curve(make_circle(), 64)
    t = mesh.parameter_values
    assert np.allclose(second_tangential_derivative_spectral(SIN2, mesh).values, -4 * np.sin(2 * t), atol=1e-13)
    cos1 = TrigSeries.preset("cos_theta")
    assert np.allclose(second_tangential_derivative_spectral(cos1, mesh).values, -np.cos(t), atol=1e-13)
    const = TrigSeries.preset("constant")
    assert np.all(second_tangential_derivative_spectral(const, mesh).values == 0)


def test_spectral_matches_arc_length_central_difference_on_circle():
    # on the unit circle s = theta; a 1e-6 step second difference is accurate to ~1e-4
    mesh = mesh_curve(make_circle(), 32)
    t = mesh.parameter_values
    h = 1e-6
    oracle = (SIN2(t + h) - 2 * SIN2(t) + SIN2(t - h)) / h**2
    assert np.max(np.abs(second_tangential_derivative_spectral(SIN2, mesh).values - oracle)) < 1e-3


@pytest.mark.parametrize("spec", [SIN2, TrigSeries(0.3, ((1, 0.5, -0.2), (4, 0.1, 0.7)))])
def test_spectral_matches_central_difference_on_lobed_curve(spec):
    curve = make_fourier_curve(1.0, [(3, 0.2, 0.0)])
    mesh = mesh_curve(curve, 48)
    got = second_tangential_derivative_spectral(spec, mesh).values
    oracle = _central_difference_oracle(spec, curve, mesh.parameter_values)
    assert np.max(np.abs(got - oracle)) < 1e-7


def test_constant_on_any_curve():
    mesh = mesh_curve(make_fourier_curve(1.0, [(2, 0.1, 0.2)]), 32)
    const = TrigSeries(2.5)
    assert np.all(second_tangential_derivative_spectral(const, mesh).values == 0)
    assert np.all(_fd(const, mesh).values == 0)


def test_fd_accuracy_n256():
    mesh = mesh_curve(make_circle(), 256)
    err = np.max(np.abs(_fd(SIN2, mesh).values + 4 * np.sin(2 * mesh.parameter_values)))
    assert err < 1e-3


@pytest.mark.parametrize("curve", [make_circle(), make_fourier_curve(1.0, [(3, 0.2, 0.0)])])
def test_fd_second_order_ratio(curve):
    def deviation(n):
        mesh = mesh_curve(curve, n)
        return np.max(np.abs(_fd(SIN2, mesh).values - second_tangential_derivative_spectral(SIN2, mesh).values))

    for n in (128, 256):
        ratio = deviation(n) / deviation(2 * n)
        assert 3.5 <= ratio <= 4.5


@pytest.mark.parametrize("route", ["spectral", "fd"])
def test_linearity(route):
    mesh = mesh_curve(make_fourier_curve(1.0, [(3, 0.2, 0.0)]), 128)
    f = TrigSeries(0.0, ((2, 0.0, 1.0), (5, 0.3, 0.0)))
    g = TrigSeries(1.0, ((1, 1.0, -0.5),))
    alpha, beta = 1.7, -0.6

    def density(spec):
        if route == "spectral":
            return second_tangential_derivative_spectral(spec, mesh).values
        return _fd(spec, mesh).values

    combo = density(f.scaled(alpha) + g.scaled(beta))
    parts = alpha * density(f) + beta * density(g)
    assert np.max(np.abs(combo - parts)) <= 1e-12 * np.max(np.abs(parts))


@pytest.mark.parametrize("route", ["spectral", "fd"])
@pytest.mark.parametrize("curve", [make_circle(), make_fourier_curve(1.0, [(3, 0.2, 0.0)])])
def test_zero_mean(route, curve):
    spec = TrigSeries(0.4, ((1, 0.2, 0.9), (2, 0.0, 1.0), (7, -0.3, 0.1)))
    mesh = mesh_curve(curve, 256)
    if route == "spectral":
        density = second_tangential_derivative_spectral(spec, mesh)
    else:
        density = _fd(spec, mesh)
    assert abs(zero_mean_check(density)) < 1e-10


def test_zero_mean_constant_density():
    mesh = mesh_curve(make_circle(), 64)
    assert zero_mean_check(BoundaryField(np.ones(64), mesh)) == pytest.approx(2 * np.pi, abs=1e-12)


def test_fd_rejects_nonuniform_mesh():
    mesh = mesh_curve(make_circle(), 32)
    bent = replace(mesh, parameter_values=mesh.parameter_values**1.01)
    with pytest.raises(ValueError):
        second_tangential_derivative_spectral(SIN2, bent)
    with pytest.raises(ValueError):
        second_tangential_derivative_fd(BoundaryField(np.zeros(32), bent))


def test_field_length_checked():
    with pytest.raises(ValueError):
        BoundaryField(np.zeros(5), mesh_curve(make_circle(), 16))


def test_real_harmonics_orthonormal():
    quad = make_sphere_quadrature(12, 24)
    modes = [(l, m) for l in range(5) for m in range(-l, l + 1)]
    ys = np.array([real_sph_harm(l, m, quad.nodes) for l, m in modes])
    gram = (ys * quad.weights) @ ys.T
    assert np.allclose(gram, np.eye(len(modes)), atol=1e-12)


def test_sphere_laplacian_examples():
    quad = make_sphere_quadrature(10, 20)
    assert np.allclose(tangential_laplacian_sphere(SphericalHarmonicField({(0, 0): 1.0}), quad).values, 0)
    y20 = real_sph_harm(2, 0, quad.nodes)
    got = tangential_laplacian_sphere(SphericalHarmonicField({(2, 0): 1.0}), quad).values
    assert np.max(np.abs(got + 6 * y20)) < 1e-10
    y10 = real_sph_harm(1, 0, quad.nodes)
    got = tangential_laplacian_sphere(SphericalHarmonicField({(1, 0): 1.0}), quad).values
    assert np.max(np.abs(got + 2 * y10)) < 1e-10


def test_sphere_laplacian_mixture():
    quad = make_sphere_quadrature(16, 32)
    terms = {(1, -1): 0.4, (2, 1): -1.2, (3, 0): 0.7, (4, -3): 0.25}
    got = tangential_laplacian_sphere(SphericalHarmonicField(terms), quad).values
    want = sum(-l * (l + 1) * c * real_sph_harm(l, m, quad.nodes) for (l, m), c in terms.items())
    assert np.max(np.abs(got - want)) < 1e-10


def test_sphere_laplacian_by_great_circle_differences():
    # sum of second differences along two orthogonal great circles through a node
    quad = make_sphere_quadrature(10, 20)
    field = SphericalHarmonicField({(2, 0): 1.0, (3, 2): 0.5})
    lb = tangential_laplacian_sphere(field, quad).values
    h = 1e-3
    for idx in (3, 57, 140):
        p = quad.nodes[idx]
        e1 = np.cross(p, [0.3, 0.5, 0.8])
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(p, e1)
        total = 0.0
        for e in (e1, e2):
            plus = field(np.cos(h) * p + np.sin(h) * e)[0]
            minus = field(np.cos(h) * p - np.sin(h) * e)[0]
            total += (plus - 2 * field(p)[0] + minus) / h**2
        assert abs(total - lb[idx]) < 1e-5
