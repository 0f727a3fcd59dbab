import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sslaplace.boundary_calculus import real_sph_harm
from sslaplace.geometry import (
    GridSpec,
    RegionLabel,
    classify_point,
    classify_points,
    distance_to_curve,
    make_circle,
    make_fourier_curve,
    make_sphere_quadrature,
    mesh_curve,
)

# adaptive quadrature (scipy.integrate.quad, epsrel 1e-14) of |gamma'| for r = 1 + 0.2 cos 3t
LOBED_PERIMETER = 6.819840479796355


@pytest.fixture
def lobed():
    return make_fourier_curve(1.0, [(3, 0.2, 0.0)])


def test_circle_positions():
    assert np.allclose(make_circle(1.0).position(0.0), [1.0, 0.0], atol=1e-15)
    assert np.allclose(make_circle(2.0).position(np.pi / 2), [0.0, 2.0], atol=1e-15)
    assert np.allclose(make_circle(1.0, (3.0, 0.0)).position(np.pi), [2.0, 0.0], atol=1e-15)


@pytest.mark.parametrize("radius", [0.0, -1.0])
def test_circle_rejects_nonpositive_radius(radius):
    with pytest.raises(ValueError):
        make_circle(radius)


def test_fourier_curve_examples(lobed):
    assert np.allclose(make_fourier_curve(1.0, []).position(0.7), make_circle(1.0).position(0.7))
    assert lobed.radial(0.0) == pytest.approx(1.2)
    with pytest.raises(ValueError, match="r"):
        make_fourier_curve(1.0, [(1, 1.1, 0.0)])


def test_curvature_of_circle():
    assert np.allclose(make_circle(2.0).curvature(np.linspace(0, 6, 7)), 0.5)


def test_mesh_uniform_circle():
    mesh = mesh_curve(make_circle(), 8)
    assert np.allclose(mesh.weights, np.pi / 4)
    mesh = mesh_curve(make_circle(), 256)
    assert abs(mesh.weights.sum() - 2 * np.pi) < 1e-12
    assert np.allclose(mesh.parameter_values, 2 * np.pi * (np.arange(256) + 0.5) / 256)


def test_mesh_four_nodes_rejected():
    # the N=4 quarter-circle example is below the N >= 8 precondition
    with pytest.raises(ValueError):
        mesh_curve(make_circle(), 4)


def test_lobed_perimeter_converges(lobed):
    diffs = [abs(mesh_curve(lobed, n).perimeter - LOBED_PERIMETER) for n in (16, 32, 64)]
    assert diffs[1] < diffs[0] / 10 and diffs[2] < 1e-12
    for n in (64, 128, 256, 512):
        assert abs(mesh_curve(lobed, n).perimeter - LOBED_PERIMETER) < 1e-12


@pytest.mark.parametrize("coeffs", [[(3, 0.2, 0.0)], [(2, 0.1, 0.05), (5, 0.03, -0.02)]])
def test_perimeter_matches_dense_trapezoid(coeffs):
    curve = make_fourier_curve(1.0, coeffs)
    t = 2 * np.pi * np.arange(10**6) / 10**6
    reference = np.mean(curve.speed(t)) * 2 * np.pi
    for n in (256, 512):
        assert abs(mesh_curve(curve, n).perimeter / reference - 1) < 1e-8


def test_frame_is_orthonormal_and_outward(lobed):
    mesh = mesh_curve(lobed, 128)
    assert np.allclose(np.linalg.norm(mesh.tangents, axis=1), 1, atol=1e-12)
    assert np.allclose(np.linalg.norm(mesh.normals, axis=1), 1, atol=1e-12)
    assert np.max(np.abs(np.sum(mesh.tangents * mesh.normals, axis=1))) < 1e-12
    assert np.all(np.sum(mesh.normals * mesh.nodes, axis=1) > 0)
    # normal rotated +90 degrees gives the counter-clockwise tangent
    rotated = np.column_stack([-mesh.normals[:, 1], mesh.normals[:, 0]])
    assert np.allclose(rotated, mesh.tangents, atol=1e-14)


def test_arc_positions_increase(lobed):
    mesh = mesh_curve(lobed, 64)
    assert np.all(np.diff(mesh.arc_positions) > 0)
    assert mesh.arc_positions[-1] < mesh.perimeter


def test_classify_examples():
    circle = make_circle()
    assert classify_point(circle, (0.0, 0.0), 0.01) is RegionLabel.INSIDE
    assert classify_point(circle, (2.0, 0.0), 0.01) is RegionLabel.OUTSIDE
    assert classify_point(circle, (1.005, 0.0), 0.01) is RegionLabel.NEAR_BOUNDARY
    assert classify_point(circle, (0.995, 0.0), 0.01) is RegionLabel.NEAR_BOUNDARY


def test_classify_lobed(lobed):
    # r(0) = 1.2, r(pi/3) = 0.8
    u = np.array([np.cos(np.pi / 3), np.sin(np.pi / 3)])
    labels = classify_points(lobed, [(1.15, 0.0), (1.25, 0.0), 0.85 * u, 0.75 * u], 0.01)
    assert labels == [RegionLabel.INSIDE, RegionLabel.OUTSIDE, RegionLabel.OUTSIDE, RegionLabel.INSIDE]


def test_classify_rejects_bad_delta():
    with pytest.raises(ValueError):
        classify_point(make_circle(), (0, 0), 0.0)


@settings(max_examples=40, deadline=None)
@given(
    angle=st.floats(-np.pi, np.pi),
    sx=st.floats(-5, 5),
    sy=st.floats(-5, 5),
    px=st.floats(-1.6, 1.6),
    py=st.floats(-1.6, 1.6),
)
def test_classify_invariant_under_rigid_motion(angle, sx, sy, px, py):
    curve = make_fourier_curve(1.0, [(3, 0.2, 0.0)])
    delta = 0.05
    before = classify_point(curve, (px, py), delta)
    c, s = np.cos(angle), np.sin(angle)
    q = (c * px - s * py + sx, s * px + c * py + sy)
    after = classify_point(curve.moved(angle, (sx, sy)), q, delta)
    if before is not after:
        # only a point sitting on the band edge may flip under rounding
        d = distance_to_curve(curve, [(px, py)])[0]
        assert abs(d - delta) < 1e-9


def test_sphere_weights_and_nodes():
    for n_lat, n_lon in [(4, 8), (20, 40), (40, 80)]:
        quad = make_sphere_quadrature(n_lat, n_lon)
        assert abs(quad.weights.sum() / (4 * np.pi) - 1) < 1e-10
        assert np.max(np.abs(np.linalg.norm(quad.nodes, axis=1) - 1)) < 1e-14


def test_sphere_harmonic_moments():
    quad = make_sphere_quadrature(20, 40)
    y20 = real_sph_harm(2, 0, quad.nodes)
    assert abs(np.sum(y20**2 * quad.weights) - 1) < 1e-10
    assert abs(np.sum(y20 * quad.weights)) < 1e-12


def test_sphere_quadrature_rejects_small():
    with pytest.raises(ValueError):
        make_sphere_quadrature(3, 8)
    with pytest.raises(ValueError):
        make_sphere_quadrature(4, 6)


def test_sphere_collocation_points_off_nodes():
    quad = make_sphere_quadrature(10, 20)
    pts = quad.collocation_points()
    assert pts.shape == (9 * 20, 3)
    d = np.linalg.norm(pts[:, None, :] - quad.nodes[None, :, :], axis=2)
    assert d.min() > 0.05


def test_grid_spec():
    spec = GridSpec((-1.5, 1.5, -1.5, 1.5), 0.05)
    assert spec.points2d().shape == (61 * 61, 2)
    with pytest.raises(ValueError):
        GridSpec((-1, 1, -1, 1), 0.0).points2d()
    pts = GridSpec((-1, 1, -1, 1), 0.5, plane="xz", offset=0.25).points3d()
    assert np.all(pts[:, 1] == 0.25)
