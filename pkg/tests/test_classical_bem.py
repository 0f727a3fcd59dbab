import numpy as np
import pytest

from sslaplace import classical_bem as bem
from sslaplace.boundary_calculus import BoundaryField, TrigSeries, sample
from sslaplace.geometry import make_circle, make_fourier_curve, mesh_curve
from sslaplace.kernels import PLANE
from sslaplace.oracles import DiskPoint, disk_neumann_data, poisson_kernel_disk

SIN2 = TrigSeries.preset("sin2theta")


def _disk_points(count, rho_max=0.8, seed=0):
    rng = np.random.default_rng(seed)
    rho = rho_max * np.sqrt(rng.uniform(size=count))
    theta = rng.uniform(0, 2 * np.pi, size=count)
    return np.column_stack([rho * np.cos(theta), rho * np.sin(theta)])


def _neumann(spec, n, curve=None, **kwargs):
    mesh = mesh_curve(curve or make_circle(), n)
    f = sample(spec, mesh)
    return mesh, f, bem.solve_dirichlet(mesh, f, **kwargs)


@pytest.mark.parametrize("n,tol", [(64, 5e-2), (128, 2e-2)])
def test_neumann_sin2(n, tol):
    mesh, _, data = _neumann(SIN2, n)
    assert np.max(np.abs(data.q.values - 2 * np.sin(2 * mesh.parameter_values))) <= tol


def test_neumann_constant_and_cos():
    _, _, data = _neumann(TrigSeries(1.0), 128)
    assert np.max(np.abs(data.q.values)) <= 2e-2
    mesh, _, data = _neumann(TrigSeries.preset("cos_theta"), 128)
    assert np.max(np.abs(data.q.values - np.cos(mesh.parameter_values))) <= 2e-2


def test_zero_data_gives_zero_flux():
    mesh = mesh_curve(make_circle(), 32)
    system = bem.assemble(mesh, BoundaryField(np.zeros(32), mesh))
    assert np.all(system.rhs == 0)
    assert np.all(bem.solve_neumann(system).q.values == 0)


def test_single_layer_block_symmetric_on_circle():
    mesh = mesh_curve(make_circle(), 128)
    for self_term in bem.SELF_TERMS:
        mat = bem.single_layer_matrix(mesh, PLANE, self_term)
        assert np.max(np.abs(mat - mat.T)) <= 1e-12


def test_assemble_preconditions():
    mesh = mesh_curve(make_circle(), 8)
    with pytest.raises(ValueError):
        bem.assemble(mesh, np.zeros(8))
    with pytest.raises(ValueError):
        bem.single_layer_matrix(mesh_curve(make_circle(), 16), self_term="magic")


def test_rank_deficient_system_raises():
    mesh = mesh_curve(make_circle(), 16)
    system = bem.BemSystem(np.zeros((16, 16)), np.zeros(16), np.zeros(16), mesh, PLANE)
    with pytest.raises(bem.BemSolverError, match="rescal"):
        bem.solve_neumann(system)


def test_evaluate_interior_examples():
    mesh, f, data = _neumann(SIN2, 256)
    assert abs(bem.evaluate_interior(mesh, f, data.q, (0.5, 0.5)) - 0.5) <= 5e-3
    assert abs(bem.evaluate_interior(mesh, f, data.q, (0.0, 0.0))) <= 1e-6
    mesh, f, data = _neumann(TrigSeries(1.0), 256)
    for p in _disk_points(20):
        assert abs(bem.evaluate_interior(mesh, f, data.q, p) - 1) <= 5e-3


def test_evaluate_interior_rejects_outside_and_band():
    mesh, f, data = _neumann(SIN2, 64)
    with pytest.raises(ValueError, match="outside"):
        bem.evaluate_interior(mesh, f, data.q, (1.5, 0.0))
    with pytest.raises(ValueError, match="near_boundary"):
        bem.evaluate_interior(mesh, f, data.q, (0.99, 0.0))


@pytest.mark.parametrize(
    "spec",
    [SIN2, TrigSeries(0.3, ((1, 1.0, -0.4), (5, 0.2, 0.6))), TrigSeries(-1.0, ((8, 0.0, 1.0),))],
)
def test_gauss_compatibility(spec):
    for curve in (make_circle(), make_fourier_curve(1.0, [(3, 0.2, 0.0)])):
        mesh, _, data = _neumann(spec, 128, curve)
        q = data.q.values
        assert abs(data.flux) <= 1e-8 * np.sum(np.abs(q) * mesh.weights) + 1e-12


@pytest.mark.parametrize("spec", [SIN2, TrigSeries(0.0, ((3, 1.0, 0.0), (6, 0.0, 0.5)))])
def test_monotone_convergence(spec):
    pts = _disk_points(400)
    exact = np.array([poisson_kernel_disk(spec, DiskPoint.from_xy(*p)) for p in pts])
    errors = []
    for n in (64, 128, 256, 512):
        mesh, f, data = _neumann(spec, n)
        errors.append(np.max(np.abs(bem.evaluate_interior(mesh, f, data.q, pts) - exact)))
    assert all(b < a for a, b in zip(errors, errors[1:]))


def test_flat_self_term_option():
    # the flat-element weight is only first-order accurate but still converges
    mesh, _, data = _neumann(SIN2, 256, self_term="flat")
    assert np.max(np.abs(data.q.values - 2 * np.sin(2 * mesh.parameter_values))) <= 5e-2


def test_poisson_oracle_agreement_random_polynomials():
    rng = np.random.default_rng(11)
    pts = _disk_points(300, seed=3)
    for _ in range(5):
        coeffs = tuple((k, rng.normal(), rng.normal()) for k in range(1, 9))
        spec = TrigSeries(rng.normal(), coeffs)
        mesh, f, data = _neumann(spec, 256)
        exact = np.array([poisson_kernel_disk(spec, DiskPoint.from_xy(*p)) for p in pts])
        assert np.max(np.abs(bem.evaluate_interior(mesh, f, data.q, pts) - exact)) <= 1e-2
        q_exact = disk_neumann_data(spec, mesh.parameter_values)
        assert np.max(np.abs(data.q.values - q_exact)) <= 5e-2


def test_lobed_curve_reproduces_harmonic_polynomial():
    # u = x^2 - y^2 + 3 x y is harmonic; its trace on the lobed curve is not a trig polynomial
    curve = make_fourier_curve(1.0, [(3, 0.2, 0.0)])
    mesh = mesh_curve(curve, 256)
    x, y = mesh.nodes.T
    data = bem.solve_dirichlet(mesh, x**2 - y**2 + 3 * x * y)
    pts = _disk_points(100, rho_max=0.6)
    got = bem.evaluate_interior(mesh, x**2 - y**2 + 3 * x * y, data.q, pts)
    want = pts[:, 0] ** 2 - pts[:, 1] ** 2 + 3 * pts[:, 0] * pts[:, 1]
    assert np.max(np.abs(got - want)) <= 1e-6


def test_convention_independent():
    mesh = mesh_curve(make_circle(), 128)
    f = sample(SIN2, mesh)
    plus = bem.solve_dirichlet(mesh, f)
    minus = bem.solve_dirichlet(mesh, f, convention=PLANE.flipped())
    assert np.allclose(plus.q.values, minus.q.values, atol=1e-12)
    pts = _disk_points(10)
    assert np.allclose(
        bem.evaluate_interior(mesh, f, plus.q, pts),
        bem.evaluate_interior(mesh, f, minus.q, pts, convention=PLANE.flipped()),
        atol=1e-12,
    )
