import numpy as np
import pytest
from scipy.linalg import expm

from cmcbjorling import DomainGrid, fundamental_forms, gallery_item
from cmcbjorling.bjoerling import HolomorphicPotential, boundary_potential
from cmcbjorling.dpw import (
    integrate_frame, integrate_path, normal_field, surface_from_potential, sym_bobenko,
    sym_bobenko_coeffs,
)
from cmcbjorling.errors import OutOfDomain, StepFailure
from cmcbjorling.factorization import iwasawa
from cmcbjorling.loops import (
    E_OFF, I2, TwistedLoop, batch_eval, circle_points, inv2, sample_count, samples_to_coeffs,
)

CYL = HolomorphicPotential({-1: [[0, 1], [1, 0]]}, name="cylinder")
SMALL = DomainGrid((-0.3, 0.3), 0.2, 7, 5)


def test_zero_potential_gives_identity():
    xi = HolomorphicPotential({-1: [[0, 0], [0, 0]]})
    Phi = integrate_frame(xi, SMALL, degree=4)
    for lam in (1.0, 1j):
        assert np.allclose(batch_eval(Phi, lam), I2)


def test_cylinder_holomorphic_frame():
    Phi = integrate_frame(CYL, SMALL, degree=24)
    z = SMALL.z()
    for lam in (1.0, 1j):
        got = batch_eval(Phi, lam)
        want = np.array([[expm(zz / lam * E_OFF) for zz in row] for row in z])
        assert np.max(np.abs(got - want)) < 1e-9


def test_path_independence():
    xi = boundary_potential(gallery_item("line_theta_xsq").data)
    target = 0.3 + 0.2j
    a = integrate_path(xi, [0, 0.3, target], degree=16)[-1]
    b = integrate_path(xi, [0, 0.2j, target], degree=16)[-1]
    c = integrate_path(xi, [0, 0.1 + 0.05j, 0.15 + 0.18j, target], degree=16)[-1]
    assert np.max(np.abs(a - b)) < 1e-8 and np.max(np.abs(a - c)) < 1e-8


def test_step_failure_on_stiff_potential():
    xi = HolomorphicPotential({-1: [[0, 1e5], [1e5, 0]]})
    with pytest.raises(StepFailure):
        integrate_path(xi, [0, 1.0], degree=2)


def test_sym_bobenko_identity():
    F = TwistedLoop.identity(2)
    for H in (1.0, -0.5, 2.0):
        assert np.allclose(sym_bobenko(F, 1.0, H), [0, 0, -1 / (2 * H)])
    assert np.allclose(normal_field(F), [0, 0, 1])


@pytest.mark.parametrize("z", [0.2 + 0.1j, -0.4 + 0.3j])
def test_sym_bobenko_cylinder_closed_form(z):
    F = TwistedLoop.from_function(lambda lam: expm((z / lam - np.conj(z) * lam) * E_OFF), 24)
    H = 0.8
    x, y = z.real, z.imag
    expect = -1 / (2 * H) * np.array([4 * x, np.sin(4 * y), np.cos(4 * y)])
    assert np.allclose(sym_bobenko(F, 1.0, H), expect, atol=1e-12)


def test_sym_bobenko_gauge_and_sign_invariance(rng):
    g = TwistedLoop.from_function(lambda lam: expm((0.3 / lam + 0.2 * lam) * E_OFF), 24)
    F = iwasawa(g).F
    base = sym_bobenko(F, np.exp(0.4j), 1.3)
    for _ in range(10):
        phi = rng.uniform(0, 2 * np.pi)
        D = np.diag([np.exp(1j * phi), np.exp(-1j * phi)])
        assert np.allclose(sym_bobenko(F.right_mul_constant(D), np.exp(0.4j), 1.3), base,
                           atol=1e-14)
    minus = TwistedLoop(-F.coeffs, check=False)
    assert np.allclose(sym_bobenko(minus, np.exp(0.4j), 1.3), base, atol=1e-14)
    assert np.allclose(sym_bobenko_coeffs(F.coeffs[None], np.exp(0.4j), 1.3)[0], base)


def test_cylinder_surface_small_grid():
    grid = DomainGrid((-0.5, 0.5), 0.4, 21, 9)
    s = surface_from_potential(CYL, grid, 1.0)
    z = grid.z()
    expect = -0.5 * np.stack([4 * z.real, np.sin(4 * z.imag), np.cos(4 * z.imag)], -1)
    assert np.max(np.abs(s.points - expect)) < 1e-10
    assert np.allclose(np.linalg.norm(s.normals, axis=-1), 1, atol=1e-8)
    assert s.metadata["degree"] == 32 and s.metadata["H"] == 1.0


def test_circle_with_half_H_is_unit_cylinder(surfaces):
    s = surfaces.circle(0.5, 101, 41)
    P = s.points
    # axis e2 through the origin, radius 1/(2H) = 1
    assert np.max(np.abs(np.hypot(P[..., 0], P[..., 2]) - 1.0)) < 1e-4


def test_line_constant_theta_is_cylinder():
    item = gallery_item("line_theta_const", H=1.0)
    from cmcbjorling import build_surface
    s = build_surface(item.data, DomainGrid((-1.0, 1.0), 0.4, 41, 21))
    P = s.points
    # axis parallel to e1 through (0, 0, 1/(2H)), radius 1/(2H)
    assert np.max(np.abs(np.hypot(P[..., 1], P[..., 2] - 0.5) - 0.5)) < 1e-8
    x = s.grid.xs
    assert np.allclose(s.on_axis()[0], np.stack([2 * x, 0 * x, 0 * x], -1), atol=1e-10)


def test_normals_along_axis(surfaces):
    s = surfaces.example("delaunay_circle", H=0.75)
    x = s.grid.xs
    _, n = s.on_axis()
    assert np.allclose(n, np.stack([-np.sin(2 * x), 0 * x, np.cos(2 * x)], -1), atol=1e-10)
    s = surfaces.example("line_theta_2x")
    _, n = s.on_axis()
    th = 2 * s.grid.xs
    assert np.allclose(n, np.stack([0 * th, -np.sin(th), np.cos(th)], -1), atol=1e-10)


def test_conformality(surfaces):
    rep = surfaces.report("line_theta_xsq")
    assert np.nanmax(rep.conformality_defect) < 1e-3


def test_extended_frame_maurer_cartan_band():
    item = gallery_item("line_theta_sin2")
    grid = DomainGrid((-0.2, 0.2), 0.1, 21, 11)
    s = surface_from_potential(boundary_potential(item.data), grid, 1.0, degree=24,
                               keep_frames=True)
    m = sample_count(24)
    lam = circle_points(m)
    F = np.einsum("xykij,mk->xymij", s.frames, lam[:, None] ** np.arange(-24, 25))
    h = grid.hx
    dF = (F[:-4] - 8 * F[1:-3] + 8 * F[3:-1] - F[4:]) / (12 * h)
    mc = inv2(F[2:-2])[0] @ dF
    coeffs, _ = samples_to_coeffs(mc, 24, twisted=False)
    band = np.zeros(49, bool)
    band[23:26] = True           # modes -1, 0, +1
    assert np.max(np.abs(coeffs[..., ~band, :, :])) < 1e-4
    # mode 0 diagonal, modes +-1 off-diagonal
    assert np.max(np.abs(coeffs[..., 24, 0, 1])) < 1e-4
    assert np.max(np.abs(coeffs[..., 23, 0, 0])) < 1e-4


def test_errors_are_annotated_with_location():
    xi = HolomorphicPotential({-1: [[0, 1], ["sqrt(z - 0.1*I + 0.2)", 0]]})
    grid = DomainGrid((-0.5, 0.5), 0.2, 11, 9)
    with pytest.raises(OutOfDomain, match="row y="):
        surface_from_potential(xi, grid, 1.0, degree=8)


def test_integrate_frame_shape():
    Phi = integrate_frame(CYL, SMALL, degree=8)
    assert Phi.shape == (7, 5, 17, 2, 2)


def test_fundamental_forms_see_cmc(surfaces):
    rep = fundamental_forms(surfaces.circle(0.5, 101, 41))
    assert np.nanmax(np.abs(rep.H_est - 0.5)) < 1e-4
