import numpy as np
import pytest

from cmcbjorling import DomainGrid, SurfaceGrid
from cmcbjorling.errors import GridTooCoarse
from cmcbjorling.verify import (
    bjorling_residual, cmc_residual, fundamental_forms, gauss_codazzi_residual,
    hopf_rotation_check,
)


def sampled(fn, grid):
    z = grid.z()
    P = fn(z.real, z.imag)
    return SurfaceGrid(grid, P, np.zeros_like(P))


def cylinder(H):
    return lambda x, y: -1 / (2 * H) * np.stack([4 * x, np.sin(4 * y), np.cos(4 * y)], -1)


def sphere(r):
    # Mercator parametrization, conformal
    return lambda x, y: r * np.stack([np.cos(x) / np.cosh(y), np.sin(x) / np.cosh(y),
                                      np.tanh(y)], -1)


GRID = DomainGrid((-0.5, 0.5), 0.4, 81, 33)


@pytest.mark.parametrize("H", [0.5, 1.0, -1.3])
def test_analytic_cylinder(H):
    rep = fundamental_forms(sampled(cylinder(H), GRID))
    assert cmc_residual(rep, H) < 1e-5
    assert np.nanmax(np.abs(rep.K_est)) < 1e-5
    assert rep.H_crosscheck < 1e-5
    assert np.nanmax(rep.conformality_defect) < 1e-5
    # E = G = 4/H^2, e = f = 0, |g| = 8/|H|  =>  Q real with |Q| = 2/|H|
    assert np.nanmax(np.abs(np.abs(rep.Q_est) - 2 / abs(H))) < 1e-5
    assert np.nanmax(np.abs(rep.Q_est.imag)) < 1e-10
    g, c = gauss_codazzi_residual(rep.u, rep.Q_est, H, rep.hx, rep.hy)
    assert g < 1e-4 and c < 1e-6


@pytest.mark.parametrize("r", [0.7, 2.0])
def test_analytic_sphere(r):
    rep = fundamental_forms(sampled(sphere(r), GRID))
    H = np.nanmedian(rep.H_est)
    assert abs(abs(H) - 1 / r) < 1e-5
    assert cmc_residual(rep, H) < 1e-5
    assert np.nanmax(np.abs(rep.K_est - 1 / r ** 2)) < 1e-5
    assert np.nanmax(np.abs(rep.Q_est)) < 1e-5
    g, c = gauss_codazzi_residual(rep.u, rep.Q_est, H, rep.hx, rep.hy)
    assert g < 1e-4 and c < 1e-6


def test_margin_is_excluded():
    rep = fundamental_forms(sampled(cylinder(1.0), GRID))
    assert np.all(np.isnan(rep.H_est[:2])) and np.all(np.isnan(rep.H_est[:, -2:]))
    assert np.all(np.isfinite(rep.H_est[2:-2, 2:-2]))


def test_detects_perturbation():
    s = sampled(cylinder(1.0), GRID)
    base = cmc_residual(s, 1.0)
    z = GRID.z()
    bump = 1e-3 * np.exp(-((z.real / 0.2) ** 2 + ((z.imag - 0.2) / 0.1) ** 2))
    P = s.points + bump[..., None] * np.array([0.0, 0.0, 1.0])
    bad = cmc_residual(SurfaceGrid(GRID, P, s.normals), 1.0)
    assert bad > 1e-3 and bad > 10 * base


def test_convergence_under_refinement():
    coarse = DomainGrid((-0.5, 0.5), 0.4, 41, 17)
    fine = coarse.refined()
    f = sphere(0.9)
    e1 = cmc_residual(sampled(f, coarse), -1 / 0.9 if np.nanmedian(
        fundamental_forms(sampled(f, coarse)).H_est) < 0 else 1 / 0.9)
    H = np.sign(np.nanmedian(fundamental_forms(sampled(f, fine)).H_est)) / 0.9
    e2 = cmc_residual(sampled(f, fine), H)
    assert e1 / e2 >= 3


def test_grid_too_coarse():
    grid = DomainGrid((-1.0, 1.0), 1.0, 11, 11)
    with pytest.raises(GridTooCoarse):
        # a sphere wrapped several times across the domain
        fundamental_forms(sampled(lambda x, y: sphere(0.05)(6 * x, 6 * y), grid))
    with pytest.raises(GridTooCoarse):
        fundamental_forms(sampled(sphere(1.0), DomainGrid((-1, 1), 0.1, 9, 3)))


def test_hopf_rotation_identity():
    s = sampled(cylinder(1.0), GRID)
    assert hopf_rotation_check(s, s, 1.0) == 0.0
    assert hopf_rotation_check(s, s, -1.0) == 0.0
    assert hopf_rotation_check(s, s, 1j) > 1.0


def test_hopf_rotation_on_pipeline(surfaces):
    s1 = surfaces.example("cylinder")
    si = surfaces.example("cylinder", lam0=1j)
    assert hopf_rotation_check(si, s1, 1j) < 1e-3
    assert hopf_rotation_check(si, s1, 1.0) > 0.1


def test_bjorling_residual_of_exact_surface():
    s = sampled(cylinder(1.0), GRID)
    s.normals = -np.stack([np.zeros_like(s.points[..., 0]), np.sin(4 * GRID.z().imag),
                           np.cos(4 * GRID.z().imag)], -1)
    f0 = lambda x: np.stack([-2 * x, 0 * x, -0.5 + 0 * x], -1)   # noqa: E731
    v = lambda x: np.stack([0 * x, -1 + 0 * x, 0 * x], -1)       # noqa: E731
    res = bjorling_residual(s, f0, v)
    assert res["position"] < 1e-15 and res["tangent"] < 1e-12 and res["v"] < 1e-12


def test_summary_is_json_friendly():
    import json
    rep = fundamental_forms(sampled(sphere(1.0), GRID))
    text = json.dumps(rep.summary())
    assert "H_est" in text and "richardson_error" in text
