"""Finite-difference geometry of sampled surfaces.

Everything here works from the point grid alone (normals are recomputed from
f_x x f_y), so it shares no code path with the loop-group construction and can
serve as an oracle for it.  Derivatives use fourth-order central stencils; the
two outermost node layers get NaN and are left out of every summary.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridTooCoarse
from .grid import SurfaceGrid

MARGIN = 2
RICHARDSON_TOL = 1e-2


def _d1(a, h, axis):
    """Fourth-order first derivative along ``axis``; NaN on the two-node margin."""
    a = np.moveaxis(a, axis, 0)
    out = np.full(a.shape, np.nan, dtype=np.result_type(a, float))
    out[2:-2] = (a[:-4] - 8 * a[1:-3] + 8 * a[3:-1] - a[4:]) / (12 * h)
    return np.moveaxis(out, 0, axis)


def _d2(a, h, axis):
    a = np.moveaxis(a, axis, 0)
    out = np.full(a.shape, np.nan, dtype=np.result_type(a, float))
    out[2:-2] = (-a[:-4] + 16 * a[1:-3] - 30 * a[2:-2] + 16 * a[3:-1] - a[4:]) / (12 * h * h)
    return np.moveaxis(out, 0, axis)


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def _stats(a):
    v = np.abs(a[np.isfinite(a)])
    if v.size == 0:
        return {"max": float("nan"), "mean": float("nan"), "q05": float("nan"),
                "q50": float("nan"), "q95": float("nan")}
    q = np.quantile(v, [0.05, 0.5, 0.95])
    return {"max": float(v.max()), "mean": float(v.mean()), "q05": float(q[0]),
            "q50": float(q[1]), "q95": float(q[2])}


@dataclass
class GeometryReport:
    """Per-node fundamental forms and derived curvature estimates.

    Arrays have the grid shape (nx, ny) and are NaN on the excluded margin.
    ``H_est`` is the form-ratio estimate, ``H_lap`` the Laplacian one used as
    its cross-check.
    """

    hx: float
    hy: float
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    e_ff: np.ndarray
    f_ff: np.ndarray
    g_ff: np.ndarray
    H_est: np.ndarray
    H_lap: np.ndarray
    K_est: np.ndarray
    Q_est: np.ndarray
    u: np.ndarray
    normal: np.ndarray
    conformality_defect: np.ndarray
    normal_defect: float = float("nan")
    richardson_error: float = float("nan")
    extras: dict = field(default_factory=dict)

    @property
    def H_crosscheck(self):
        return float(np.nanmax(np.abs(self.H_est - self.H_lap)))

    def summary(self):
        out = {name: _stats(getattr(self, name)) for name in
               ("E", "F", "G", "e_ff", "f_ff", "g_ff", "H_est", "H_lap", "K_est", "Q_est",
                "conformality_defect")}
        out["H_crosscheck"] = self.H_crosscheck
        out["normal_defect"] = self.normal_defect
        out["richardson_error"] = self.richardson_error
        out.update(self.extras)
        return out


def _forms(points, hx, hy):
    fx = _d1(points, hx, 0)
    fy = _d1(points, hy, 1)
    fxx = _d2(points, hx, 0)
    fyy = _d2(points, hy, 1)
    fxy = _d1(fx, hy, 1)
    fxy[:, :MARGIN] = np.nan
    fxy[:, -MARGIN:] = np.nan
    E, F, G = _dot(fx, fx), _dot(fx, fy), _dot(fy, fy)
    cr = np.cross(fx, fy)
    N = cr / np.linalg.norm(cr, axis=-1)[..., None]
    e, f, g = _dot(fxx, N), _dot(fxy, N), _dot(fyy, N)
    det1 = E * G - F * F
    H = (e * G - 2 * f * F + g * E) / (2 * det1)
    return {"fx": fx, "fy": fy, "E": E, "F": F, "G": G, "N": N, "e": e, "f": f, "g": g,
            "H": H, "K": (e * g - f * f) / det1, "H_lap": _dot(fxx + fyy, N) / (E + G)}


def fundamental_forms(surface: SurfaceGrid, richardson_tol=RICHARDSON_TOL) -> GeometryReport:
    """Geometry report of a sampled surface.

    The stride-2 subgrid is processed too; if the two mean-curvature estimates
    differ by more than ``richardson_tol`` (after dividing by the fourth-order
    factor 15) the sampling is declared too coarse.  Set ``richardson_tol`` to
    None to skip the check.
    """
    grid = surface.grid
    if grid.nx < 2 * MARGIN + 1 or grid.ny < 2 * MARGIN + 1:
        raise GridTooCoarse("grid has no interior nodes")
    hx, hy = grid.hx, grid.hy
    P = np.asarray(surface.points, dtype=float)
    d = _forms(P, hx, hy)
    Q = 0.25 * (d["e"] - d["g"] - 2j * d["f"])
    u = 0.5 * np.log((d["E"] + d["G"]) / 8.0)
    conf = np.maximum(np.abs(d["E"] - d["G"]), 2 * np.abs(d["F"])) / (d["E"] + d["G"])

    normal_defect = float("nan")
    if surface.normals is not None:
        normal_defect = float(np.nanmax(np.linalg.norm(d["N"] - surface.normals, axis=-1)))

    rich = float("nan")
    if richardson_tol is not None and grid.nx >= 4 * MARGIN + 3 and grid.ny >= 4 * MARGIN + 3:
        dc = _forms(P[::2, ::2], 2 * hx, 2 * hy)
        diff = np.abs(d["H"][::2, ::2] - dc["H"])
        if np.any(np.isfinite(diff)):
            rich = float(np.nanmax(diff)) / 15.0
            if rich > richardson_tol:
                raise GridTooCoarse(f"Richardson estimate {rich:.3g} exceeds {richardson_tol:.3g}")

    return GeometryReport(hx, hy, d["E"], d["F"], d["G"], d["e"], d["f"], d["g"], d["H"],
                          d["H_lap"], d["K"], Q, u, d["N"], conf, normal_defect, rich)


def _report(obj):
    return obj if isinstance(obj, GeometryReport) else fundamental_forms(obj)


def cmc_residual(surface, H) -> float:
    """max |H_est - H| over interior nodes (accepts a surface or a report)."""
    rep = _report(surface)
    return float(np.nanmax(np.abs(rep.H_est - H)))


def gauss_codazzi_residual(u_grid, Q_grid, H, hx, hy):
    """Maximum residuals of the Gauss equation and of Q_zbar = 0.

    Gauss: u_{z zbar} + H^2 e^{2u} - |Q|^2 e^{-2u} / 4, with u_{z zbar} = Laplacian / 4.
    """
    u = np.asarray(u_grid, dtype=float)
    Q = np.asarray(Q_grid, dtype=complex)
    lap = _d2(u, hx, 0) + _d2(u, hy, 1)
    gauss = 0.25 * lap + H * H * np.exp(2 * u) - 0.25 * np.abs(Q) ** 2 * np.exp(-2 * u)
    codazzi = 0.5 * (_d1(Q, hx, 0) + 1j * _d1(Q, hy, 1))
    if not np.any(np.isfinite(gauss)) or not np.any(np.isfinite(codazzi)):
        raise GridTooCoarse("grid too small for second derivatives of u and Q")
    return float(np.nanmax(np.abs(gauss))), float(np.nanmax(np.abs(codazzi)))


def hopf_rotation_check(surface_lam0, surface_1, lam0) -> float:
    """max |Q^{lam0} - lam0^{-2} Q^{1}| over common interior nodes."""
    q0 = _report(surface_lam0).Q_est
    q1 = _report(surface_1).Q_est
    return float(np.nanmax(np.abs(q0 - complex(lam0) ** -2 * q1)))


def bjorling_residual(surface: SurfaceGrid, f0, v):
    """Distance of the axis row from f0 and tangency of the normals to f0', v.

    ``f0`` and ``v`` are vector-valued callables of x (arrays of shape (n, 3)).
    Returns a dict with ``position``, ``tangent`` and ``v`` maxima.
    """
    xs = surface.grid.xs
    pts, nrm = surface.on_axis()
    c = np.real(f0(xs))
    w = np.real(v(xs))
    h = 1e-5 * max(1.0, float(np.max(np.abs(xs))))
    dc = np.real(f0(xs + h) - f0(xs - h)) / (2 * h)
    t = dc / np.linalg.norm(dc, axis=-1)[:, None]
    w = w / np.linalg.norm(w, axis=-1)[:, None]
    return {"position": float(np.max(np.linalg.norm(pts - c, axis=-1))),
            "tangent": float(np.max(np.abs(_dot(nrm, t)))),
            "v": float(np.max(np.abs(_dot(nrm, w))))}
