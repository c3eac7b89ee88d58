"""Holomorphic frame integration, pointwise Iwasawa splitting and the Sym-Bobenko formula.

The linear ODE dPhi = Phi xi acts independently at every value of the loop
parameter, so Phi is carried as samples at the M circle points and only
converted to Laurent coefficients when the unitary factor is needed.  The
integration path from the base point runs along the real axis first and then
vertically; each grid row is split and mapped to space as soon as it has been
reached, so the full loop-valued grid never has to be held in memory.
"""
from __future__ import annotations

import logging

import numpy as np

from .bjoerling import BjoerlingData, boundary_potential, curve_frame, hopf_Q, metric_u, \
    two_parameter_potential
from .errors import CMCError, NonUnitaryFrame, StepFailure
from .factorization import UNIT_TOL, iwasawa_samples
from .grid import DomainGrid, SurfaceGrid
from .loops import (
    DEFAULT_DEGREE, E3, I2, TwistedLoop, batch_dlambda, batch_eval, circle_points, inv2, mul2,
    sample_count, samples_to_coeffs, su2_to_vec,
)

log = logging.getLogger(__name__)

ODE_TOL = 1e-12
MAX_SUBSTEPS = 1 << 14


# ---------------------------------------------------------------------------
# frame integration
# ---------------------------------------------------------------------------

def _rk4(xi, lam, Phi, za, zb, nsub):
    """Classic RK4 for dPhi/ds = Phi xi(z(s)) (zb - za) on s in [0, 1]."""
    dz = (zb - za)[..., None, None, None]
    h = 1.0 / nsub
    for n in range(nsub):
        s = n * h
        z1 = za + s * (zb - za)
        zm = z1 + 0.5 * h * (zb - za)
        z2 = z1 + h * (zb - za)
        X1 = xi.samples(z1, lam) * dz
        Xm = xi.samples(zm, lam) * dz
        X2 = xi.samples(z2, lam) * dz
        k1 = mul2(Phi, X1)
        k2 = mul2(Phi + 0.5 * h * k1, Xm)
        k3 = mul2(Phi + 0.5 * h * k2, Xm)
        k4 = mul2(Phi + h * k3, X2)
        Phi = Phi + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return Phi


class _Stepper:
    """Step-halving error control shared along one sweep."""

    def __init__(self, xi, lam, tol=ODE_TOL, nsub=1):
        self.xi, self.lam, self.tol, self.nsub = xi, lam, tol, nsub
        self.max_err = 0.0

    def advance(self, Phi, za, zb):
        # a stiff step may overflow; the error test below rejects it
        with np.errstate(over="ignore", invalid="ignore"):
            return self._advance(Phi, za, zb)

    def _advance(self, Phi, za, zb):
        coarse = _rk4(self.xi, self.lam, Phi, za, zb, self.nsub)
        while True:
            fine = _rk4(self.xi, self.lam, Phi, za, zb, 2 * self.nsub)
            scale = 1.0 + np.max(np.abs(fine))
            err = np.max(np.abs(fine - coarse)) / scale
            if err <= self.tol:
                break
            self.nsub *= 2
            if self.nsub > MAX_SUBSTEPS:
                raise StepFailure(f"step halving reached the minimum step (error {err:.3g})")
            coarse = fine
        self.max_err = max(self.max_err, err)
        # local extrapolation of the step-doubling pair
        return fine + (fine - coarse) / 15.0


def integrate_path(xi, path, degree=DEFAULT_DEGREE, tol=ODE_TOL, m=None):
    """Phi along a polyline of complex points, Phi(path[0]) = I; returns circle samples."""
    m = m or sample_count(degree)
    lam = circle_points(m)
    stepper = _Stepper(xi, lam, tol)
    Phi = np.broadcast_to(I2, (m, 2, 2)).copy()
    out = [Phi]
    for za, zb in zip(path[:-1], path[1:]):
        Phi = stepper.advance(Phi, np.asarray(za, dtype=complex), np.asarray(zb, dtype=complex))
        out.append(Phi)
    return np.array(out)


def _axis_sweep(xi, grid, lam, tol):
    """Phi at the real-axis nodes, integrating outward from the base point."""
    xs = grid.xs.astype(complex)
    i0 = grid.i0
    m = len(lam)
    Phi_axis = np.empty((grid.nx, m, 2, 2), dtype=complex)
    Phi_axis[i0] = I2
    for direction in (1, -1):
        stepper = _Stepper(xi, lam, tol)
        Phi = Phi_axis[i0].copy()
        i = i0
        while 0 <= i + direction < grid.nx:
            Phi = stepper.advance(Phi, xs[i], xs[i + direction])
            i += direction
            Phi_axis[i] = Phi
    return Phi_axis


def _row_sweep(xi, grid, lam, tol):
    """Yield (j, Phi row samples (nx, M, 2, 2)) for every grid row."""
    Phi_axis = _axis_sweep(xi, grid, lam, tol)
    zs = grid.z()
    yield grid.j0, Phi_axis
    for direction in (1, -1):
        stepper = _Stepper(xi, lam, tol)
        Phi = Phi_axis.copy()
        j = grid.j0
        while 0 <= j + direction < grid.ny:
            Phi = stepper.advance(Phi, zs[:, j], zs[:, j + direction])
            j += direction
            yield j, Phi


def integrate_frame(xi, grid, degree=DEFAULT_DEGREE, tol=ODE_TOL):
    """Holomorphic frame on every node as Laurent coefficients, shape (nx, ny, 2N+1, 2, 2).

    Memory grows with nx * ny * N; :func:`surface_from_potential` streams rows
    instead and is what the pipeline uses.
    """
    m = sample_count(degree)
    lam = circle_points(m)
    out = np.empty((grid.nx, grid.ny, 2 * degree + 1, 2, 2), dtype=complex)
    for j, rows in _row_sweep(xi, grid, lam, tol):
        out[:, j], _ = samples_to_coeffs(rows, degree)
    return out


# ---------------------------------------------------------------------------
# Sym-Bobenko
# ---------------------------------------------------------------------------

def _sym_from_values(F, dF, lam0, H, herm_tol=1e-8, unit_tol=1e-6):
    """Batched formula on F(lam0), dF/dlam(lam0); returns (points, normals)."""
    FhF = np.conj(np.swapaxes(F, -1, -2)) @ F
    defect = np.max(np.abs(FhF - I2))
    if defect > unit_tol:
        raise NonUnitaryFrame(f"unitarity defect {defect:.3g} at lam0")
    Finv, _ = inv2(F)
    conj_e3 = F @ E3 @ Finv
    X = conj_e3 + 2j * lam0 * (dF @ Finv)
    herm = 0.5 * (X + np.conj(np.swapaxes(X, -1, -2)))
    tr = X[..., 0, 0] + X[..., 1, 1]
    scale = 1.0 + np.max(np.abs(X))
    if np.max(np.abs(herm)) > herm_tol * scale or np.max(np.abs(tr)) > herm_tol * scale:
        raise NonUnitaryFrame("Sym-Bobenko matrix is not in su(2)")
    X = X - herm
    pts = (-1.0 / (2.0 * H)) * su2_to_vec(X).real
    nrm = su2_to_vec(conj_e3).real
    return pts, nrm


def sym_bobenko(F, lam0=1.0, H=1.0):
    """Sym-Bobenko point of a unitary loop ``F`` at ``lam0``."""
    lam0 = complex(lam0)
    pts, _ = _sym_from_values(F(lam0), F.dlambda(lam0), lam0, H)
    return pts


def sym_bobenko_coeffs(coeffs, lam0=1.0, H=1.0):
    """Batched version on coefficient arrays (..., 2N+1, 2, 2)."""
    lam0 = complex(lam0)
    return _sym_from_values(batch_eval(coeffs, lam0), batch_dlambda(coeffs, lam0), lam0, H)[0]


def normal_field(frames, lam0=1.0):
    """Unit normals F e3 F^-1 at lam0 for loops or coefficient arrays."""
    lam0 = complex(lam0)
    if isinstance(frames, TwistedLoop):
        F = frames(lam0)
    else:
        F = batch_eval(np.asarray(frames), lam0)
    FhF = np.conj(np.swapaxes(F, -1, -2)) @ F
    if np.max(np.abs(FhF - I2)) > 1e-6:
        raise NonUnitaryFrame("frame is not unitary at lam0")
    return su2_to_vec(F @ E3 @ inv2(F)[0]).real


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------

def surface_from_potential(xi, grid, H, lam0=1.0, degree=DEFAULT_DEGREE, unit_tol=UNIT_TOL,
                           ode_tol=ODE_TOL, normalize_base=False, keep_frames=False):
    """DPW surface of a holomorphic potential on ``grid``.

    With ``normalize_base`` the result is translated so the base point maps to
    the origin; otherwise the raw Sym-Bobenko values are returned.
    """
    H = float(H)
    lam0 = complex(lam0)
    m = sample_count(degree)
    lam = circle_points(m)
    xi.check_invariants(grid.z()[:, grid.j0])
    points = np.empty((grid.nx, grid.ny, 3))
    normals = np.empty((grid.nx, grid.ny, 3))
    frames = np.empty((grid.nx, grid.ny, 2 * degree + 1, 2, 2), dtype=complex) if keep_frames else None
    worst = {"unitarity_defect": 0.0, "spill": 0.0, "degree_used": degree}
    j_last = None
    try:
        for j, rows in _row_sweep(xi, grid, lam, ode_tol):
            j_last = j
            out = iwasawa_samples(rows, degree, unit_tol=unit_tol)
            coeffs, spill = samples_to_coeffs(out["F"], degree)
            pts, nrm = _sym_from_values(batch_eval(coeffs, lam0), batch_dlambda(coeffs, lam0),
                                        lam0, H)
            points[:, j] = pts
            normals[:, j] = nrm
            if keep_frames:
                frames[:, j] = coeffs
            worst["unitarity_defect"] = max(worst["unitarity_defect"], float(out["defect"].max()))
            worst["spill"] = max(worst["spill"], float(spill.max()))
            worst["degree_used"] = max(worst["degree_used"], int(out["degree_used"].max()))
    except CMCError as exc:
        # keep the exception type, prefix the location in the grid
        where = "on the axis sweep" if j_last is None else f"at or next to row y={grid.ys[j_last]:.6g}"
        head = exc.args[0] if exc.args else ""
        exc.args = (f"{where}: {head}",) + tuple(exc.args[1:])
        raise
    if normalize_base:
        points = points - points[grid.i0, grid.j0]
    meta = {"H": H, "lambda0": [lam0.real, lam0.imag], "degree": degree, "unit_tol": unit_tol,
            "ode_tol": ode_tol, "potential": xi.name, **worst}
    return SurfaceGrid(grid, points, normals, frames, meta)


def build_surface(data: BjoerlingData, grid: DomainGrid, lam0=1.0, degree=DEFAULT_DEGREE,
                  **kwargs):
    """Solution of the Björling problem on ``grid``.

    The boundary potential is integrated, split and mapped by the Sym-Bobenko
    formula; the base point is sent to f0(x0) and the rigid motion that put the
    frame at x0 to the identity is undone, so results are in the caller's
    coordinates.
    """
    if abs(grid.x0 - data.x0) > 1e-12:
        raise ValueError("grid base point differs from the data base point")
    xi = boundary_potential(data)
    surf = surface_from_potential(xi, grid, data.H_value, lam0, degree, normalize_base=True,
                                  **kwargs)
    R, p0 = data.rigid_motion()
    surf.points = p0 + surf.points @ R.T
    surf.normals = surf.normals @ R.T
    surf.metadata["data"] = data.name
    return surf


def family_surface(data: BjoerlingData, t, grid: DomainGrid, lam0=1.0, degree=DEFAULT_DEGREE,
                   scaled=True, **kwargs):
    """Member f^t of the two-parameter deformation of the CMC-1 surface through ``data``.

    ``data`` describes the curve and tangent planes of a CMC-1 surface (its H
    must be 1).  The potential for ``t`` is built from the metric log, eta0 and
    Hopf function along the axis; the surface is produced at mean curvature t
    and, when ``scaled``, multiplied by t so that it has mean curvature 1.
    """
    if float(data.H) != 1.0:
        raise ValueError("the deformation family starts from a CMC-1 surface")
    t = float(t)
    if t <= 0:
        raise ValueError("family parameter must be positive")
    frame = curve_frame(data)
    u0 = metric_u(data)
    eta0 = 2 * frame.a
    Q = hopf_Q(data, frame)
    xi = two_parameter_potential(u0, eta0, Q, t)
    surf = surface_from_potential(xi, grid, t, lam0, degree, normalize_base=True, **kwargs)
    R, p0 = data.rigid_motion()
    surf.points = p0 + surf.points @ R.T
    surf.normals = surf.normals @ R.T
    surf.metadata.update({"family_t": t, "data": data.name})
    return surf.scaled(t) if scaled else surf
