"""From Björling data to the boundary potential.

Given a real-analytic curve f0, a tangent-plane field v along it and a mean
curvature H, the SU(2) frame along the curve is determined by

    F0 e1 F0^-1 = f0'/|f0'|,   F0 e2 F0^-1 = v/|v|,   F0(x0) = I,

and its Maurer-Cartan form F0^-1 F0' = omega_1 e1 + omega_2 e2 + omega_3 e3
has the closed form

    omega_1 = <v', n>/2,   omega_2 = <n', t>/2,   omega_3 = <t', v>/2

in terms of the unit frame (t, v, n = t x v).  All of these are formulas in
the data, so the metric log u, u_z, the Hopf function Q and finally the
boundary potential are produced as exact closed-form expressions whose
holomorphic extensions are obtained by evaluating at complex z.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy as sp
from scipy.spatial.transform import Rotation

from .analytic import Z, AnalyticVec3, Expression, as_analytic
from .errors import FrameDiscontinuity, InvalidData, NonRegularCurve, RegularityLoss
from .grid import DomainGrid, SurfaceGrid
from .loops import E1, E2, E3, I2

ORTHO_TOL = 1e-10


def _simp(e):
    return sp.simplify(sp.sympify(e))


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _cross(a, b):
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


def quat_to_su2(q):
    """scipy quaternion (x, y, z, w) -> w I + x e1 + y e2 + z e3 (batched)."""
    q = np.asarray(q)
    return (q[..., 3, None, None] * I2 + q[..., 0, None, None] * E1
            + q[..., 1, None, None] * E2 + q[..., 2, None, None] * E3)


@dataclass
class BjoerlingData:
    """Curve ``f0``, tangent-plane field ``v`` and mean curvature ``H`` on ``J``."""

    f0: AnalyticVec3
    v: AnalyticVec3
    H: object
    x0: float = 0.0
    J: tuple = (-1.0, 1.0)
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.f0, AnalyticVec3):
            self.f0 = AnalyticVec3(self.f0)
        if not isinstance(self.v, AnalyticVec3):
            self.v = AnalyticVec3(self.v)
        if isinstance(self.H, (str, float, int)):
            self.H = sp.nsimplify(self.H, rational=True)
        else:
            self.H = sp.sympify(self.H)
        if self.H == 0:
            raise InvalidData("mean curvature must be non-zero")
        a, b = self.J
        if not a < self.x0 < b:
            raise InvalidData("base point must lie inside J")

    @property
    def H_value(self):
        return float(self.H)

    def sample_points(self, n=101):
        a, b = self.J
        return np.linspace(a, b, n + 2)[1:-1]

    def validate(self, n=101):
        """Check regularity, orthogonality and non-vanishing of v on sampled J."""
        xs = self.sample_points(n)
        fp = self.f0.differentiate()(xs)
        v = self.v(xs)
        for name, arr in (("f0", self.f0(xs)), ("v", v)):
            if np.max(np.abs(arr.imag)) > 1e-12 * (1 + np.max(np.abs(arr))):
                raise InvalidData(f"{name} is not real on J")
        fp, v = fp.real, v.real
        speed = np.linalg.norm(fp, axis=-1)
        vn = np.linalg.norm(v, axis=-1)
        if np.min(speed) <= 1e-12:
            raise NonRegularCurve("f0' vanishes on J")
        if np.min(vn) <= 1e-12:
            raise InvalidData("v vanishes on J")
        ortho = np.abs(np.sum(fp * v, axis=-1)) / (speed * vn)
        if np.max(ortho) > ORTHO_TOL:
            raise InvalidData(f"v is not orthogonal to f0' (defect {np.max(ortho):.3g})")
        return True

    # symbolic frame data, computed once -----------------------------------
    def symbolic(self):
        if "sym" in self._cache:
            return self._cache["sym"]
        f = self.f0.exprs
        fp = [sp.diff(c, Z) for c in f]
        speed = sp.sqrt(_simp(_dot(fp, fp)))
        speed = _simp(speed)
        t = [_simp(c / speed) for c in fp]
        v = self.v.exprs
        vlen = _simp(sp.sqrt(_simp(_dot(v, v))))
        vn = [_simp(c / vlen) for c in v]
        n = [_simp(c) for c in _cross(t, vn)]
        d = lambda vec: [sp.diff(c, Z) for c in vec]  # noqa: E731
        om1 = _simp(_dot(d(vn), n) / 2)
        om2 = _simp(_dot(d(n), t) / 2)
        om3 = _simp(_dot(d(t), vn) / 2)
        u = _simp(sp.log(speed / 2))
        out = {"t": t, "v": vn, "n": n, "omega": (om1, om2, om3), "u": u, "speed": speed}
        self._cache["sym"] = out
        return out

    def rigid_motion(self):
        """Rotation R (columns t, v, n at x0) and translation f0(x0).

        Internal coordinates are ``R^T (p - f0(x0))``; the pipeline maps results
        back with ``f0(x0) + R p``.
        """
        if "rigid" not in self._cache:
            s = self.symbolic()
            cols = [np.array([complex(sp.N(c.subs(Z, self.x0), 17)) for c in vec]).real
                    for vec in (s["t"], s["v"], s["n"])]
            R = np.stack(cols, axis=1)
            p0 = self.f0(self.x0).real
            self._cache["rigid"] = (R, p0)
        return self._cache["rigid"]


@dataclass
class FrameCurve:
    """SU(2) frame along the curve and the entries of its Maurer-Cartan form."""

    xs: np.ndarray
    F0: np.ndarray          # (n, 2, 2) unitary samples, F0(x0) = I
    a: Expression           # purely imaginary on J
    b: Expression
    rotation: np.ndarray    # rigid motion applied to the data

    def mc_finite_difference(self):
        """F0^-1 dF0/dx from the samples (4th order interior stencil)."""
        h = self.xs[1] - self.xs[0]
        F = self.F0
        d = (-F[4:] + 8 * F[3:-1] - 8 * F[1:-3] + F[:-4]) / (12 * h)
        mc = np.conj(np.swapaxes(F[2:-2], -1, -2)) @ d
        return self.xs[2:-2], mc


def metric_u(data):
    """u = ln(|f0'|/2) as an analytic function."""
    s = data.symbolic()
    xs = data.sample_points()
    speed = Expression(s["speed"])(xs)
    if np.min(np.abs(speed)) <= 1e-12:
        raise NonRegularCurve("f0' vanishes on J")
    return Expression(s["u"])


def _frame_samples(data, xs, max_step=0.05):
    """Continuous SU(2) lift of the rotation frames (t, v, n) at ``xs``."""
    xs = np.asarray(xs, dtype=float)
    s = data.symbolic()
    R, _ = data.rigid_motion()
    fns = [AnalyticVec3([Expression(c) for c in s[k]]) for k in ("t", "v", "n")]
    # dense walk outward from x0 so the sign can be tracked continuously
    lo, hi = min(xs.min(), data.x0), max(xs.max(), data.x0)
    n_right = max(2, int(np.ceil((hi - data.x0) / max_step)) + 1)
    n_left = max(2, int(np.ceil((data.x0 - lo) / max_step)) + 1)
    walk = np.unique(np.concatenate([np.linspace(data.x0, hi, n_right),
                                     np.linspace(lo, data.x0, n_left), xs]))
    frames = np.stack([f(walk).real for f in fns], axis=-1)   # (n, 3, 3) columns t, v, n
    frames = np.einsum("ji,njk->nik", R, frames)              # internal coordinates
    q = Rotation.from_matrix(frames).as_quat()
    k0 = int(np.argmin(np.abs(walk - data.x0)))
    if q[k0, 3] < 0:
        q[k0] = -q[k0]
    for k in range(k0 + 1, len(walk)):
        if np.dot(q[k], q[k - 1]) < 0:
            q[k] = -q[k]
    for k in range(k0 - 1, -1, -1):
        if np.dot(q[k], q[k + 1]) < 0:
            q[k] = -q[k]
    steps = np.einsum("ni,ni->n", q[1:], q[:-1])
    if np.min(steps) < np.cos(np.pi / 8):
        raise FrameDiscontinuity("frame rotates too far between samples; refine max_step")
    idx = np.searchsorted(walk, xs)
    return quat_to_su2(q[idx])


def curve_frame(data, xs=None):
    """Frame along J with F0(x0) = I and the exact Maurer-Cartan entries a, b."""
    data.validate()
    xs = data.sample_points() if xs is None else np.asarray(xs, dtype=float)
    om1, om2, om3 = data.symbolic()["omega"]
    a = Expression(_simp(sp.I * om3))
    b = Expression(_simp(om2 - sp.I * om1))
    R, _ = data.rigid_motion()
    return FrameCurve(xs, _frame_samples(data, xs), a, b, R)


def u_z_along(data, frame):
    """u_z on J: a + u_x / 2."""
    u = metric_u(data)
    return Expression(_simp(frame.a.expr + sp.diff(u.expr, Z) / 2))


def hopf_Q(data, frame):
    """Q = -2 e^u (conj(b) + H e^u) along J, extended holomorphically."""
    u = metric_u(data).expr
    bbar = frame.b.conj_ext().expr
    return Expression(_simp(-2 * sp.exp(u) * (bbar + data.H * sp.exp(u))))


class HolomorphicPotential:
    """Matrix 1-form sum_k A_k(z) lam^k dz with a finite band of modes."""

    def __init__(self, modes, name=""):
        self.modes = {}
        for k, mat in sorted(modes.items()):
            self.modes[int(k)] = [[as_analytic(mat[i][j]) for j in range(2)] for i in range(2)]
        self.name = name

    @property
    def mode_range(self):
        return min(self.modes), max(self.modes)

    def entry(self, k, i, j):
        if k not in self.modes:
            return Expression(0)
        return self.modes[k][i][j]

    def coefficient_values(self, z):
        """A_k(z) for each mode, shape z.shape + (n_modes, 2, 2)."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape + (len(self.modes), 2, 2), dtype=complex)
        for m, (k, mat) in enumerate(self.modes.items()):
            for i in range(2):
                for j in range(2):
                    f = mat[i][j]
                    if not f.is_zero():
                        out[..., m, i, j] = f(z)
        return out

    def samples(self, z, lam):
        """xi(z, lam_j), shape z.shape + (len(lam), 2, 2)."""
        A = self.coefficient_values(z)
        lam = np.asarray(lam, dtype=complex)
        out = 0
        for m, k in enumerate(self.modes):
            out = out + A[..., None, m, :, :] * (lam ** k)[:, None, None]
        return out

    def check_invariants(self, z=None):
        """Trace-free, twisted, and a_{-1} non-vanishing on the points ``z``."""
        for k, mat in self.modes.items():
            tr = mat[0][0] + mat[1][1]
            if isinstance(tr, Expression) and not tr.equals(0):
                raise InvalidData(f"mode {k} is not trace-free")
            if k % 2:
                if not (mat[0][0].is_zero() and mat[1][1].is_zero()):
                    raise InvalidData(f"odd mode {k} has a diagonal part")
            elif not (mat[0][1].is_zero() and mat[1][0].is_zero()):
                raise InvalidData(f"even mode {k} has an off-diagonal part")
        if min(self.modes) != -1:
            raise InvalidData("lowest mode must be -1")
        if z is not None:
            a = self.entry(-1, 0, 1)(np.asarray(z, dtype=complex))
            if np.min(np.abs(a)) < 1e-10:
                raise RegularityLoss("upper-right lam^-1 entry vanishes on the domain")
        return True

    def subs(self, mapping):
        return HolomorphicPotential(
            {k: [[e.subs(mapping) if isinstance(e, Expression) else e for e in row] for row in mat]
             for k, mat in self.modes.items()}, self.name)

    def pullback(self, w_of_z, dw_dz, name=None):
        """Potential in a new coordinate: xi(w(z)) w'(z)."""
        w_of_z, dw_dz = sp.sympify(w_of_z), sp.sympify(dw_dz)
        modes = {}
        for k, mat in self.modes.items():
            modes[k] = [[Expression(sp.simplify(e.expr.subs(Z, w_of_z) * dw_dz)) for e in row]
                        for row in mat]
        return HolomorphicPotential(modes, name or self.name)

    def equals(self, other):
        keys = set(self.modes) | set(other.modes)
        return all(self.entry(k, i, j).equals(other.entry(k, i, j))
                   for k in keys for i in range(2) for j in range(2))

    def to_json(self, sample_points=(0.0,)):
        pts = np.asarray(sample_points, dtype=complex)
        out = {"name": self.name, "modes": []}
        vals = self.coefficient_values(pts)
        for m, (k, mat) in enumerate(self.modes.items()):
            out["modes"].append({
                "k": k,
                "entries": [[e.to_text() for e in row] for row in mat],
                "samples": [{"z": [p.real, p.imag],
                             "m": [[[vals[q, m, i, j].real, vals[q, m, i, j].imag] for j in range(2)]
                                   for i in range(2)]} for q, p in enumerate(pts)],
            })
        return out

    def __repr__(self):
        body = ", ".join(f"{k}: {[[e.to_text() for e in row] for row in mat]}"
                         for k, mat in self.modes.items())
        return f"HolomorphicPotential({body})"


def boundary_potential(data):
    """Holomorphic extension of the Maurer-Cartan form of the frame along J."""
    frame = curve_frame(data)
    u = metric_u(data).expr
    uz = u_z_along(data, frame).expr
    Q = hopf_Q(data, frame)
    Qbar = Q.conj_ext().expr
    ux = sp.diff(u, Z)
    uzbar = ux - uz
    H = data.H
    eu = sp.exp(u)
    half = sp.Rational(1, 2)
    modes = {
        -1: [[0, _simp(-H * eu)], [_simp(half * Q.expr / eu), 0]],
        0: [[_simp(half * (uz - uzbar)), 0], [0, _simp(-half * (uz - uzbar))]],
        1: [[0, _simp(-half * Qbar / eu)], [_simp(H * eu), 0]],
    }
    pot = HolomorphicPotential(modes, name=data.name)
    pot.check_invariants(data.sample_points(21) if data.H.is_number else None)
    return pot


def two_parameter_potential(u0, eta0, Q, t):
    """Boundary potential of the member f^t of the deformation family of a CMC-1 surface.

    ``u0`` is the metric log on the axis, ``eta0 = -i u_y(x, 0)`` and ``Q`` the
    Hopf function; the family has Hopf function 2 (1 - t) e^{2 u0} + Q.
    """
    t = sp.sympify(t)
    u0, eta0, Q = (as_analytic(f).expr for f in (u0, eta0, Q))
    Qbar = Expression(Q).conj_ext().expr
    eu = sp.exp(u0)
    half = sp.Rational(1, 2)
    modes = {
        -1: [[0, _simp(-t * eu)], [_simp((1 - t) * eu + half * Q / eu), 0]],
        0: [[_simp(half * eta0), 0], [0, _simp(-half * eta0)]],
        1: [[0, _simp(-((1 - t) * eu + half * Qbar / eu))], [_simp(t * eu), 0]],
    }
    return HolomorphicPotential(modes, name=f"two_parameter(t={t})")


def family_hopf(u0, Q, t):
    """Hopf function 2 (1 - t) e^{2 u0} + Q of the deformation family."""
    return Expression(_simp(2 * (1 - sp.sympify(t)) * sp.exp(2 * as_analytic(u0).expr)
                            + as_analytic(Q).expr))


# ---------------------------------------------------------------------------
# minimal reference: Schwarz's formula
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def _segment_integral(g, za, zb):
    """Gauss-Legendre integral of g along the straight segments za -> zb (arrays)."""
    za, zb = np.asarray(za, dtype=complex), np.asarray(zb, dtype=complex)
    mid, half = (za + zb) / 2, (zb - za) / 2
    total = 0
    for s, w in zip(_GL_NODES, _GL_WEIGHTS):
        total = total + w * g(mid + half * s)
    return total * half[..., None]


def _cumulative(g, nodes, start):
    """Integral of g from nodes[start] to every node along the polyline of nodes."""
    nodes = np.asarray(nodes)
    out = np.zeros(nodes.shape + (3,), dtype=complex)
    if start + 1 < nodes.shape[0]:
        seg = _segment_integral(g, nodes[start:-1], nodes[start + 1:])
        out[start + 1:] = np.cumsum(seg, axis=0)
    if start > 0:
        seg = _segment_integral(g, nodes[1:start + 1], nodes[:start])
        out[:start] = np.cumsum(seg[::-1], axis=0)[::-1]
    return out


def schwarz_minimal(f0, n, grid: DomainGrid):
    """Minimal surface through f0 with unit normal n along it (H -> 0 reference)."""
    f0, n = AnalyticVec3(f0) if not isinstance(f0, AnalyticVec3) else f0, \
        AnalyticVec3(n) if not isinstance(n, AnalyticVec3) else n
    fp = f0.differentiate()

    def g(w):
        nw, dw = n(w), fp(w)
        return np.stack(_cross([nw[..., i] for i in range(3)], [dw[..., i] for i in range(3)]), -1)

    zs = grid.z()
    axis = _cumulative(g, zs[:, grid.j0], grid.i0)                    # (nx, 3)
    cols = _cumulative(g, zs.T, grid.j0).transpose(1, 0, 2)           # per column, from y = 0
    integral = axis[:, None, :] + cols
    phi = f0(zs) - 1j * integral
    points = phi.real
    dphi = fp(zs) - 1j * g(zs)
    fx, fy = dphi.real, -dphi.imag
    nrm = np.cross(fx, fy)
    nrm /= np.linalg.norm(nrm, axis=-1, keepdims=True)
    return SurfaceGrid(grid, points, nrm, metadata={"H": 0.0, "method": "schwarz"})
