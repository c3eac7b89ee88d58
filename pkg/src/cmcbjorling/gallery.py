"""Closed-form examples: Björling data sets and holomorphic potentials.

Every entry is a factory taking keyword parameters.  Björling entries carry
their data; potential-only entries (the cylinder, the deformation family of the
sphere) carry a potential.  ``display`` holds the potential in the coordinate
in which it is usually written down, where that differs from the one used for
integration.
"""
from __future__ import annotations

from dataclasses import dataclass

import sympy as sp

from .analytic import Z
from .bjoerling import BjoerlingData, HolomorphicPotential, boundary_potential, curve_frame, \
    hopf_Q, metric_u, two_parameter_potential
from .errors import UnknownExample
from .grid import DomainGrid

DEFAULT_GRID = DomainGrid((-1.0, 1.0), 0.4, 201, 81)
CYLINDER_GRID = DomainGrid((-0.5, 0.5), 0.4, 101, 41)


@dataclass
class GalleryItem:
    name: str
    H: float
    grid: DomainGrid
    data: BjoerlingData | None = None
    potential: HolomorphicPotential | None = None
    display: HolomorphicPotential | None = None
    family_t: float | None = None
    source: BjoerlingData | None = None
    description: str = ""

    @property
    def value(self):
        """The data set if there is one, otherwise the potential."""
        return self.data if self.data is not None else self.potential

    def dpw_potential(self):
        return self.potential if self.potential is not None else boundary_potential(self.data)


def _circle_data(H):
    return BjoerlingData(["sin(2*z)", "0", "-cos(2*z)"], ["0", "1", "0"], H, 0.0, (-1.5, 1.5),
                         name=f"delaunay_circle(H={H})")


def _line_data(theta, H, name):
    return BjoerlingData(["2*z", "0", "0"], ["0", f"cos({theta})", f"sin({theta})"], H, 0.0,
                         (-1.5, 1.5), name=f"{name}(H={H})")


def cylinder(H=1.0):
    """xi = lam^-1 (0 1; 1 0) dz: the round cylinder of radius 1/(2H)."""
    pot = HolomorphicPotential({-1: [[0, 1], [1, 0]]}, name="cylinder")
    return GalleryItem("cylinder", float(H), CYLINDER_GRID, potential=pot,
                       description="x -> -(1/2H)[4x, sin 4y, cos 4y]")


def delaunay_circle(H=0.75):
    """Circle through the poles in the x1 x3-plane, tangent planes containing e2."""
    return GalleryItem("delaunay_circle", float(H), DEFAULT_GRID, data=_circle_data(H),
                       description="sphere (H=1), cylinder (H=1/2), Delaunay surfaces otherwise")


def line_theta_const(H=1.0, theta0=0.0):
    """Straight line, constant tangent plane along it."""
    return GalleryItem("line_theta_const", float(H), DEFAULT_GRID,
                       data=_line_data(sp.nsimplify(theta0), H, "line_theta_const"),
                       description="cylinder of radius 1/(2H) around the x1-axis")


def line_theta_2x(H=1.0):
    """Straight line, tangent plane turning at constant rate (theta = 2x)."""
    return GalleryItem("line_theta_2x", float(H), DEFAULT_GRID,
                       data=_line_data("2*z", H, "line_theta_2x"),
                       description="normal spirals around the line at constant speed")


def line_theta_xsq(H=1.0):
    """Straight line, tangent plane turning with theta = x^2."""
    return GalleryItem("line_theta_xsq", float(H), DEFAULT_GRID,
                       data=_line_data("z^2", H, "line_theta_xsq"),
                       description="normal rotation accelerates; one umbilic at z = i")


def line_theta_sin2(H=1.0):
    """Straight line, tangent plane oscillating with theta = (pi/8) sin^2 x."""
    return GalleryItem("line_theta_sin2", float(H), DEFAULT_GRID,
                       data=_line_data("pi/8*sin(z)^2", H, "line_theta_sin2"),
                       description="normal keeps a small periodic angle with e3")


def planar_circle_theta(amplitude=0.3, k=2, shift=-sp.pi / 4, winding=0, profile="sin2"):
    """theta(t) = shift + winding t + amplitude sin^2(k t)  (or sin(k t))."""
    if profile not in ("sin2", "sin"):
        raise ValueError("profile must be 'sin2' or 'sin'")
    amp, shift = sp.nsimplify(amplitude), sp.nsimplify(shift)
    base = sp.sin(k * Z) ** 2 if profile == "sin2" else sp.sin(k * Z)
    return shift + winding * Z + amp * base


def planar_circle_data(theta, H=1.0):
    """Unit circle in the x1 x2-plane whose tangent plane turns by 2 theta.

    With r the radial unit vector, v = -cos(2 theta) r + sin(2 theta) e3, so the
    normal is cos(2 theta) e3 + sin(2 theta) r; theta = -pi/4 gives the
    tangent planes of a surface of revolution about e3.
    """
    th = sp.sympify(theta)
    c, s = sp.cos(2 * th), sp.sin(2 * th)
    v = [-c * sp.cos(Z), -c * sp.sin(Z), s]
    return BjoerlingData(["cos(z)", "sin(z)", "0"], v, H, 0.0, (-1.5, 1.5),
                         name=f"planar_circle(theta={th}, H={H})")


def planar_circle_potential(theta, H=1.0, coordinate="w"):
    """The circle-family potential in the annulus coordinate w = e^{i t}.

    ``theta`` is a function of the real parameter t; its extension is
    theta(-i ln w) and the primed quantity is d theta / dt at t = -i ln w (the
    reading under which the form is skew-Hermitian on |w| = 1).  With
    ``coordinate='t'`` the form is pulled back by w = e^{i t}, which removes the
    logarithm and the branch cut.
    """
    th = sp.sympify(theta)
    H = sp.nsimplify(H)
    dth = sp.diff(th, Z)
    w = Z
    if coordinate == "w":
        arg = -sp.I * sp.log(w)
        th_w, dth_w = th.subs(Z, arg), dth.subs(Z, arg)
        jac = 1
    elif coordinate == "t":
        th_w, dth_w = th, dth
        w = sp.exp(sp.I * Z)
        jac = sp.I * w
    else:
        raise ValueError("coordinate must be 'w' or 't'")
    half = sp.Rational(1, 2)
    s2, c2 = sp.sin(2 * th_w), sp.cos(2 * th_w)
    modes = {
        -1: [[0, -half * H * jac], [half / w ** 2 * (s2 + H + 2 * sp.I * dth_w) * jac, 0]],
        0: [[half / w * (c2 - 1) * jac, 0], [0, -half / w * (c2 - 1) * jac]],
        1: [[0, half * (s2 + H - 2 * sp.I * dth_w) * jac], [-half / w ** 2 * H * jac, 0]],
    }
    modes = {k: [[sp.simplify(e) for e in row] for row in m] for k, m in modes.items()}
    return HolomorphicPotential(modes, name=f"planar_circle_{coordinate}(theta={th}, H={H})")


def planar_circle(H=1.0, amplitude=0.3, k=2, shift=-sp.pi / 4, winding=0, profile="sin2"):
    """CMC surface through a planar circle with a prescribed normal turning angle.

    Integration uses the Björling data in the arclength parameter t, a strip
    in the universal cover of the annulus, so no branch cut is involved.
    """
    th = planar_circle_theta(amplitude, k, shift, winding, profile)
    return GalleryItem("planar_circle", float(H), DEFAULT_GRID, data=planar_circle_data(th, H),
                       display=planar_circle_potential(th, H, "w"),
                       description=f"theta(t) = {th}")


def two_param_sphere(t=0.75):
    """Member t of the deformation family of the unit sphere through a great circle."""
    data = _circle_data(1)
    frame = curve_frame(data)
    pot = two_parameter_potential(metric_u(data), 2 * frame.a, hopf_Q(data, frame), t)
    return GalleryItem("two_param_sphere", float(t), DEFAULT_GRID, potential=pot,
                       family_t=float(t), source=data, description="CMC-1 after scaling by t")


def catenoid_data():
    """Waist circle of the catenoid with radial unit normal (minimal reference)."""
    return ["cos(z)", "sin(z)", "0"], ["cos(z)", "sin(z)", "0"]


GALLERY = {
    "cylinder": cylinder,
    "delaunay_circle": delaunay_circle,
    "line_theta_const": line_theta_const,
    "line_theta_2x": line_theta_2x,
    "line_theta_xsq": line_theta_xsq,
    "line_theta_sin2": line_theta_sin2,
    "planar_circle": planar_circle,
    "two_param_sphere": two_param_sphere,
}


def gallery_item(name, **params) -> GalleryItem:
    try:
        factory = GALLERY[name]
    except KeyError:
        raise UnknownExample(f"unknown example {name!r}; choose from {sorted(GALLERY)}") from None
    return factory(**params)


def example_gallery(name, **params):
    """Björling data or holomorphic potential of a named example."""
    return gallery_item(name, **params).value
