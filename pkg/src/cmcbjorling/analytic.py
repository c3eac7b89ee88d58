"""Real-analytic functions on an interval and their holomorphic extensions.

Two representations are supported.  :class:`Expression` wraps a closed-form
sympy expression in the complex variable ``z``; its holomorphic extension is
the same formula evaluated at complex arguments.  :class:`TaylorSeries` holds a
power series about a real center with an (estimated) radius and is the fallback
for numeric data.

The parser accepts a small infix grammar::

    parse("0.3926990817*sin(z)^2")
    parse("ln(z) + 1/z")           # x and z are the same variable
"""
from __future__ import annotations

import math

import numpy as np
import sympy as sp
from sympy.core.function import AppliedUndef
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from .errors import OutOfDomain, SingularCenter

Z = sp.Symbol("z")

_PARSE_NAMES = {
    "z": Z, "x": Z, "pi": sp.pi, "I": sp.I, "E": sp.E,
    "exp": sp.exp, "ln": sp.log, "log": sp.log, "sqrt": sp.sqrt,
    "sin": sp.sin, "cos": sp.cos, "sinh": sp.sinh, "cosh": sp.cosh,
}
_TRANSFORMS = standard_transformations + (convert_xor,)


class AnalyticFn:
    """Common interface; see :class:`Expression` and :class:`TaylorSeries`."""

    def __call__(self, z):
        return self.eval_complex(z)

    def eval_real(self, x):
        return self.eval_complex(np.asarray(x, dtype=float) + 0j)


def as_analytic(value):
    if isinstance(value, AnalyticFn):
        return value
    if isinstance(value, str):
        return parse(value)
    return Expression(value)


def parse(text):
    try:
        expr = parse_expr(text, local_dict=dict(_PARSE_NAMES), transformations=_TRANSFORMS)
    except (SyntaxError, TypeError, sp.SympifyError) as exc:
        raise ValueError(f"cannot parse expression {text!r}: {exc}") from exc
    undefined = expr.atoms(AppliedUndef)
    if undefined:
        raise ValueError(f"unknown functions in {text!r}: {sorted(map(str, undefined))}")
    extra = expr.free_symbols - {Z}
    if extra:
        raise ValueError(f"unknown names in {text!r}: {sorted(map(str, extra))}")
    return Expression(expr)


def _is_int(e):
    e = sp.sympify(e)
    return e.is_Integer or (e.is_Number and e.is_real and float(e).is_integer())


def _cut_bases(expr):
    """Arguments whose principal branch cut (negative reals) matters."""
    out = []
    for node in sp.preorder_traversal(expr):
        if isinstance(node, sp.log):
            out.append(node.args[0])
        elif isinstance(node, sp.Pow) and node.exp.is_Number and not _is_int(node.exp):
            out.append(node.base)
    return out


def _poles(expr):
    out = []
    for node in sp.preorder_traversal(expr):
        if isinstance(node, sp.Pow) and node.exp.is_Number and node.exp < 0:
            out.append(node.base)
    return out


class Expression(AnalyticFn):
    """Closed-form function of ``z``; immutable.

    Other free symbols (e.g. a symbolic mean curvature) are allowed for exact
    manipulation but must be substituted before numeric evaluation.
    """

    def __init__(self, expr):
        self.expr = sp.sympify(expr)
        self._fn = None
        self._checks = None

    # evaluation ---------------------------------------------------------------
    def _compile(self):
        if self._fn is None:
            extra = self.expr.free_symbols - {Z}
            if extra:
                raise ValueError(f"cannot evaluate {self.expr}: unbound {sorted(map(str, extra))}")
            self._fn = sp.lambdify(Z, self.expr, modules="numpy")
            cuts = [sp.lambdify(Z, b, modules="numpy") for b in _cut_bases(self.expr)]
            self._checks = cuts
        return self._fn

    def eval_complex(self, z):
        fn = self._compile()
        z = np.asarray(z, dtype=complex)
        for cut in self._checks:
            w = np.broadcast_to(np.asarray(cut(z), dtype=complex), z.shape)
            if np.any((w.real <= 0) & (np.abs(w.imag) <= 1e-14 * (1 + np.abs(w.real)))):
                raise OutOfDomain(f"{self.expr} evaluated on a branch cut")
        with np.errstate(all="ignore"):
            val = np.broadcast_to(np.asarray(fn(z), dtype=complex), z.shape).copy()
        if not np.all(np.isfinite(val)):
            raise OutOfDomain(f"{self.expr} is singular on the requested points")
        return val if val.ndim else complex(val)

    # calculus -----------------------------------------------------------------
    def differentiate(self):
        return Expression(sp.diff(self.expr, Z))

    def conj_ext(self):
        """Holomorphic extension of x -> conj(f(x)) for real x."""
        return Expression(self.expr.xreplace({sp.I: -sp.I}))

    def simplify(self):
        return Expression(sp.simplify(self.expr))

    def subs(self, mapping):
        return Expression(self.expr.subs(mapping))

    def singular_points(self):
        """Declared singularities: zeros of denominators and of branch-cut arguments."""
        pts = []
        for base in _poles(self.expr) + _cut_bases(self.expr):
            try:
                poly = sp.Poly(base, Z)
            except sp.PolynomialError:
                poly = None
            if poly is not None:
                if poly.degree() > 0:
                    pts.extend(complex(r) for r in poly.nroots())
                continue
            try:
                sols = sp.solve(base, Z)
            except NotImplementedError:
                sols = []
            pts.extend(complex(s) for s in sols if s.is_number)
        return pts

    def taylor(self, center, n_terms):
        return taylor_of(self, center, n_terms)

    # arithmetic ---------------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, TaylorSeries):
            return None
        if isinstance(other, Expression):
            return other.expr
        return sp.sympify(other)

    def __add__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else Expression(self.expr + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else Expression(self.expr - o)

    def __rsub__(self, other):
        return Expression(self._lift(other) - self.expr)

    def __mul__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else Expression(self.expr * o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Expression(self.expr / self._lift(other))

    def __neg__(self):
        return Expression(-self.expr)

    def __pow__(self, p):
        return Expression(self.expr ** sp.sympify(p))

    def equals(self, other):
        """Exact symbolic equality (after simplification of the difference)."""
        o = other.expr if isinstance(other, Expression) else sp.sympify(other)
        return sp.simplify(self.expr - o) == 0

    def is_zero(self):
        return self.expr == 0

    def to_text(self):
        return sp.sstr(self.expr)

    def __repr__(self):
        return f"Expression({self.expr})"


class TaylorSeries(AnalyticFn):
    """sum_k c_k (z - center)^k, valid for |z - center| < radius."""

    def __init__(self, center, coeffs, radius=math.inf):
        self.center = float(center)
        c = np.array(coeffs, dtype=complex)
        c.setflags(write=False)
        self.coeffs = c
        if not radius > 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)

    def eval_complex(self, z):
        z = np.asarray(z, dtype=complex)
        w = z - self.center
        if np.any(np.abs(w) >= self.radius):
            raise OutOfDomain(f"|z - {self.center}| exceeds the series radius {self.radius}")
        val = np.zeros_like(w)
        for c in self.coeffs[::-1]:
            val = val * w + c
        return val if val.ndim else complex(val)

    def differentiate(self):
        k = np.arange(1, len(self.coeffs))
        return TaylorSeries(self.center, self.coeffs[1:] * k if len(k) else [0.0], self.radius)

    def conj_ext(self):
        return TaylorSeries(self.center, np.conj(self.coeffs), self.radius)

    def _coerce(self, other):
        if isinstance(other, TaylorSeries):
            if other.center != self.center:
                raise ValueError("series about different centers")
            return other
        if isinstance(other, Expression):
            return taylor_of(other, self.center, len(self.coeffs))
        return TaylorSeries(self.center, [complex(other)], math.inf)

    def _pad(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.pad(self.coeffs, (0, n - len(self.coeffs)))
        b = np.pad(other.coeffs, (0, n - len(other.coeffs)))
        return a, b, min(self.radius, other.radius)

    def __add__(self, other):
        a, b, r = self._pad(self._coerce(other))
        return TaylorSeries(self.center, a + b, r)

    __radd__ = __add__

    def __sub__(self, other):
        a, b, r = self._pad(self._coerce(other))
        return TaylorSeries(self.center, a - b, r)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return TaylorSeries(self.center, -self.coeffs, self.radius)

    def __mul__(self, other):
        o = self._coerce(other)
        n = max(len(self.coeffs), len(o.coeffs))
        c = np.convolve(self.coeffs, o.coeffs)[:n]
        return TaylorSeries(self.center, c, min(self.radius, o.radius))

    __rmul__ = __mul__

    def is_zero(self):
        return not np.any(self.coeffs)

    def to_json(self):
        return {
            "center": self.center,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
            "radius": self.radius if math.isfinite(self.radius) else None,
        }

    @classmethod
    def from_json(cls, obj):
        radius = obj.get("radius")
        return cls(obj["center"], [complex(re, im) for re, im in obj["coeffs"]],
                   math.inf if radius is None else radius)

    def to_text(self):
        return f"taylor(center={self.center}, terms={len(self.coeffs)})"

    def __repr__(self):
        return f"TaylorSeries(center={self.center}, n={len(self.coeffs)}, radius={self.radius})"


class AnalyticVec3:
    """Three analytic coordinates in the basis e1, e2, e3."""

    def __init__(self, components):
        comps = tuple(as_analytic(c) for c in components)
        if len(comps) != 3:
            raise ValueError("need exactly three components")
        self.components = comps

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __call__(self, z):
        return np.stack([np.asarray(c(z)) for c in self.components], axis=-1)

    def differentiate(self):
        return AnalyticVec3([c.differentiate() for c in self.components])

    @property
    def exprs(self):
        if not all(isinstance(c, Expression) for c in self.components):
            raise TypeError("closed-form components required")
        return [c.expr for c in self.components]

    def __repr__(self):
        return f"AnalyticVec3({[c.to_text() for c in self.components]})"


# ---------------------------------------------------------------------------
# Taylor coefficients by forward-mode series propagation through the tree
# ---------------------------------------------------------------------------

def _series_mul(a, b):
    return np.convolve(a, b)[: len(a)]


def _series_recip(a):
    n = len(a)
    b = np.zeros(n, dtype=complex)
    b[0] = 1.0 / a[0]
    for k in range(1, n):
        b[k] = -np.dot(a[1:k + 1], b[k - 1::-1][:k]) / a[0]
    return b


def _series_pow(a, r):
    n = len(a)
    if _is_int(r) and int(r) >= 0:
        out = np.zeros(n, dtype=complex)
        out[0] = 1.0
        base, e = a, int(r)
        while e:
            if e & 1:
                out = _series_mul(out, base)
            base = _series_mul(base, base)
            e >>= 1
        return out
    if _is_int(r):
        return _series_pow(_series_recip(a), -int(r))
    r = complex(r)
    b = np.zeros(n, dtype=complex)
    b[0] = a[0] ** r
    for k in range(1, n):
        j = np.arange(1, k + 1)
        b[k] = np.sum(((r + 1) * j - k) * a[j] * b[k - j]) / (k * a[0])
    return b


def _series_exp(a):
    n = len(a)
    b = np.zeros(n, dtype=complex)
    b[0] = np.exp(a[0])
    for k in range(1, n):
        j = np.arange(1, k + 1)
        b[k] = np.sum(j * a[j] * b[k - j]) / k
    return b


def _series_log(a):
    n = len(a)
    b = np.zeros(n, dtype=complex)
    b[0] = np.log(a[0])
    for k in range(1, n):
        j = np.arange(1, k)
        b[k] = (a[k] - np.sum(j * b[j] * a[k - j]) / k) / a[0]
    return b


def _series_sincos(a, hyperbolic=False):
    n = len(a)
    s = np.zeros(n, dtype=complex)
    c = np.zeros(n, dtype=complex)
    s[0], c[0] = (np.sinh(a[0]), np.cosh(a[0])) if hyperbolic else (np.sin(a[0]), np.cos(a[0]))
    sign = 1.0 if hyperbolic else -1.0
    for k in range(1, n):
        j = np.arange(1, k + 1)
        s[k] = np.sum(j * a[j] * c[k - j]) / k
        c[k] = sign * np.sum(j * a[j] * s[k - j]) / k
    return s, c


def _propagate(expr, center, n):
    if expr == Z:
        out = np.zeros(n, dtype=complex)
        out[0] = center
        if n > 1:
            out[1] = 1.0
        return out
    if expr.is_number:
        out = np.zeros(n, dtype=complex)
        out[0] = complex(expr)
        return out
    args = expr.args
    if isinstance(expr, sp.Add):
        return sum(_propagate(a, center, n) for a in args)
    if isinstance(expr, sp.Mul):
        out = _propagate(args[0], center, n)
        for a in args[1:]:
            out = _series_mul(out, _propagate(a, center, n))
        return out
    if isinstance(expr, sp.Pow):
        base = _propagate(expr.base, center, n)
        if expr.exp.is_number:
            return _series_pow(base, expr.exp)
        return _series_exp(_series_mul(_propagate(expr.exp, center, n), _series_log(base)))
    if isinstance(expr, sp.exp):
        return _series_exp(_propagate(args[0], center, n))
    if isinstance(expr, sp.log):
        return _series_log(_propagate(args[0], center, n))
    if isinstance(expr, (sp.sin, sp.cos)):
        s, c = _series_sincos(_propagate(args[0], center, n))
        return s if isinstance(expr, sp.sin) else c
    if isinstance(expr, (sp.sinh, sp.cosh)):
        s, c = _series_sincos(_propagate(args[0], center, n), hyperbolic=True)
        return s if isinstance(expr, sp.sinh) else c
    # anything outside the closed-form basis: symbolic derivatives
    out = np.zeros(n, dtype=complex)
    d = expr
    for k in range(n):
        out[k] = complex(d.subs(Z, center).evalf()) / math.factorial(k)
        d = sp.diff(d, Z)
    return out


def taylor_of(f, center, n_terms):
    """Taylor form of a closed-form function about a real center."""
    if isinstance(f, TaylorSeries):
        raise TypeError("already a Taylor series")
    f = as_analytic(f)
    sing = f.singular_points()
    dists = [abs(s - center) for s in sing]
    if dists and min(dists) < 1e-14:
        raise SingularCenter(f"{f.expr} is singular at {center}")
    with np.errstate(all="raise"):
        try:
            coeffs = _propagate(f.expr, complex(center), int(n_terms))
        except (FloatingPointError, ZeroDivisionError) as exc:
            raise SingularCenter(f"{f.expr} is singular at {center}") from exc
    if not np.all(np.isfinite(coeffs)):
        raise SingularCenter(f"{f.expr} is singular at {center}")
    return TaylorSeries(center, coeffs, min(dists) if dists else math.inf)


def differentiate(f):
    return as_analytic(f).differentiate()


def eval_complex(f, z):
    return as_analytic(f).eval_complex(z)
