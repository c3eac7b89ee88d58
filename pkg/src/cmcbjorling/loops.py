"""Twisted SL(2,C) loops stored as truncated Laurent series in the loop parameter.

A loop is kept as an array of 2x2 coefficient matrices ``coeffs[k + N]`` for
modes ``k = -N..N``.  Products, inverses and the like are computed either by
exact convolution of coefficients or pointwise on ``M`` equispaced samples of
the unit circle, ``lam_j = exp(2 pi i j / M)``, and transformed back with the
FFT.  Every truncating operation records the Frobenius mass it discarded in
the ``spill`` attribute of the result so accuracy stays observable.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NearSingularLoop, OutOfDomain

# su(2) basis; E3 is identified with R^3 via <X, Y> = -tr(XY)/2.
E1 = np.array([[0, -1j], [-1j, 0]])
E2 = np.array([[0, 1], [-1, 0]], dtype=complex)
E3 = np.array([[1j, 0], [0, -1j]])
E_OFF = np.array([[0, 1], [1, 0]], dtype=complex)
I2 = np.eye(2, dtype=complex)

DEFAULT_DEGREE = 32
MAX_DEGREE = 256
CIRCLE_TOL = 1e-12

# parity mask: True where an entry is allowed to be nonzero for even / odd k
_EVEN_MASK = np.array([[True, False], [False, True]])
_ODD_MASK = ~_EVEN_MASK


def sample_count(degree):
    """Smallest power of two >= 4N + 4."""
    m = 4
    while m < 4 * degree + 4:
        m *= 2
    return m


def circle_points(m):
    return np.exp(2j * np.pi * np.arange(m) / m)


def twist_mask(degree):
    """Boolean mask of shape (2N+1, 2, 2) marking the entries the twisting allows."""
    ks = np.arange(-degree, degree + 1)
    return np.where((ks % 2 == 0)[:, None, None], _EVEN_MASK, _ODD_MASK)


def vec_to_su2(x):
    """R^3 coordinates (..., 3) -> su(2) matrices (..., 2, 2)."""
    x = np.asarray(x)
    return x[..., 0, None, None] * E1 + x[..., 1, None, None] * E2 + x[..., 2, None, None] * E3


def su2_to_vec(X):
    """Coordinates <X, e_i> = -tr(X e_i)/2 of (..., 2, 2) matrices, complex-valued."""
    return np.stack([-0.5 * np.einsum("...ij,ji->...", X, E) for E in (E1, E2, E3)], axis=-1)


# ---------------------------------------------------------------------------
# batch kernels: mode axis is -3, leading axes are arbitrary batch axes
# ---------------------------------------------------------------------------

def coeffs_to_samples(coeffs, m):
    """Evaluate Laurent coefficients (..., 2N+1, 2, 2) at the m circle points."""
    coeffs = np.asarray(coeffs, dtype=complex)
    n = (coeffs.shape[-3] - 1) // 2
    if m < 2 * n + 1:
        raise ValueError(f"{m} samples cannot resolve degree {n}")
    buf = np.zeros(coeffs.shape[:-3] + (m, 2, 2), dtype=complex)
    ks = np.arange(-n, n + 1)
    buf[..., ks % m, :, :] = coeffs
    return np.fft.ifft(buf, axis=-3) * m


def samples_to_coeffs(values, degree, twisted=True):
    """Inverse of :func:`coeffs_to_samples` truncated to ``degree``.

    Returns ``(coeffs, spill)`` where ``spill`` is the Frobenius norm of the
    discarded modes (per batch entry), including any entries removed by the
    twisting projection.
    """
    values = np.asarray(values, dtype=complex)
    m = values.shape[-3]
    full = np.fft.fft(values, axis=-3) / m
    ks = np.arange(-degree, degree + 1)
    if 2 * degree + 1 > m:
        raise ValueError(f"degree {degree} exceeds what {m} samples resolve")
    coeffs = full[..., ks % m, :, :]
    total = np.sum(np.abs(full) ** 2, axis=(-3, -2, -1))
    if twisted:
        mask = twist_mask(degree)
        coeffs = np.where(mask, coeffs, 0.0)
    kept = np.sum(np.abs(coeffs) ** 2, axis=(-3, -2, -1))
    spill = np.sqrt(np.maximum(total - kept, 0.0))
    return coeffs, spill


def batch_eval(coeffs, lam):
    """Sum_k C_k lam^k for coefficient batches (..., 2N+1, 2, 2)."""
    coeffs = np.asarray(coeffs)
    n = (coeffs.shape[-3] - 1) // 2
    powers = complex(lam) ** np.arange(-n, n + 1)
    return np.einsum("...kij,k->...ij", coeffs, powers)


def batch_dlambda(coeffs, lam):
    """Sum_k k C_k lam^(k-1) for coefficient batches."""
    coeffs = np.asarray(coeffs)
    n = (coeffs.shape[-3] - 1) // 2
    ks = np.arange(-n, n + 1)
    return np.einsum("...kij,k->...ij", coeffs, ks * complex(lam) ** (ks - 1.0))


def inv2(a):
    """Batched inverse of 2x2 matrices via the adjugate; returns (inverse, det)."""
    det = a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]
    adj = np.empty_like(a)
    adj[..., 0, 0] = a[..., 1, 1]
    adj[..., 1, 1] = a[..., 0, 0]
    adj[..., 0, 1] = -a[..., 0, 1]
    adj[..., 1, 0] = -a[..., 1, 0]
    return adj / det[..., None, None], det


def mul2(a, b):
    """Batched 2x2 product; much faster than ``@`` for stacks of tiny matrices."""
    out = np.empty(np.broadcast_shapes(a.shape, b.shape), dtype=np.result_type(a, b))
    a00, a01, a10, a11 = a[..., 0, 0], a[..., 0, 1], a[..., 1, 0], a[..., 1, 1]
    b00, b01, b10, b11 = b[..., 0, 0], b[..., 0, 1], b[..., 1, 0], b[..., 1, 1]
    out[..., 0, 0] = a00 * b00 + a01 * b10
    out[..., 0, 1] = a00 * b01 + a01 * b11
    out[..., 1, 0] = a10 * b00 + a11 * b10
    out[..., 1, 1] = a10 * b01 + a11 * b11
    return out


def _check_on_circle(lam):
    if abs(abs(lam) - 1.0) > CIRCLE_TOL:
        raise OutOfDomain(f"loop parameter {lam!r} is not on the unit circle")


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CircleSamples:
    values: np.ndarray  # (M, 2, 2)

    @property
    def m(self):
        return self.values.shape[0]

    def to_loop(self, degree):
        coeffs, spill = samples_to_coeffs(self.values, degree)
        return TwistedLoop(coeffs, spill=float(spill))


class TwistedLoop:
    """Truncated twisted loop ``lam -> sum_{|k|<=N} C_k lam^k``.

    Diagonal entries live on even modes and off-diagonal entries on odd
    modes.  Instances are treated as immutable.
    """

    __slots__ = ("coeffs", "degree", "spill")

    def __init__(self, coeffs, spill=0.0, check=True):
        coeffs = np.array(coeffs, dtype=complex)
        if coeffs.ndim != 3 or coeffs.shape[1:] != (2, 2) or coeffs.shape[0] % 2 != 1:
            raise ValueError("coeffs must have shape (2N+1, 2, 2)")
        degree = (coeffs.shape[0] - 1) // 2
        if check:
            bad = np.abs(coeffs[~twist_mask(degree)])
            if bad.size and bad.max() > 0:
                raise ValueError("coefficients violate the twisting condition")
        coeffs.setflags(write=False)
        self.coeffs = coeffs
        self.degree = degree
        self.spill = float(spill)

    # construction -----------------------------------------------------------
    @classmethod
    def from_modes(cls, modes, degree=DEFAULT_DEGREE):
        c = np.zeros((2 * degree + 1, 2, 2), dtype=complex)
        for k, m in modes.items():
            if abs(k) > degree:
                raise ValueError(f"mode {k} exceeds degree {degree}")
            c[k + degree] = m
        return cls(c)

    @classmethod
    def constant(cls, matrix, degree=1):
        return cls.from_modes({0: np.asarray(matrix, dtype=complex)}, degree)

    @classmethod
    def identity(cls, degree=1):
        return cls.constant(I2, degree)

    @classmethod
    def from_function(cls, func, degree=DEFAULT_DEGREE, m=None):
        """Sample a callable ``lam -> 2x2`` on the circle and keep ``degree`` modes."""
        m = m or sample_count(degree)
        vals = np.array([func(lam) for lam in circle_points(m)], dtype=complex)
        return CircleSamples(vals).to_loop(degree)

    def mode(self, k):
        if abs(k) > self.degree:
            return np.zeros((2, 2), dtype=complex)
        return self.coeffs[k + self.degree]

    def with_degree(self, degree):
        """Pad or truncate to a new degree (truncation mass goes into spill)."""
        if degree >= self.degree:
            pad = degree - self.degree
            c = np.pad(self.coeffs, ((pad, pad), (0, 0), (0, 0)))
            return TwistedLoop(c, spill=self.spill, check=False)
        cut = self.degree - degree
        kept = self.coeffs[cut:-cut]
        lost = np.sqrt(np.sum(np.abs(self.coeffs) ** 2) - np.sum(np.abs(kept) ** 2))
        return TwistedLoop(kept, spill=self.spill + lost, check=False)

    # evaluation ---------------------------------------------------------------
    def __call__(self, lam):
        _check_on_circle(lam)
        return batch_eval(self.coeffs, lam)

    def dlambda(self, lam):
        _check_on_circle(lam)
        return batch_dlambda(self.coeffs, lam)

    def to_samples(self, m=None):
        m = m or sample_count(self.degree)
        return CircleSamples(coeffs_to_samples(self.coeffs, m))

    def det_defect(self, m=None):
        v = self.to_samples(m).values
        return float(np.max(np.abs(np.linalg.det(v) - 1.0)))

    def norm(self):
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    # algebra ------------------------------------------------------------------
    def __matmul__(self, other):
        return loop_mul(self, other)

    def star(self):
        return loop_star(self)

    def inverse(self, degree=None):
        return loop_inverse(self, degree)

    def right_mul_constant(self, matrix):
        c = np.einsum("kij,jl->kil", self.coeffs, matrix)
        return TwistedLoop(c, spill=self.spill)

    # serialization ------------------------------------------------------------
    def to_json(self):
        modes = []
        for k in range(-self.degree, self.degree + 1):
            m = self.mode(k)
            if np.any(m != 0):
                modes.append({"k": k, "m": [[[float(z.real), float(z.imag)] for z in row] for row in m]})
        return {"degree": self.degree, "modes": modes}

    @classmethod
    def from_json(cls, obj):
        degree = int(obj["degree"])
        modes = {}
        for entry in obj["modes"]:
            modes[int(entry["k"])] = np.array([[complex(re, im) for re, im in row] for row in entry["m"]])
        return cls.from_modes(modes, degree)

    def __repr__(self):
        return f"TwistedLoop(degree={self.degree}, spill={self.spill:.3g})"


class PlusLoop:
    """Loop with modes 0..N only; extends holomorphically to the unit disc."""

    __slots__ = ("coeffs", "degree", "spill")

    def __init__(self, coeffs, spill=0.0):
        coeffs = np.array(coeffs, dtype=complex)
        coeffs.setflags(write=False)
        self.coeffs = coeffs
        self.degree = coeffs.shape[0] - 1
        self.spill = float(spill)

    def __call__(self, lam):
        if abs(lam) > 1.0 + CIRCLE_TOL:
            raise OutOfDomain("plus loops are evaluated on the closed unit disc")
        return np.einsum("kij,k->ij", self.coeffs, complex(lam) ** np.arange(self.degree + 1))

    def at_zero(self):
        return self.coeffs[0]

    def as_twisted(self):
        c = np.concatenate([np.zeros((self.degree, 2, 2), dtype=complex), self.coeffs])
        return TwistedLoop(np.where(twist_mask(self.degree), c, 0.0), spill=self.spill, check=False)

    def __repr__(self):
        return f"PlusLoop(degree={self.degree})"


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def loop_eval(a, lam):
    return a(lam)


def loop_dlambda_eval(a, lam):
    return a.dlambda(lam)


def loop_mul(a, b, max_degree=MAX_DEGREE):
    """Truncated convolution; result degree is min(N_A + N_B, max_degree)."""
    full_deg = a.degree + b.degree
    full = np.zeros((2 * full_deg + 1, 2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            for l in range(2):
                full[:, i, j] += np.convolve(a.coeffs[:, i, l], b.coeffs[:, l, j])
    out = TwistedLoop(full, spill=a.spill + b.spill, check=False)
    if full_deg > max_degree:
        out = out.with_degree(max_degree)
    return out


def loop_star(a):
    """lam -> A(lam)^H on the circle: C_k -> (C_{-k})^H."""
    c = np.conj(np.transpose(a.coeffs[::-1], (0, 2, 1)))
    return TwistedLoop(c, spill=a.spill, check=False)


def loop_inverse(a, degree=None, det_floor=1e-10):
    degree = a.degree if degree is None else degree
    m = sample_count(max(degree, a.degree))
    vals = coeffs_to_samples(a.coeffs, m)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv, det = inv2(vals)
    if np.min(np.abs(det)) < det_floor:
        raise NearSingularLoop(f"min |det| on the circle is {np.min(np.abs(det)):.3g}")
    coeffs, spill = samples_to_coeffs(inv, degree)
    return TwistedLoop(coeffs, spill=a.spill + float(spill), check=False)
