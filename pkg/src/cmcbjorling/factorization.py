"""Iwasawa and Birkhoff splittings of twisted loops.

Iwasawa (g = F B, F unitary on the circle, B a plus loop with
B(0) = diag(rho, 1/rho), rho > 0).  We never work with F directly.  Put
P = g* g = B* B and C = B^{-1}; then P C = B* has no positive modes and its
constant term is diag(rho, 1/rho).  Writing X = C diag(1/rho, rho) gives the
Wiener-Hopf finite section

    sum_{j=0}^{K} P_{k-j} X_j = delta_{k0} I,      k = 0..K,

a Hermitian positive definite block-Toeplitz system.  X_0 = diag(rho^-2, rho^2)
fixes the normalization, C = X diag(rho, 1/rho), F = g C and B = C^{-1}
pointwise on the circle.  F^H F = I is the truncation certificate: when the
unitarity defect of F exceeds ``unit_tol`` the section size K is doubled.

Birkhoff (g = g_- g_+, g_-(inf) = I) is the analogous non-Hermitian system
for Y = g_+^{-1}: the modes 0..K of g Y must be (I, 0, ..., 0).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NearSingularLoop, NoConvergence, NotInBigCell, StructureViolation
from .analytic import TaylorSeries
from .loops import (
    MAX_DEGREE, I2, PlusLoop, TwistedLoop, coeffs_to_samples, inv2, sample_count,
    samples_to_coeffs,
)

UNIT_TOL = 1e-8
BIG_CELL_TOL = 1e-10


@dataclass(frozen=True)
class IwasawaResult:
    F: TwistedLoop
    B: PlusLoop
    residual: float
    unitarity_defect: float
    rho: float
    degree_used: int

    def diagnostics(self, point=None):
        return {"point": point, "residual": self.residual, "degree_used": self.degree_used,
                "in_big_cell": True}


@dataclass(frozen=True)
class BirkhoffResult:
    g_minus: TwistedLoop | None
    g_plus: PlusLoop | None
    in_big_cell: bool
    sigma_min: float
    residual: float = float("nan")


def _full_coeffs(values):
    m = values.shape[-3]
    return np.fft.fft(values, axis=-3) / m


def _block_toeplitz(full, K, lower):
    """Blocks T[k, j] = c_{k-j} for k, j = 0..K from FFT-ordered coefficients."""
    m = full.shape[-3]
    k = np.arange(K + 1)
    idx = (k[:, None] - k[None, :]) % m
    if lower and 2 * K >= m:
        raise ValueError("not enough circle samples for the requested section size")
    T = full[..., idx, :, :]                     # (..., K+1, K+1, 2, 2)
    T = np.swapaxes(T, -3, -2)                   # (..., K+1, 2, K+1, 2)
    shape = T.shape[:-4] + (2 * (K + 1), 2 * (K + 1))
    return T.reshape(shape)


def _plus_samples(blocks, m):
    """Samples on m circle points of sum_j blocks[j] lam^j, blocks (..., K+1, 2, 2)."""
    buf = np.zeros(blocks.shape[:-3] + (m, 2, 2), dtype=complex)
    buf[..., : blocks.shape[-3], :, :] = blocks
    return np.fft.ifft(buf, axis=-3) * m


def _rhs(K, batch_shape):
    e0 = np.zeros((2 * (K + 1), 2), dtype=complex)
    e0[:2] = I2
    return np.broadcast_to(e0, batch_shape + e0.shape)


def _iwasawa_section(g_vals, K):
    """One finite-section solve; returns (F_vals, C_vals, rho, defect)."""
    m = g_vals.shape[-3]
    P_vals = np.conj(np.swapaxes(g_vals, -1, -2)) @ g_vals
    T = _block_toeplitz(_full_coeffs(P_vals), K, lower=True)
    batch = T.shape[:-2]
    X = np.linalg.solve(T, _rhs(K, batch))
    X = X.reshape(batch + (K + 1, 2, 2))
    x00 = X[..., 0, 0, 0].real
    if np.any(x00 <= 0):
        raise NearSingularLoop("Toeplitz section is not positive definite")
    rho = 1.0 / np.sqrt(x00)
    D = np.zeros(batch + (2, 2), dtype=complex)
    D[..., 0, 0] = rho
    D[..., 1, 1] = 1.0 / rho
    C_blocks = X @ D[..., None, :, :]
    C_vals = _plus_samples(C_blocks, m)
    F_vals = g_vals @ C_vals
    FhF = np.conj(np.swapaxes(F_vals, -1, -2)) @ F_vals
    defect = np.max(np.abs(FhF - I2), axis=(-3, -2, -1))
    return F_vals, C_vals, rho, defect


def iwasawa_samples(g_vals, K, unit_tol=UNIT_TOL, max_degree=MAX_DEGREE):
    """Batched Iwasawa on circle samples ``g_vals`` of shape (..., M, 2, 2).

    Entries whose unitarity defect exceeds ``unit_tol`` are re-solved with a
    doubled section size until the defect is met or ``max_degree`` (or the
    sample resolution) is reached.  Returns a dict with ``F``, ``C`` (samples
    of B^{-1}), ``rho``, ``defect`` and ``degree_used`` arrays.
    """
    g_vals = np.asarray(g_vals, dtype=complex)
    m = g_vals.shape[-3]
    batch = g_vals.shape[:-3]
    det = g_vals[..., 0, 0] * g_vals[..., 1, 1] - g_vals[..., 0, 1] * g_vals[..., 1, 0]
    if np.min(np.abs(det)) < 1e-10:
        raise NearSingularLoop("loop is not invertible on the circle")
    flat = g_vals.reshape((-1, m, 2, 2))
    F = np.empty_like(flat)
    C = np.empty_like(flat)
    rho = np.empty(flat.shape[0])
    defect = np.empty(flat.shape[0])
    used = np.full(flat.shape[0], K)
    todo = np.arange(flat.shape[0])
    trace = []
    k_cap = min(max_degree, m // 2 - 1)
    while True:
        f, c, r, d = _iwasawa_section(flat[todo], K)
        F[todo], C[todo], rho[todo], defect[todo], used[todo] = f, c, r, d, K
        bad = d > unit_tol
        trace.append({"section": K, "entries": int(todo.size), "max_defect": float(d.max())})
        if not np.any(bad):
            break
        if 2 * K > k_cap:
            raise NoConvergence(
                f"unitarity defect {d.max():.3g} > {unit_tol:g} at section size {K}", trace)
        todo = todo[bad]
        K *= 2
    shape = batch + (m, 2, 2)
    return {"F": F.reshape(shape), "C": C.reshape(shape), "rho": rho.reshape(batch),
            "defect": defect.reshape(batch), "degree_used": used.reshape(batch), "trace": trace}


def iwasawa(g, degree=None, unit_tol=UNIT_TOL, fact_tol=None, max_degree=MAX_DEGREE):
    """Unique normalized splitting ``g = F B`` of a twisted loop."""
    K = degree or max(g.degree, 8)
    m = sample_count(g.degree + K)
    g_vals = coeffs_to_samples(g.coeffs, m)
    out = iwasawa_samples(g_vals, K, unit_tol, max_degree)
    n_out = max(g.degree, K)
    F_coeffs, F_spill = samples_to_coeffs(out["F"], n_out)
    B_vals, _ = inv2(out["C"])
    B_full = _full_coeffs(B_vals)
    B_coeffs = B_full[: n_out + 1]
    B_spill = float(np.sqrt(np.sum(np.abs(B_full) ** 2) - np.sum(np.abs(B_coeffs) ** 2)))
    F = TwistedLoop(F_coeffs, spill=float(F_spill), check=False)
    B = PlusLoop(B_coeffs, spill=B_spill)
    # reconstruction from the truncated factors
    pts = np.exp(2j * np.pi * np.arange(m) / m)
    Fv = coeffs_to_samples(F.coeffs, m)
    Bv = np.einsum("kij,mk->mij", B.coeffs, pts[:, None] ** np.arange(B.degree + 1))
    residual = float(np.max(np.abs(Fv @ Bv - g_vals)))
    tol = fact_tol if fact_tol is not None else 1e-9 * max(1.0, g.norm())
    if residual > tol:
        raise NoConvergence(f"reconstruction residual {residual:.3g} exceeds {tol:.3g}", out["trace"])
    return IwasawaResult(F, B, residual, float(out["defect"]), float(out["rho"]),
                         int(out["degree_used"]))


def birkhoff(g, degree=None, big_cell_tol=BIG_CELL_TOL, raise_outside=True):
    """Splitting ``g = g_- g_+`` with g_- normalized to I at lam = infinity."""
    K = degree or max(g.degree, 8)
    m = sample_count(g.degree + K)
    g_vals = coeffs_to_samples(g.coeffs, m)
    G = _block_toeplitz(_full_coeffs(g_vals), K, lower=True)
    sigma_min = float(np.linalg.svd(G, compute_uv=False)[-1])
    if sigma_min < big_cell_tol:
        if raise_outside:
            raise NotInBigCell(f"smallest singular value {sigma_min:.3g} of the Toeplitz section")
        return BirkhoffResult(None, None, False, sigma_min)
    Y = np.linalg.solve(G, _rhs(K, ())).reshape(K + 1, 2, 2)
    Y_vals = _plus_samples(Y, m)
    minus_vals = g_vals @ Y_vals
    n_out = max(g.degree, K)
    minus_coeffs, _ = samples_to_coeffs(minus_vals, n_out)
    pos = minus_coeffs[n_out + 1:]
    spill = float(np.sqrt(np.sum(np.abs(pos) ** 2)))
    minus_coeffs = minus_coeffs.copy()
    minus_coeffs[n_out + 1:] = 0
    plus_vals, _ = inv2(Y_vals)
    plus_full = _full_coeffs(plus_vals)
    g_minus = TwistedLoop(minus_coeffs, spill=spill, check=False)
    g_plus = PlusLoop(plus_full[: n_out + 1])
    recon = coeffs_to_samples(g_minus.coeffs, m) @ coeffs_to_samples(g_plus.as_twisted().coeffs, m)
    residual = float(np.max(np.abs(recon - g_vals)))
    return BirkhoffResult(g_minus, g_plus, True, sigma_min, residual)


# central difference weights, 6th order
_D1_6 = np.array([-1, 9, -45, 0, 45, -9, 1]) / 60.0


@dataclass(frozen=True)
class NormalizedPotential:
    xs: np.ndarray
    a0_samples: np.ndarray
    b0_samples: np.ndarray
    a0: TaylorSeries
    b0: TaylorSeries
    violation: float
    extra: dict = field(default_factory=dict)


def _fit_taylor(xs, vals, center, deg):
    deg = min(deg, len(xs) - 1)
    w = xs - center
    V = np.vander(w, deg + 1, increasing=True)
    coeffs, *_ = np.linalg.lstsq(V, vals, rcond=None)
    radius = max(np.max(np.abs(w)), 1e-12)
    return TaylorSeries(center, coeffs, radius * (1 + 1e-12))


def normalized_potential(F0, xs, h=1e-2, degree=None, tol=1e-7, fit_degree=8):
    """Normalized potential (a0, b0) of a real frame along the axis.

    ``F0`` maps real x to a :class:`TwistedLoop`.  The minus factor of the
    pointwise Birkhoff splitting is differentiated by 6th-order central
    differences; its Maurer-Cartan form must be off-diagonal and pure in
    lam^-1, otherwise :class:`StructureViolation` is raised.
    """
    xs = np.asarray(xs, dtype=float)
    a0, b0, worst = [], [], 0.0
    for x in xs:
        stencil = [birkhoff(F0(x + j * h), degree).g_minus for j in range(-3, 4)]
        n = max(s.degree for s in stencil)
        coeffs = [s.with_degree(n).coeffs for s in stencil]
        d = sum(w * c for w, c in zip(_D1_6, coeffs)) / h
        m = sample_count(n)
        Mv = coeffs_to_samples(coeffs[3], m)
        Dv = coeffs_to_samples(d, m)
        mc, _ = samples_to_coeffs(inv2(Mv)[0] @ Dv, n, twisted=False)
        target = mc[n - 1]
        rest = mc.copy()
        rest[n - 1, 0, 1] = 0
        rest[n - 1, 1, 0] = 0
        worst = max(worst, float(np.max(np.abs(rest))))
        a0.append(target[0, 1])
        b0.append(target[1, 0])
    if worst > tol:
        raise StructureViolation(f"Maurer-Cartan form of the minus factor has off-band content {worst:.3g}")
    a0 = np.array(a0)
    b0 = np.array(b0)
    center = float(xs[len(xs) // 2])
    return NormalizedPotential(xs, a0, b0, _fit_taylor(xs, a0, center, fit_degree),
                               _fit_taylor(xs, b0, center, fit_degree), worst)
