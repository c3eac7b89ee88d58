import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from cmcbjorling.errors import NotInBigCell
from cmcbjorling.factorization import birkhoff, iwasawa, iwasawa_samples, normalized_potential
from cmcbjorling.loops import E_OFF, I2, TwistedLoop, circle_points

from loopgen import random_unitary_loop, synthetic_pair

LAM8 = circle_points(8)


def cylinder_phi(z, degree=24):
    return TwistedLoop.from_function(lambda lam: expm(z / lam * E_OFF), degree)


def cylinder_factors(z):
    F = lambda lam: expm((z / lam - np.conj(z) * lam) * E_OFF)  # noqa: E731
    B = lambda lam: expm(np.conj(z) * lam * E_OFF)              # noqa: E731
    return F, B


@pytest.mark.parametrize("z", [0.3, 0.3 + 0.2j, -0.5 + 0.4j])
def test_cylinder_closed_form(z):
    res = iwasawa(cylinder_phi(z), degree=24)
    F, B = cylinder_factors(z)
    for lam in LAM8:
        assert np.max(np.abs(res.F(lam) - F(lam))) < 1e-10
        assert np.max(np.abs(res.B(lam) - B(lam))) < 1e-10
    assert res.unitarity_defect < 1e-12
    assert res.rho == pytest.approx(1.0)


def test_identity_splits_trivially():
    res = iwasawa(TwistedLoop.identity(4))
    assert np.allclose(res.F(1.0), I2) and np.allclose(res.B.at_zero(), I2)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_recovers_synthetic_factors(seed):
    rng = np.random.default_rng(seed)
    F, B, g = synthetic_pair(rng)
    res = iwasawa(g)
    for lam in LAM8:
        assert np.max(np.abs(res.F(lam) - F(lam))) < 1e-7
        assert np.max(np.abs(res.B(lam) - B(lam))) < 1e-7
    assert res.unitarity_defect < 1e-8
    assert res.residual < 1e-9
    B0 = res.B.at_zero()
    assert abs(B0[0, 1]) < 1e-10 and abs(B0[1, 0]) < 1e-10
    assert B0[0, 0].real > 0 and abs(B0[0, 0].imag) < 1e-10


def test_unitary_loop_is_its_own_factor(rng):
    U = random_unitary_loop(rng, 5)
    res = iwasawa(U)
    for lam in LAM8:
        assert np.allclose(res.F(lam), U(lam), atol=1e-10)
        assert np.allclose(res.B(lam), I2, atol=1e-10)


def test_batched_samples_agree_with_single(rng):
    pairs = [synthetic_pair(rng, 4) for _ in range(3)]
    m = 64
    vals = np.stack([g.to_samples(m).values for _, _, g in pairs])
    out = iwasawa_samples(vals, 16)
    for (F, _, _), Fs in zip(pairs, out["F"]):
        Fl = TwistedLoop(np.fft.fftshift(np.fft.fft(Fs, axis=0) / m, axes=0)[m // 2 - 16: m // 2 + 17],
                         check=False)
        assert np.allclose(Fl(np.exp(0.4j)), F(np.exp(0.4j)), atol=1e-9)


def test_birkhoff_commuting_product():
    z = 0.4 + 0.1j
    g = TwistedLoop.from_function(lambda lam: expm((z / lam + 0.3 * lam) * E_OFF), 24)
    res = birkhoff(g)
    assert res.in_big_cell
    for lam in LAM8:
        assert np.allclose(res.g_minus(lam), expm(z / lam * E_OFF), atol=1e-10)
        assert np.allclose(res.g_plus(lam), expm(0.3 * lam * E_OFF), atol=1e-10)


def test_birkhoff_outside_big_cell():
    w = TwistedLoop.from_modes({-1: np.array([[0, 1], [0, 0]]), 1: np.array([[0, 0], [-1, 0]])}, 1)
    with pytest.raises(NotInBigCell):
        birkhoff(w)
    assert not birkhoff(w, raise_outside=False).in_big_cell


def test_normalized_potential_of_cylinder_frame():
    H = 0.7
    frame = lambda x: TwistedLoop.from_function(  # noqa: E731
        lambda lam: expm(x * (-H / lam + H * lam) * E_OFF), 24)
    npot = normalized_potential(frame, np.linspace(-0.3, 0.3, 5))
    assert np.max(np.abs(npot.a0_samples + H)) < 1e-8
    assert np.max(np.abs(npot.b0_samples + H)) < 1e-8
