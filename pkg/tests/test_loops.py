import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cmcbjorling.errors import NearSingularLoop
from cmcbjorling.loops import (
    E1, E2, E3, I2, PlusLoop, TwistedLoop, circle_points, loop_inverse, loop_mul, loop_star,
    mul2, sample_count, samples_to_coeffs, su2_to_vec, twist_mask, vec_to_su2,
)


def random_twisted(rng, degree, scale=1.0):
    c = (rng.standard_normal((2 * degree + 1, 2, 2))
         + 1j * rng.standard_normal((2 * degree + 1, 2, 2))) * scale
    c[~twist_mask(degree)] = 0
    return TwistedLoop(c)


seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_basis_is_quaternionic():
    assert np.allclose(E1 @ E2, E3)
    assert np.allclose(E2 @ E3, E1)
    assert np.allclose(E3 @ E1, E2)
    for e in (E1, E2, E3):
        assert np.allclose(e @ e, -I2)


def test_su2_coordinates_roundtrip():
    x = np.array([0.3, -1.2, 2.5])
    X = vec_to_su2(x)
    assert np.allclose(X + X.conj().T, 0)
    assert np.allclose(su2_to_vec(X), x)
    # the bracket is twice the cross product
    y = np.array([1.0, 0.5, -0.25])
    Y = vec_to_su2(y)
    assert np.allclose(su2_to_vec(X @ Y - Y @ X), 2 * np.cross(x, y))


def test_sample_count_is_power_of_two():
    for n in (1, 8, 24, 32, 100):
        m = sample_count(n)
        assert m >= 4 * n + 4 and m & (m - 1) == 0


def test_twisting_enforced():
    c = np.zeros((3, 2, 2), complex)
    c[1, 0, 1] = 1.0            # off-diagonal on mode 0
    with pytest.raises(ValueError):
        TwistedLoop(c)


def test_evaluation_only_on_circle():
    loop = TwistedLoop.identity()
    loop(np.exp(0.3j))
    with pytest.raises(Exception):
        loop(1.5)


@settings(max_examples=25, deadline=None)
@given(seed=seeds, da=st.integers(1, 6), db=st.integers(1, 6))
def test_product_matches_pointwise(seed, da, db):
    rng = np.random.default_rng(seed)
    a, b = random_twisted(rng, da), random_twisted(rng, db)
    ab = loop_mul(a, b)
    for lam in np.exp(1j * rng.uniform(0, 2 * np.pi, 4)):
        assert np.allclose(ab(lam), a(lam) @ b(lam), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=seeds, d=st.integers(1, 8))
def test_star_is_pointwise_adjoint(seed, d):
    rng = np.random.default_rng(seed)
    a = random_twisted(rng, d)
    for lam in np.exp(1j * rng.uniform(0, 2 * np.pi, 4)):
        assert np.allclose(loop_star(a)(lam), a(lam).conj().T, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(seed=seeds)
def test_inverse_of_near_identity(seed):
    rng = np.random.default_rng(seed)
    c = random_twisted(rng, 4, 0.03).coeffs.copy()
    c[4] += I2
    a = TwistedLoop(c)
    inv = loop_inverse(a, 40)
    prod = loop_mul(a, inv)
    # truncation error is controlled by the discarded mass
    bound = 1e-10 + 4 * a.norm() * inv.spill
    for lam in circle_points(8):
        assert np.max(np.abs(prod(lam) - I2)) <= bound


def test_inverse_rejects_singular_loop():
    a = TwistedLoop.from_modes({0: np.diag([1.0, 0.0])}, 2)
    with pytest.raises(NearSingularLoop):
        loop_inverse(a)


def test_fft_roundtrip_reports_spill():
    lam = circle_points(64)
    vals = np.zeros((64, 2, 2), complex)
    vals[:, 0, 0] = np.exp(0.3 * (lam ** 2 - lam ** -2))
    vals[:, 1, 1] = 1 / vals[:, 0, 0]
    c, spill = samples_to_coeffs(vals, 24)
    assert spill < 1e-12
    c2, spill2 = samples_to_coeffs(vals, 1)
    assert spill2 > 1e-3


def test_json_roundtrip(rng):
    a = random_twisted(rng, 5)
    b = TwistedLoop.from_json(a.to_json())
    assert np.array_equal(a.coeffs, b.coeffs)


def test_dlambda_matches_difference(rng):
    a = random_twisted(rng, 4)
    lam, h = np.exp(0.7j), 1e-6
    fd = (a(lam * np.exp(1j * h)) - a(lam * np.exp(-1j * h))) / (lam * 2j * h)
    assert np.allclose(a.dlambda(lam), fd, atol=1e-7)


def test_plus_loop_on_disc():
    p = PlusLoop(np.array([I2, 0.5 * np.array([[0, 1], [1, 0]])]))
    assert np.allclose(p.at_zero(), I2)
    assert np.allclose(p(0.5), I2 + 0.25 * np.array([[0, 1], [1, 0]]))
    with pytest.raises(Exception):
        p(2.0)


def test_mul2_matches_matmul(rng):
    a = rng.standard_normal((5, 7, 2, 2)) + 1j * rng.standard_normal((5, 7, 2, 2))
    b = rng.standard_normal((5, 7, 2, 2))
    assert np.allclose(mul2(a, b), a @ b)
