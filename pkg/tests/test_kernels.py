import math

import mpmath
import numpy as np
import pytest
from scipy import special as sp

from indexkernel import kernels as kn
from indexkernel.errors import DomainError

ZS = (0.5, 1.0, 2.0, 8.0)
NUS = (0.0, 0.3, 1.0)
MU_GRID = (-0.5, 0.0, 0.25, 0.4)
TAU_GRID = (0.0, 0.5, 2.0, 5.0)
X_GRID = (0.5, 1.0, 4.0)


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


# -- reductions ---------------------------------------------------------------


@pytest.mark.parametrize("z", ZS)
def test_d0_is_gaussian(z):
    assert rel(kn.parabolic_d(0.0, z), math.exp(-z * z / 4)) <= 1e-10


@pytest.mark.parametrize("z", ZS)
def test_d_minus1_is_erfc(z):
    expected = math.sqrt(math.pi / 2) * math.exp(z * z / 4) * sp.erfc(z / math.sqrt(2))
    assert rel(kn.parabolic_d(-1.0, z), expected) <= 1e-10


@pytest.mark.parametrize("x", ZS)
@pytest.mark.parametrize("nu", NUS)
def test_whittaker_zero_mu_is_macdonald(x, nu):
    expected = math.sqrt(2 * x / math.pi) * sp.kv(nu, x)
    assert rel(kn.whittaker_real_second_index(0.0, nu, 2 * x), expected) <= 1e-10


@pytest.mark.parametrize("x", ZS)
@pytest.mark.parametrize("nu", NUS)
def test_whittaker_elementary_case(x, nu):
    expected = x ** (nu + 0.5) * math.exp(-x / 2)
    assert rel(kn.whittaker_real_second_index(nu + 0.5, nu, x), expected) <= 1e-10


@pytest.mark.parametrize("x", ZS)
def test_macdonald_half_order(x):
    expected = math.sqrt(math.pi / (2 * x)) * math.exp(-x)
    got = complex(kn.macdonald_complex_order(0.5, 0.0, x))
    assert rel(got.real, expected) <= 1e-10 and got.imag == 0.0
    assert rel(kn.macdonald_real(0.5, x), expected) <= 1e-12


def test_whittaker_routes_agree_on_reductions():
    for route in ("laplace", "kummer", "mellin-barnes"):
        got = kn.whittaker_real_second_index(0.0, 0.3, 2.0, route=route)
        assert rel(got, math.sqrt(2 / math.pi) * sp.kv(0.3, 1.0)) <= 1e-9, route


def test_whittaker_kummer_pole_average_flagged():
    r = kn.whittaker_real_second_index(0.0, 0.5, 2.0, route="kummer", full_output=True)
    assert r.diagnostics.get("pole_average")
    assert rel(r.value, math.sqrt(2 / math.pi) * sp.kv(0.5, 1.0)) <= 1e-8


# -- Macdonald ----------------------------------------------------------------


@pytest.mark.parametrize("x", (0.01, 0.5, 1.0, 3.0, 20.0))
def test_macdonald_imag_zero_order(x):
    assert rel(kn.macdonald_imag(0.0, x), sp.k0(x)) <= 1e-12


def test_macdonald_imag_index_symmetry():
    for tau in (0.3, 2.0, 11.0):
        assert kn.macdonald_imag(tau, 1.3) == kn.macdonald_imag(-tau, 1.3)


def test_macdonald_imag_against_convolution_oracle():
    # K_nu(x) = (1/2)(x/2)^nu int exp(-u - x^2/4u) u^{-nu-1} du at nu = i, x = 1
    nu, x = 1j, 1.0
    with mpmath.workdps(30):
        integral = mpmath.quad(lambda u: mpmath.exp(-u - x * x / (4 * u)) * u ** (-nu - 1), [0, 1, mpmath.inf])
        oracle = float(mpmath.re(0.5 * (x / 2) ** nu * integral))
    assert rel(kn.macdonald_imag(1.0, 1.0), oracle) <= 1e-12


def test_macdonald_imag_against_mpmath_grid():
    for tau in (0.0, 0.7, 3.0, 12.0, 40.0):
        for x in (0.05, 1.0, 6.0):
            ref = float(mpmath.re(mpmath.besselk(1j * tau, x)))
            scale = max(abs(ref), math.exp(-math.pi * tau / 2) / math.sqrt(1 + tau))
            assert abs(kn.macdonald_imag(tau, x) - ref) <= 1e-10 * scale, (tau, x)


def test_macdonald_complex_order_conjugation_and_oracle():
    a = complex(kn.macdonald_complex_order(0.5, 2.0, 1.0))
    b = complex(kn.macdonald_complex_order(0.5, -2.0, 1.0))
    assert abs(a - b.conjugate()) <= 1e-15 * abs(a)
    ref = complex(mpmath.besselk(0.5 + 2j, 1.0))
    assert abs(a - ref) <= 1e-12 * abs(ref)
    c = complex(kn.macdonald_complex_order(-0.5, -2.0, 1.0))
    assert abs(a - c) <= 1e-12 * abs(a)


def test_macdonald_real_vectorized():
    x = np.array([0.1, 1.0, 5.0, 40.0])
    for nu in (0.0, 0.5, 1.7):
        np.testing.assert_allclose(kn.macdonald_real(nu, x), sp.kv(nu, x), rtol=1e-13)
        np.testing.assert_allclose(kn.macdonald_real(nu, x, scaled=True), sp.kve(nu, x), rtol=1e-13)


def test_uniform_bound_random_samples():
    rng = np.random.default_rng(2024)
    deltas = (0.0, math.pi / 6, math.pi / 3)
    for _ in range(100):
        tau, x = rng.uniform(0, 20), rng.uniform(0.05, 5)
        delta = deltas[rng.integers(3)]
        lhs = abs(kn.macdonald_imag(tau, x))
        rhs = math.exp(-delta * tau) * kn.macdonald_imag(0.0, x * math.cos(delta))
        assert lhs <= rhs + 1e-12
        assert float(kn.macdonald_bound(tau, x, delta)) == pytest.approx(rhs, rel=1e-12)


def test_bound_params_validation():
    with pytest.raises(DomainError):
        kn.BoundParams(math.pi / 2)
    with pytest.raises(DomainError):
        kn.EvalPoint(0.0, 1.0, 0.0)


# -- Whittaker with imaginary index -------------------------------------------


@pytest.mark.parametrize("mu", MU_GRID)
def test_whittaker_cross_representation(mu):
    for tau in TAU_GRID:
        for x in X_GRID:
            r = kn.whittaker_imag(mu, tau, x, full_output=True)
            assert r.route == "inverse index Fourier"
            assert rel(r.value, r.diagnostics["mellin_barnes"]) <= 1e-9, (mu, tau, x)


def test_whittaker_imag_reduces_to_macdonald():
    for tau in (0.0, 1.0, 3.0):
        for x in (0.5, 2.0):
            expected = math.sqrt(2 * x / math.pi) * kn.macdonald_imag(tau, x)
            assert rel(kn.whittaker_imag(0.0, tau, 2 * x), expected) <= 1e-10


def test_whittaker_imag_matches_mpmath():
    for mu, tau, x in ((0.25, 1.0, 1.0), (-0.5, 2.0, 4.0), (0.4, 0.5, 0.5)):
        ref = float(mpmath.re(mpmath.whitw(mu, 1j * tau, x)))
        assert rel(kn.whittaker_imag(mu, tau, x), ref) <= 1e-10


def test_whittaker_minus_half_imaginary_part_relation():
    mu, tau, x = -0.5, 1.0, 1.0
    expected = x / (tau * math.sqrt(math.pi)) * complex(kn.macdonald_complex_order(0.5, tau, x / 2)).imag
    assert rel(kn.whittaker_imag(kn.EvalPoint(mu, tau, x)), expected) <= 1e-10


def test_whittaker_tau_zero_limit_extrapolation():
    x = 1.0
    e1, e2 = 1e-2, 1e-3
    w1, w2 = kn.whittaker_imag(-0.5, e1, x), kn.whittaker_imag(-0.5, e2, x)
    # W is even in tau, so the error is O(tau^2)
    limit = (w2 * e1**2 - w1 * e2**2) / (e1**2 - e2**2)
    closed = kn.whittaker_minus_half_zero(x)
    assert rel(limit, closed) <= 1e-5
    assert rel(closed, math.sqrt(x) * sp.exp1(x) * math.exp(x / 2)) <= 1e-14


@pytest.mark.parametrize("mu", MU_GRID)
def test_whittaker_recurrence(mu):
    for x in X_GRID:
        for nu in (0.1, 0.3):
            w = kn.whittaker_real_second_index
            lhs = 2 * nu * w(mu, nu, x)
            rhs = math.sqrt(x) * (w(mu + 0.5, nu + 0.5, x) - w(mu + 0.5, 0.5 - nu, x))
            assert rel(lhs, rhs) <= 1e-9, (mu, x, nu)


def test_whittaker_imag_is_real_and_even():
    v = kn.whittaker_imag(0.25, 2.0, 1.0)
    assert isinstance(v, float)
    assert v == kn.whittaker_imag(0.25, -2.0, 1.0)
    mb = kn.whittaker_imag_mb(0.25, [0.5, 2.0, 5.0], 1.0, full_output=True)
    assert mb.diagnostics["max_imag"] <= 1e-10 * np.max(np.abs(mb.value)) + 1e-300


def test_whittaker_mb_vectorized():
    taus = np.array([0.0, 1.0, 4.0])
    vals = kn.whittaker_imag_mb(0.25, taus, 2.0)
    for t, v in zip(taus, vals):
        assert abs(v - kn.whittaker_imag(0.25, t, 2.0)) <= 1e-12 * abs(vals).max()


# -- parabolic cylinder -------------------------------------------------------


def test_parabolic_d_against_mpmath():
    for order in (-2.3, -0.5, 0.5, 0.8, 1.5, 3.0):
        for z in (0.3, 1.0, 4.0):
            assert rel(kn.parabolic_d(order, z), float(mpmath.pcfd(order, z))) <= 1e-10, (order, z)


def test_parabolic_d_scaled_consistency():
    z = np.array([0.5, 2.0, 10.0])
    np.testing.assert_allclose(
        kn.parabolic_d_scaled(0.5, z) * np.exp(-z * z / 4),
        [float(mpmath.pcfd(0.5, v)) for v in z],
        rtol=1e-10,
    )


def test_parabolic_d_large_argument_asymptotics():
    for order in (-1.5, 0.5, 2.0):
        z = 200.0
        ratio = kn.parabolic_d_scaled(order, z) / z**order
        assert abs(ratio - 1) <= abs(order * (order - 1)) / (z * z) + 1e-12


def test_parabolic_d_negative_order_routes():
    r = kn.parabolic_d(-0.7, 1.3, full_output=True)
    assert r.value == pytest.approx(float(mpmath.pcfd(-0.7, 1.3)), rel=1e-12)


# -- Lommel -------------------------------------------------------------------


def test_lommel_weighted_tau_zero():
    mu, x = 0.3, 1.5
    expected = float(mpmath.lommels2(mu, 0, x) * mpmath.gamma((1 - mu) / 2) ** 2)
    assert rel(kn.lommel_weighted(mu, 0.0, x), expected) <= 1e-10


def test_lommel_weighted_oracle():
    mu, tau, x = 0.25, 1.0, 2.0
    expected = float(mpmath.re(mpmath.lommels2(mu, 1j * tau, x)) * abs(mpmath.gamma((1 - mu + 1j * tau) / 2)) ** 2)
    assert rel(kn.lommel_weighted(mu, tau, x), expected) <= 1e-10


def test_lommel_weighted_many_matches_scalar():
    taus = np.array([0.0, 0.5, 3.0])
    vals, _ = kn.lommel_weighted_many(0.1, taus, 1.0)
    for t, v in zip(taus, vals):
        assert rel(v, kn.lommel_weighted(0.1, t, 1.0)) <= 1e-13


def test_lommel_half_values():
    for mu, x in ((0.4, 1.0), (0.0, 2.0), (-0.5, 0.3)):
        assert rel(kn.lommel_half(mu, x), float(mpmath.lommels2(mu - 0.5, 0.5, x))) <= 1e-10


def test_lommel_half_laplace_identity():
    mu, x = 0.2, 1.7
    with mpmath.workdps(30):
        integral = float(mpmath.quad(lambda u: u ** (-mu) / (u * u + x * x) * mpmath.exp(-u), [0, 1, mpmath.inf]))
    expected = x ** (-mu - 0.5) * math.gamma(1 - mu) * kn.lommel_half(mu, x)
    assert rel(integral, expected) <= 1e-10


def test_lommel_half_decay():
    mu = 0.25
    x = np.array([10.0, 100.0, 1000.0, 1e4])
    scaled = kn.lommel_half(mu, x) * x ** (1.5 - mu)
    assert np.all(scaled < 2.0) and np.all(np.diff(scaled) >= -1e-12)


def test_lommel_domain():
    with pytest.raises(DomainError):
        kn.lommel_weighted(1.0, 0.5, 1.0)
    with pytest.raises(DomainError):
        kn.lommel_half(1.2, 1.0)


# -- Euler integral for 2F1 ---------------------------------------------------


def test_hyp2f1_euler():
    w = np.array([0.0, 0.3, 2.0, 50.0])
    for a, b, c in ((0.5, 0.75, 1.75), (1.0, 0.5, 2.0), (-0.3, 1.2, 2.5)):
        got = kn.hyp2f1_euler(a, b, c, w)
        ref = [float(mpmath.hyp2f1(a, b, c, -v)) for v in w]
        np.testing.assert_allclose(got, ref, rtol=1e-13)
