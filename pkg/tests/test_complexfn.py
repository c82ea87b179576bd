import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from indexkernel import complexfn as cf
from indexkernel.errors import ConvergenceError, DomainError, OverflowSignal, PoleError


def _box_points(n, seed=0):
    rng = np.random.default_rng(seed)
    z = rng.uniform(-50, 50, n) + 1j * rng.uniform(-50, 50, n)
    keep = (np.abs(z) >= 0.1) & (np.abs(z) <= 50)
    return z[keep]


def test_gamma_trivial_values():
    assert cf.gamma(1.0) == pytest.approx(1.0, rel=1e-15)
    assert cf.gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert abs(cf.gamma(0.5 + 1j)) ** 2 == pytest.approx(math.pi / math.cosh(math.pi), rel=1e-13)


def test_gamma_against_mpmath_on_box():
    z = _box_points(3000, seed=1)
    got = cf.gamma(z)
    ref = np.array([complex(mpmath.gamma(complex(v))) for v in z])
    rel = np.abs(got - ref) / np.abs(ref)
    assert rel.max() <= 1e-13


def test_gamma_near_negative_integers():
    for z in (-0.999, -1.001, -2.5, -7.25, -19.9):
        ref = complex(mpmath.gamma(z))
        assert abs(cf.gamma(z) - ref) / abs(ref) < 1e-13


def test_gamma_conjugate_symmetry():
    z = _box_points(12000, seed=2)[:10000]
    np.testing.assert_allclose(cf.gamma(np.conj(z)), np.conj(cf.gamma(z)), rtol=1e-15, atol=0)


def test_gamma_recurrence():
    z = _box_points(2000, seed=3)
    z = z[np.abs(z + 1) <= 50]
    np.testing.assert_allclose(cf.gamma(z + 1), z * cf.gamma(z), rtol=1e-12)


def test_gamma_poles_and_overflow():
    for z in (0.0, -1.0, -30.0):
        with pytest.raises(PoleError):
            cf.gamma(z)
    with pytest.raises(OverflowSignal):
        cf.gamma(200.0)


def test_gamma_modulus_sq_values():
    assert cf.gamma_modulus_sq(0.5, 0.0) == pytest.approx(math.pi, rel=1e-14)
    assert cf.gamma_modulus_sq(0.5, 1.0) == pytest.approx(math.pi / math.cosh(math.pi), rel=1e-13)
    # |Gamma(1 + it)|^2 = pi t / sinh(pi t)
    assert cf.gamma_modulus_sq(1.0, 2.0) == pytest.approx(2 * math.pi / math.sinh(2 * math.pi), rel=1e-13)


def test_gamma_modulus_sq_large_tau_in_log_space():
    # pi / cosh(pi t) underflows at t = 300 but its logarithm does not.
    log_ref = math.log(2 * math.pi) - math.pi * 300.0
    assert cf.log_gamma_modulus_sq(0.5, 300.0) == pytest.approx(log_ref, rel=1e-14)
    assert cf.gamma_modulus_sq(0.5, 300.0) == 0.0


@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, 5.0), st.floats(-60.0, 60.0))
def test_gamma_modulus_sq_even_in_tau(a, tau):
    assert cf.gamma_modulus_sq(a, tau) == cf.gamma_modulus_sq(a, -tau)


def test_erfc_values_and_complement():
    assert cf.erfc(0.0) == 1.0
    ref = float(mpmath.quad(lambda t: 2 / mpmath.sqrt(mpmath.pi) * mpmath.exp(-t * t), [1, mpmath.inf]))
    assert cf.erfc(1.0) == pytest.approx(ref, rel=1e-13)
    x = np.linspace(-6, 6, 241)
    np.testing.assert_allclose(cf.erfc(x) + cf.erfc(-x), 2.0, atol=1e-13, rtol=0)
    assert np.all(np.diff(cf.erfc(x)) <= 0)


def test_erfc_large_argument_asymptotics():
    x = 20.0
    leading = math.exp(-x * x) / (x * math.sqrt(math.pi))
    assert cf.erfc(x) / leading == pytest.approx(1.0, abs=2e-3)
    assert cf.erfcx(x) == pytest.approx(1 / (x * math.sqrt(math.pi)) * (1 - 1 / (2 * x * x)), rel=1e-5)


def test_exp_integral_e1():
    for x in (1.0, 10.0, 0.01):
        ref = float(mpmath.quad(lambda t: mpmath.exp(-t) / t, [x, x + 1, mpmath.inf]))
        assert cf.exp_integral_e1(x) == pytest.approx(ref, rel=1e-12)
    assert cf.exp_integral_e1(10.0) * 10.0 / math.exp(-10.0) == pytest.approx(1.0, abs=0.1)
    # logarithmic singularity at the origin
    assert cf.exp_integral_e1(1e-12) / -math.log(1e-12) == pytest.approx(1.0, abs=0.03)
    for bad in (0.0, -1.0):
        with pytest.raises(DomainError):
            cf.exp_integral_e1(bad)


def test_hyp1f1_trivial_identities():
    assert cf.hyp1f1(0.3, 1.7, 0.0) == 1.0
    for x in (-20.0, -1.0, 0.5, 3.0, 40.0):
        assert cf.hyp1f1(2.2, 2.2, x) == pytest.approx(math.exp(x), rel=1e-12)
        assert cf.hyp1f1(1.0, 2.0, x) == pytest.approx(math.expm1(x) / x, rel=1e-12)


def test_hyp1f1_against_mpmath():
    cases = [(0.3, 1.2, -50.0), (0.3, 1.2, 30.0), (0.2 + 1j, 0.7, -3.0), (-0.4, 0.6 - 2j, 12.0)]
    for a, c, x in cases:
        ref = complex(mpmath.hyp1f1(a, c, x))
        assert abs(cf.hyp1f1(a, c, x) - ref) <= 1e-10 * abs(ref)


def test_hyp1f1_errors():
    with pytest.raises(PoleError):
        cf.hyp1f1(0.5, -2.0, 1.0)
    with pytest.raises(ConvergenceError):
        cf.hyp1f1(0.5, 1.5, 150.0)


@pytest.mark.parametrize("a", [0.3, 1.0, 2.5])
@pytest.mark.parametrize("z", [-0.5, -2.0, -10.0])
def test_hyp2f1_quadratic_reductions(a, z):
    root = math.sqrt(1 - z)
    r1 = (1 - z) ** -0.5 * (2 / (1 + root)) ** (2 * a - 1)
    r2 = (2 / (1 + root)) ** (2 * a)
    assert abs(cf.hyp2f1(a, a + 0.5, 2 * a, z) - r1) <= 1e-10 * r1
    assert abs(cf.hyp2f1(a, a + 0.5, 2 * a + 1, z) - r2) <= 1e-10 * r2


def test_hyp2f1_at_zero_and_errors():
    assert cf.hyp2f1(0.3 + 2j, 1.1, 0.4 - 1j, 0.0) == 1.0
    with pytest.raises(PoleError):
        cf.hyp2f1(0.3, 0.4, -1.0, -0.2)
    with pytest.raises(DomainError):
        cf.hyp2f1(0.3, 0.4, 1.0, 0.2)


def test_hyp2f1_conjugate_parameters_weighted():
    # The lattice sums only need |Gamma(mu + i t)|^2 2F1(mu + i t, mu - i t; nu; -x^2)
    # to absolute accuracy relative to the Gamma weight.
    for mu, t, nu, x in [(0.75, 10.0, 1.0, 4.0), (0.75, 5.0, 1.0, 0.5), (0.4, 3.0, 2.5, 1.0)]:
        ref = complex(mpmath.hyp2f1(mu + 1j * t, mu - 1j * t, nu, -x * x))
        got = cf.hyp2f1(mu + 1j * t, mu - 1j * t, nu, -x * x)
        weight = cf.gamma_modulus_sq(mu, t)
        assert abs(got - ref) * weight <= 1e-14
