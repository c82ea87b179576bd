import math

import mpmath
import numpy as np
import pytest
from scipy import special as sp

from indexkernel import complexfn as cf
from indexkernel import kernels as kn
from indexkernel import quad as q
from indexkernel.errors import ConvergenceError, DecayViolationError


def test_semi_infinite_exponential():
    r = q.integrate_semi_infinite(lambda u: np.exp(-u), 1e-12)
    assert r.value == pytest.approx(1.0, abs=1e-12)
    assert r.abs_error_estimate >= 0 and r.evaluations > 0


def test_semi_infinite_inverse_sqrt_singularity():
    r = q.integrate_semi_infinite(lambda u: np.exp(-u) / np.sqrt(u), 1e-12)
    assert r.value == pytest.approx(math.sqrt(math.pi), abs=1e-11)


def test_semi_infinite_cylinder_example():
    # int u^(mu-1) exp(-x u^2 - y u) du at (1, 0.5, 1) reduces to
    # Gamma(1) e^{y^2/8x} D_{-1}(y/sqrt(2x)) / (2x)^{1/2}, and D_{-1} is an erfc
    mu, x, y = 1.0, 0.5, 1.0
    r = q.integrate_semi_infinite(lambda u: u ** (mu - 1) * np.exp(-x * u * u - y * u), 1e-13)
    z = y / math.sqrt(2 * x)
    d_minus1 = math.sqrt(math.pi / 2) * math.exp(z * z / 4) * sp.erfc(z / math.sqrt(2))
    expected = math.exp(y * y / (8 * x)) * d_minus1 / math.sqrt(2 * x)
    assert r.value == pytest.approx(expected, rel=1e-12)


def test_finite_examples():
    assert q.integrate_finite(lambda t: np.ones_like(t), 0.0, 1.0).value == pytest.approx(1.0, abs=1e-14)
    assert q.integrate_finite(np.sin, 0.0, math.pi).value == pytest.approx(2.0, abs=1e-12)


def test_finite_mapped_exponential_integral():
    # t = 1/s maps [1, inf) to (0, 1]: int_0^1 exp(-1/s) / s ds
    def f(s):
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(s > 0, np.exp(-1.0 / s) / s, 0.0)

    r = q.integrate_finite(f, 0.0, 1.0, 1e-13)
    assert r.value == pytest.approx(cf.exp_integral_e1(1.0), rel=1e-12)


ANALYTIC = [
    ("semi", lambda u: np.exp(-2 * u), 0.5),
    ("semi", lambda u: u * np.exp(-u), 1.0),
    ("semi", lambda u: u**2 * np.exp(-u), 2.0),
    ("semi", lambda u: np.exp(-u * u), math.sqrt(math.pi) / 2),
    ("semi", lambda u: np.log(u) * np.exp(-u), -np.euler_gamma),
    ("semi", lambda u: 1.0 / (1.0 + u * u), math.pi / 2),
    ("semi", lambda u: u ** (-0.5) * np.exp(-3 * u), math.sqrt(math.pi / 3)),
    ("semi", lambda u: np.exp(-np.cosh(u)), sp.k0(1.0)),
    ("semi", lambda u: 0.5 * (np.exp(-2 * np.cosh(u) + 0.5 * u) + np.exp(-2 * np.cosh(u) - 0.5 * u)), sp.kv(0.5, 2.0)),
    ("semi", lambda u: np.exp(-u) * np.cos(u), 0.5),
    ("finite", (lambda t: t**3, 0.0, 2.0), 4.0),
    ("finite", (lambda t: np.exp(t), 0.0, 1.0), math.e - 1),
    ("finite", (lambda t: 1.0 / (1.0 + t * t), 0.0, 1.0), math.pi / 4),
    ("finite", (lambda t: np.cos(t) ** 2, 0.0, math.pi), math.pi / 2),
    ("finite", (lambda t: np.sqrt(t), 0.0, 1.0), 2.0 / 3.0),
    ("finite", (lambda t: np.log(1 + t), 0.0, 1.0), 2 * math.log(2) - 1),
    ("ts", (lambda t: 1.0 / np.sqrt(t * (2 - t)), 0.0, 1.0), math.pi / 2),
    ("ts", (lambda t: np.log(t), 0.0, 1.0), -1.0),
    ("ts", (lambda t: t ** (-0.75), 0.0, 1.0), 4.0),
    ("ts", (lambda t: np.sqrt(t * (1 - t)), 0.0, 1.0), math.pi / 8),
]


@pytest.mark.parametrize("kind,f,exact", ANALYTIC)
def test_oracle_agreement(kind, f, exact):
    if kind == "semi":
        r = q.integrate_semi_infinite(f, 1e-12)
    elif kind == "finite":
        g, a, b = f
        r = q.integrate_finite(g, a, b, 1e-12)
    else:
        g, a, b = f
        r = q.integrate_tanh_sinh(g, a, b, 1e-12)
    assert abs(r.value - exact) <= max(10 * r.abs_error_estimate, 1e-12)


def test_linearity():
    rng = np.random.default_rng(7)
    for _ in range(10):
        a, b, c1, c2 = rng.uniform(0.5, 3.0, 4)
        f = lambda u, a=a: np.exp(-a * u) * np.cos(u)  # noqa: E731
        g = lambda u, b=b: np.exp(-b * u * u)  # noqa: E731
        rf, rg = q.integrate_semi_infinite(f), q.integrate_semi_infinite(g)
        rh = q.integrate_semi_infinite(lambda u: c1 * f(u) + c2 * g(u))
        bound = c1 * rf.abs_error_estimate + c2 * rg.abs_error_estimate + rh.abs_error_estimate
        assert abs(rh.value - (c1 * rf.value + c2 * rg.value)) <= bound + 1e-14


def test_level_history_monotone():
    r = q.integrate_semi_infinite(lambda u: np.exp(-u) / np.sqrt(u), 1e-13)
    history = r.diagnostics.get("history")
    assert history, "per-level history expected in diagnostics"
    diffs = [abs(b - a) for a, b in zip(history, history[1:])]
    tail = diffs[-3:]
    assert all(y <= x * (1 + 1e-12) + 1e-15 for x, y in zip(tail, tail[1:]))


def test_cosh_cutoff_rule():
    x = 2.0
    u = q.cosh_cutoff(x)
    assert x * math.cosh(u) >= 745.0 - 1e-9
    r = q.integrate_semi_infinite(lambda t: np.exp(-x * np.cosh(t)), 1e-13, cutoff=u)
    assert r.value == pytest.approx(sp.k0(x), rel=1e-12)


def test_convergence_error_carries_levels():
    with pytest.raises(ConvergenceError) as info:
        q.integrate_semi_infinite(lambda u: np.sin(50 * u) / (1 + u), 1e-14, max_level=4)
    assert info.value.args


def _gamma_sq_line(x):
    def f(s):
        return cf.gamma(s + 0.5) ** 2 * x ** (-s)

    return f


def test_line_gamma_square_against_doubled_cap():
    spec = q.LineSpec(1.0, q.line_t_cap(1.0, 0.5, 1e-12))
    r = q.integrate_line(_gamma_sq_line(1.0), spec, 1e-12)
    oracle = q.integrate_line(_gamma_sq_line(1.0), q.LineSpec(1.0, 2 * spec.t_cap), 1e-14)
    assert abs(r.value - oracle.value) <= 1e-11


def test_line_symmetric_integrand_is_real():
    spec = q.LineSpec(1.0, q.line_t_cap(1.0, 0.5, 1e-12))
    r = q.integrate_line(_gamma_sq_line(2.0), spec, 1e-12)
    assert abs(complex(r.value).imag) <= 1e-12


def test_line_whittaker_reduces_to_macdonald():
    # W_{0,0}(2x) by the Mellin-Barnes line equals sqrt(2x/pi) K_0(x)
    x = 1.0
    got = kn.whittaker_imag_mb(0.0, [0.0], 2 * x)[0]
    assert got == pytest.approx(math.sqrt(2 * x / math.pi) * float(mpmath.besselk(0, x)), rel=1e-12)


def test_line_decay_violation():
    spec = q.LineSpec(1.0, 10.0)
    with pytest.raises(DecayViolationError):
        q.integrate_line(lambda s: np.exp(0.5 * np.abs(s.imag)) + 0 * s, spec, 1e-10)
