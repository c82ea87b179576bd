"""Registry of lattice summation identities and Fourier pairs, with a verifier.

Every identity has an index side (a sum over imaginary indices ``i alpha n``)
and a cosh side (a sum over ``cosh``-dilated arguments).  Each side is an
evaluator that receives a restricted kernel accessor exposing only the
kernel operations it declares; the two declarations of one identity are
disjoint, so agreement of the sides cannot come from shared code.

Both sides are certified: the index side through ``sum_index_side`` with a
geometric envelope, the cosh side through ``sum_cosh_side``.  The tail
target is ``min(1e-10, 1e-3 * tol * scale)``, where ``scale`` is the size
of the leading term.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Callable

import numpy as np
from scipy import integrate as _si
from scipy import special as _sp

from . import complexfn as cf
from . import kernels as kn
from . import quad as q
from .errors import DomainError, IndexKernelError
from .series import (
    MOD5_EVEN,
    MOD5_ODD,
    BesselAmplitudeBound,
    CharacterSpec,
    GeometricEnvelope,
    SeriesValue,
    best_envelope,
    sum_character,
    sum_cosh_side,
    sum_index_side,
)

ABS_FLOOR = 1e-12
TAIL_CAP = 1e-10
WHITTAKER_ENVELOPE_C = 2.0
# binary64 quadrature cannot certify kernel values much below this
KERNEL_TOL_FLOOR = 1e-13
_DELTAS = (math.pi / 3, 1.2, 1.35, 1.45, 1.5, 1.53, 1.55)

CASE_IDS = (
    "THM1",
    "COR1",
    "COR2A",
    "COR2B",
    "COR3A",
    "COR3B",
    "COR4",
    "COR5",
    "COR5_2MU",
    "COR5_2MU1",
    "COR6",
    "COR7",
    "COR8",
    "COR9",
    "GAMMA_LATTICE",
    "CHAR_EVEN",
    "CHAR_ODD",
    "FOURIER_PAIR_L1",
    "FOURIER_PAIR_C8",
    "FOURIER_PAIR_C9",
)

# ---------------------------------------------------------------------------
# Kernel access control
# ---------------------------------------------------------------------------

KERNELS: dict[str, Callable] = {
    "macdonald_imag": kn.macdonald_imag,
    "macdonald_complex_order": kn.macdonald_complex_order,
    "macdonald_real": kn.macdonald_real,
    "whittaker_imag_mb": kn.whittaker_imag_mb,
    "parabolic_d_scaled": kn.parabolic_d_scaled,
    "lommel_weighted_many": kn.lommel_weighted_many,
    "lommel_half": kn.lommel_half,
    "hyp2f1_euler": kn.hyp2f1_euler,
    "gamma": cf.gamma,
    "gamma_modulus_sq": cf.gamma_modulus_sq,
    "hyp2f1": cf.hyp2f1,
    "erfc": cf.erfc,
    "erfcx": cf.erfcx,
    "exp_integral_e1": cf.exp_integral_e1,
}


class KernelAccess:
    """Attribute access to the kernel operations in ``allowed`` and nothing else."""

    def __init__(self, allowed):
        unknown = set(allowed) - set(KERNELS)
        if unknown:
            raise ValueError(f"unknown kernel operations {sorted(unknown)}")
        self._allowed = frozenset(allowed)

    def __getattr__(self, name):
        if name.startswith("_"):
            raise AttributeError(name)
        if name not in self._allowed:
            raise PermissionError(f"kernel operation {name!r} is not declared for this side")
        return KERNELS[name]


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeCase:
    """Parameters of one identity instance.

    Only the fields an identity uses are read; the others stay ``None``.
    ``xi`` and ``tau`` select the forward or inverse check of a Fourier pair.
    """

    mu: float = 0.0
    alpha: float = 1.0
    x: float = 1.0
    y: float | None = None
    sigma: float | None = None
    phi: float | None = None
    nu: float | None = None
    s: float | None = None
    xi: float | None = None
    tau: float | None = None

    def __post_init__(self):
        for name in ("mu", "alpha", "x", "y", "sigma", "phi", "nu", "s", "xi", "tau"):
            v = getattr(self, name)
            if v is None:
                continue
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise DomainError(f"{name} must be a real number")
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite")
            object.__setattr__(self, name, float(v))
        if not self.alpha > 0:
            raise DomainError("alpha must be positive")
        if not self.x > 0:
            raise DomainError("x must be positive")
        if self.y is not None and not self.y > 0:
            raise DomainError("y must be positive")
        if self.phi is not None and not (0.0 < self.phi < 0.5 * math.pi):
            raise DomainError("phi must satisfy 0 < phi < pi/2")
        if self.nu is not None and not self.nu > 0:
            raise DomainError("nu must be positive")

    def as_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


@dataclass(frozen=True)
class IdentityCase:
    """One registered identity at one parameter point."""

    id: str
    params: LatticeCase
    char: CharacterSpec | None = None

    def __post_init__(self):
        if self.id not in CASE_IDS:
            raise DomainError(f"unknown identity id {self.id!r}")


@dataclass
class SideResult:
    """Value of one side with its truncation and quadrature error bounds."""

    value: complex | float
    tail_bound: float
    quad_error: float
    terms: int
    diagnostics: dict = field(default_factory=dict)


@dataclass
class IdentityReport:
    """Outcome of one identity check.

    ``passed`` holds when ``rel_err <= tol``, or when both sides are below
    the absolute floor 1e-12 and differ by at most that floor.
    """

    case: IdentityCase
    lhs: float
    rhs: float
    abs_err: float
    rel_err: float
    lhs_tail_bound: float
    rhs_tail_bound: float
    passed: bool
    wall_time: float
    tol: float
    lhs_quad_error: float = 0.0
    rhs_quad_error: float = 0.0
    lhs_terms: int = 0
    rhs_terms: int = 0
    note: str = ""
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self, timing: bool = False) -> dict:
        return {
            "case": self.case.id,
            "params": self.case.params.as_dict(),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "lhs_tail_bound": self.lhs_tail_bound,
            "rhs_tail_bound": self.rhs_tail_bound,
            "pass": self.passed,
            "wall_ms": round(self.wall_time * 1e3, 3) if timing else None,
        }


def kernel_tolerance(quad_tol: float) -> float:
    """Kernel accuracy requested for a given ``quad_tol``: ``quad_tol/100``, within [1e-13, 1e-12]."""
    return max(KERNEL_TOL_FLOOR, min(1e-12, 0.01 * float(quad_tol)))


@dataclass(frozen=True)
class _Context:
    tol: float
    kernel_tol: float
    n_max: int

    def target(self, scale: float) -> float:
        return min(TAIL_CAP, 1e-3 * self.tol * max(abs(scale), ABS_FLOOR))


# ---------------------------------------------------------------------------
# Envelope helpers
# ---------------------------------------------------------------------------


def _macdonald_envelopes(amplitude: Callable[[float], float], rate: Callable[[float], float]):
    """Candidates ``amplitude(delta) exp(-rate(delta) n)`` over the angle grid."""
    out = []
    for d in _DELTAS:
        r = rate(d)
        amp = amplitude(d)
        if r > 0 and math.isfinite(amp):
            out.append(GeometricEnvelope(amp, math.exp(-r)))
    return out


def _whittaker_envelope(mu: float, x: float, alpha: float, extra_power: int = 0, squared: bool = False):
    """``C sqrt(2x) tau^k exp(-pi tau/2)`` at ``tau = alpha n`` for ``tau >= max(1, 2x)``."""
    k = math.ceil(mu - 0.5) + extra_power
    start = max(1, math.ceil(max(1.0, 2.0 * x) / alpha))
    amp = WHITTAKER_ENVELOPE_C * math.sqrt(2.0 * x) * alpha**k
    return GeometricEnvelope(amp, math.exp(-0.5 * math.pi * alpha), k, start)


def _k_amplitude(nu: float, w0: float) -> float:
    """``C`` with ``K_nu(w) <= C w^(-1/2) exp(-w)`` for all ``w >= w0``.

    ``sqrt(w) exp(w) K_nu(w)`` increases to ``sqrt(pi/2)`` when
    ``|nu| <= 1/2`` and decreases otherwise.
    """
    nu = abs(nu)
    if nu <= 0.5:
        return math.sqrt(0.5 * math.pi)
    return float(_sp.kve(nu, w0)) * math.sqrt(w0) * (1.0 + 1e-12)


def _k_envelope(nu: float, w0: float, scale: float = 1.0):
    c = _k_amplitude(nu, w0)

    def env(w):
        w = np.asarray(w, dtype=float)
        with np.errstate(under="ignore"):
            return scale * c * np.exp(-w) / np.sqrt(w)

    return env


def _slack(scale: float) -> float:
    return 1e-14 * max(abs(scale), ABS_FLOOR)


def _fold(s0, series: SeriesValue, factor: float = 1.0) -> tuple[Any, float]:
    """``factor (s0 + 2 sum)`` and its tail bound."""
    return factor * (s0 + 2.0 * series.value), abs(factor) * 2.0 * series.tail_bound


class _ErrorLog:
    """Collects quadrature error estimates reported by vectorized kernels."""

    def __init__(self):
        self.total = 0.0

    def add(self, err: float, count: int = 1):
        self.total += float(err) * count


# ---------------------------------------------------------------------------
# THM1 and the character analogues
# ---------------------------------------------------------------------------


def _mb_terms(kern, mu, x, alpha, ctx, log):
    def term(ns):
        res = kern.whittaker_imag_mb(mu, alpha * np.asarray(ns, dtype=float), x, tol=ctx.kernel_tol, full_output=True)
        log.add(res.abs_error_estimate, len(ns))
        return res.value

    return term


def _thm1_lhs(kern, p, chi, ctx):
    log = _ErrorLog()
    w0 = kern.whittaker_imag_mb(p.mu, [0.0], p.x, tol=ctx.kernel_tol, full_output=True)
    log.add(w0.abs_error_estimate)
    s0 = float(w0.value[0])
    env = _whittaker_envelope(p.mu, p.x, p.alpha)
    series = sum_index_side(
        _mb_terms(kern, p.mu, p.x, p.alpha, ctx, log), env, 0.5 * ctx.target(s0),
        n_max=ctx.n_max, vectorized=True, slack=_slack(s0),
    )
    value, tail = _fold(s0, series)
    return SideResult(value, tail, 2.0 * log.total, series.terms_used)


def _d_lattice(kern, order, x, beta, half_beta, ns, log, ctx):
    """``exp(-(x/2) cosh(beta n)) D~_order(sqrt(2x) cosh(half_beta n))`` for an array ``ns``."""
    ns = np.asarray(ns, dtype=float)
    damp = np.exp(-0.5 * x * np.cosh(beta * ns))
    z = math.sqrt(2.0 * x) * np.cosh(half_beta * ns)
    res = kern.parabolic_d_scaled(order, z, full_output=True)
    log.add(res.abs_error_estimate * float(np.max(damp)), len(ns))
    return damp * np.asarray(res.value)


def _d_lattice_envelope(order, x, beta, half_beta, extra=None):
    def env(n):
        n = np.asarray(n, dtype=float)
        with np.errstate(under="ignore", over="ignore"):
            out = np.exp(-0.5 * x * np.cosh(beta * n)) * kn.parabolic_d_bound(
                order, math.sqrt(2.0 * x) * np.cosh(half_beta * n)
            )
            if extra is not None:
                out = out * extra(n)
        return out

    return env


def _thm1_rhs(kern, p, chi, ctx):
    log = _ErrorLog()
    beta = 2.0 * math.pi / p.alpha
    pref = 2.0 ** (-p.mu) * math.sqrt(math.pi * p.x) / p.alpha
    s0 = float(_d_lattice(kern, 2.0 * p.mu, p.x, beta, 0.5 * beta, [0.0], log, ctx)[0])

    def term(ns):
        return _d_lattice(kern, 2.0 * p.mu, p.x, beta, 0.5 * beta, ns, log, ctx)

    env = _d_lattice_envelope(2.0 * p.mu, p.x, beta, 0.5 * beta)
    series = sum_cosh_side(term, None, ctx.target(pref * s0) / (2.0 * pref), envelope=env, vectorized=True)
    value, tail = _fold(s0, series, pref)
    return SideResult(value, tail, pref * 2.0 * log.total, series.terms_used)


def _char_lhs(odd: bool):
    def side(kern, p, chi, ctx):
        log = _ErrorLog()
        base = _mb_terms(kern, p.mu, p.x, p.alpha, ctx, log)
        if odd:
            def term(ns):
                return np.asarray(ns, dtype=float) * base(ns)
        else:
            term = base
        first = abs(float(term(np.array([1]))[0]))
        env = _whittaker_envelope(p.mu, p.x, p.alpha, extra_power=1 if odd else 0)
        series = sum_character(term, chi, ctx.target(first), env, n_max=ctx.n_max, vectorized=True)
        return SideResult(series.value, series.tail_bound, log.total, series.terms_used)

    return side


def _char_rhs(odd: bool):
    def side(kern, p, chi, ctx):
        log = _ErrorLog()
        qa = chi.modulus * p.alpha
        beta = 2.0 * math.pi / qa
        gauss = chi.gauss_sum
        conj = chi.conjugate()
        if odd:
            order = 2.0 * p.mu + 1.0
            pref = -1j * 2.0 ** (-p.mu - 0.5) * math.sqrt(math.pi) * p.x * gauss / qa
            extra = lambda n: np.sinh(0.5 * beta * np.asarray(n, dtype=float))  # noqa: E731
        else:
            order = 2.0 * p.mu
            pref = 2.0 ** (-p.mu) * math.sqrt(math.pi * p.x) * gauss / qa
            extra = None

        def term(ns):
            v = _d_lattice(kern, order, p.x, beta, 0.5 * beta, ns, log, ctx)
            if extra is not None:
                v = v * extra(ns)
            return conj(np.asarray(ns)) * v

        first = abs(term(np.array([1]))[0])
        env = _d_lattice_envelope(order, p.x, beta, 0.5 * beta, extra)
        series = sum_cosh_side(term, None, ctx.target(abs(pref) * first) / abs(pref), envelope=env, vectorized=True)
        return SideResult(pref * series.value, abs(pref) * series.tail_bound, abs(pref) * log.total, series.terms_used)

    return side


# ---------------------------------------------------------------------------
# Macdonald identities (COR1, COR2A, COR2B, COR4, COR7)
# ---------------------------------------------------------------------------


def _scalar_terms(fn, log):
    def term(n):
        res = fn(int(n))
        log.add(res[1])
        return res[0]

    return term


def _k_imag(kern, tau, x, ctx):
    r = kern.macdonald_imag(tau, x, tol=ctx.kernel_tol, full_output=True)
    return r.value, r.abs_error_estimate


def _cor1_lhs(kern, p, chi, ctx):
    log = _ErrorLog()
    s0, e0 = _k_imag(kern, 0.0, p.x, ctx)
    log.add(e0)
    envs = _macdonald_envelopes(lambda d: float(_sp.k0(p.x * math.cos(d))), lambda d: d * p.alpha)
    target = 0.5 * ctx.target(s0)
    env = best_envelope(envs, target)
    series = sum_index_side(
        _scalar_terms(lambda n: _k_imag(kern, p.alpha * n, p.x, ctx), log), env, target,
        n_max=ctx.n_max, slack=_slack(s0),
    )
    value, tail = _fold(s0, series)
    return SideResult(value, tail, 2.0 * log.total, series.terms_used)


def _cor1_rhs(kern, p, chi, ctx):
    beta = 2.0 * math.pi / p.alpha
    pref = math.pi / p.alpha
    s0 = math.exp(-p.x)

    def term(ns):
        with np.errstate(under="ignore"):
            return np.exp(-p.x * np.cosh(beta * np.asarray(ns, dtype=float)))

    series = sum_cosh_side(term, p.x, ctx.target(pref * s0) / (2.0 * pref), beta=beta, vectorized=True)
    value, tail = _fold(s0, series, pref)
    return SideResult(value, tail, 0.0, series.terms_used)


def _cor2a_lhs(kern, p, chi, ctx):
    log = _ErrorLog()

    def pair(tau):
        a, ea = _k_imag(kern, tau, p.x, ctx)
        b, eb = _k_imag(kern, tau, p.y, ctx)
        return a * b, abs(a) * eb + abs(b) * ea

    s0, e0 = pair(0.0)
    log.add(e0)
    envs = _macdonald_envelopes(
        lambda d: float(_sp.k0(p.x * math.cos(d)) * _sp.k0(p.y * math.cos(d))), lambda d: 2.0 * d * p.alpha
    )
    target = 0.5 * ctx.target(s0)
    series = sum_index_side(
        _scalar_terms(lambda n: pair(p.alpha * n), log), best_envelope(envs, target), target,
        n_max=ctx.n_max, slack=_slack(s0),
    )
    value, tail = _fold(s0, series)
    return SideResult(value, tail, 2.0 * log.total, series.terms_used)


def _cor2a_rhs(kern, p, chi, ctx):
    log = _ErrorLog()
    pref = math.pi / p.alpha
    sx = p.x + p.y

    def args(ns):
        sh = np.sinh(math.pi * np.asarray(ns, dtype=float) / p.alpha)
        with np.errstate(over="ignore"):
            return np.sqrt(sx * sx + 4.0 * p.x * p.y * sh * sh)

    def term(ns):
        w = args(ns)
        live = w < 745.0
        out = np.zeros(w.shape)
        if np.any(live):
            r = kern.macdonald_real(0.0, w[live], tol=ctx.kernel_tol, full_output=True)
            out[live] = r.value
            log.add(r.abs_error_estimate, int(np.sum(live)))
        return out

    s0 = float(term(np.array([0]))[0])
    k_env = _k_envelope(0.0, sx)
    env = lambda n: k_env(args(n))  # noqa: E731
    series = sum_cosh_side(term, None, ctx.target(pref * s0) / (2.0 * pref), envelope=env, vectorized=True)
    value, tail = _fold(s0, series, pref)
    return SideResult(value, tail, 2.0 * pref * log.total, series.terms_used)


def _cor2b_lhs(kern, p, chi, ctx):
    log = _ErrorLog()

    def mod2(tau):
        r = kern.macdonald_complex_order(p.sigma, tau, p.x, tol=ctx.kernel_tol, full_output=True)
        v = complex(r.value)
        return abs(v) ** 2, 2.0 * abs(v) * r.abs_error_estimate

    s0, e0 = mod2(0.0)
    log.add(e0)
    envs = _macdonald_envelopes(
        lambda d: float(_sp.kv(p.sigma, p.x * math.cos(d))) ** 2, lambda d: 2.0 * d * p.alpha
    )
    target = 0.5 * ctx.target(s0)
    series = sum_index_side(
        _scalar_terms(lambda n: mod2(p.alpha * n), log), best_envelope(envs, target), target,
        n_max=ctx.n_max, slack=_slack(s0),
    )
    value, tail = _fold(s0, series)
    return SideResult(value, tail, 2.0 * log.total, series.terms_used)


def _cor2b_rhs(kern, p, chi, ctx):
    log = _ErrorLog()
    pref = math.pi / p.alpha
    order = 2.0 * p.sigma

    def args(ns):
        with np.errstate(over="ignore"):
            return 2.0 * p.x * np.cosh(math.pi * np.asarray(ns, dtype=float) / p.alpha)

    def term(ns):
        w = args(ns)
        live = w < 745.0
        out = np.zeros(w.shape)
        if np.any(live):
            r = kern.macdonald_real(order, w[live], tol=ctx.kernel_tol, full_output=True)
            out[live] = r.value
            log.add(r.abs_error_estimate, int(np.sum(live)))
        return out

    s0 = float(term(np.array([0]))[0])
    k_env = _k_envelope(order, 2.0 * p.x)
    env = lambda n: k_env(args(n))  # noqa: E731
    series = sum_cosh_side(term, None, ctx.target(pref * s0) / (2.0 * pref), envelope=env, vectorized=True)
    value, tail = _fold(s0, series, pref)
    return SideResult(value, tail, 2.0 * pref * log.total, series.terms_used)


def _cor4_lhs(kern, p, chi, ctx):
    log = _ErrorLog()
    e1 = float(kern.exp_integral_e1(p.x))
    pref = 2.0 / p.alpha * math.sqrt(p.x / math.pi) * math.exp(-0.5 * p.x)
    half = 0.5 * p.x

    def term(n):
        r = kern.macdonald_complex_order(0.5, p.alpha * n, half, tol=ctx.kernel_tol, full_output=True)
        return complex(r.value).imag / n, r.abs_error_estimate / n

    def k_half(w):
        return math.sqrt(0.5 * math.pi / w) * math.exp(-w)

    envs = _macdonald_envelopes(lambda d: k_half(half * math.cos(d)), lambda d: d * p.alpha)
    target = ctx.target(e1) / pref
    series = sum_index_side(
        _scalar_terms(term, log), best_envelope(envs, target), target, n_max=ctx.n_max, slack=_slack(e1 / pref)
    )
    return SideResult(e1 + pref * series.value, pref * series.tail_bound, pref * log.total, series.terms_used)


def _cor4_rhs(kern, p, chi, ctx):
    pref = math.pi / p.alpha
    root = math.sqrt(p.x)
    s0 = float(kern.erfc(root))

    def args(ns):
        with np.errstate(over="ignore"):
            return root * np.cosh(math.pi * np.asarray(ns, dtype=float) / p.alpha)

    def term(ns):
        return np.asarray(kern.erfc(args(ns)), dtype=float)

    def env(n):
        y = args(n)
        with np.errstate(under="ignore", over="ignore"):
            return np.exp(-y * y) / (y * math.sqrt(math.pi))

    series = sum_cosh_side(term, None, ctx.target(pref * s0) / (2.0 * pref), envelope=env, vectorized=True)
    value, tail = _fold(s0, series, pref)
    return SideResult(value, tail, 0.0, series.terms_used)


def _cor7_lhs(kern, p, chi, ctx):
    log = _ErrorLog()
    s0, e0 = _k_imag(kern, 0.0, p.x, ctx)
    log.add(e0)

    def term(n):
        tau = p.alpha * n
        v, e = _k_imag(kern, tau, p.x, ctx)
        c = math.cosh(math.pi * tau)
        return v / c, e / c

    envs = _macdonald_envelopes(
        lambda d: 2.0 * float(_sp.k0(p.x * math.cos(d))), lambda d: (d + math.pi) * p.alpha
    )
    target = 0.5 * ctx.target(s0)
    series = sum_index_side(
        _scalar_terms(term, log), best_envelope(envs, target), target, n_max=ctx.n_max, slack=_slack(s0)
    )
    value, tail = _fold(s0, series)
    return SideResult(value, tail, 2.0 * log.total, series.terms_used)


def _cor7_rhs(kern, p, chi, ctx):
    pref = math.pi / p.alpha * math.exp(-p.x)
    root = math.sqrt(2.0 * p.x)
    s0 = float(kern.erfcx(root))

    def term(ns):
        with np.errstate(over="ignore"):
            y = root * np.cosh(math.pi * np.asarray(ns, dtype=float) / p.alpha)
        return np.asarray(kern.erfcx(y), dtype=float)

    env = GeometricEnvelope(2.0 / (root * math.sqrt(math.pi)), math.exp(-math.pi / p.alpha))
    series = sum_cosh_side(
        term, None, ctx.target(pref * s0) / (2.0 * pref), envelope=env, n_max=ctx.n_max, vectorized=True
    )
    value, tail = _fold(s0, series, pref)
    return SideResult(value, tail, 0.0, series.terms_used)


# ---------------------------------------------------------------------------
# COR5 and its two reductions
# ---------------------------------------------------------------------------


def _cor5_nu(case_id: str, p: LatticeCase) -> float:
    if case_id == "COR5_2MU":
        return 2.0 * p.mu
    if case_id == "COR5_2MU1":
        return 2.0 * p.mu + 1.0
    return 1.0 if p.nu is None else p.nu


def _cor5_amplitude(mu: float, nu: float, x: float, delta: float) -> float:
    """Amplitude ``A`` with ``|Gamma(mu + i tau)|^2 |2F1(...; -x^2)| <= A exp(-2 delta tau)``.

    From the Bessel-Macdonald integral with
    ``|J_{nu-1}(t)| <= min(c t^(-1/2), (t/2)^(nu-1)/Gamma(nu), 1)`` (the last
    only for ``nu >= 1``), evaluated by adaptive quadrature and rounded up.
    """
    c = BesselAmplitudeBound.calibrate(nu - 1.0).c_nu
    g_nu = math.gamma(nu)
    cd = math.cos(delta)

    def j_bound(t):
        b = min(c / math.sqrt(t), (0.5 * t) ** (nu - 1.0) / g_nu)
        return min(b, 1.0) if nu >= 1.0 else b

    def f(u):
        if u <= 0:
            return 0.0
        return u ** (2.0 * mu - nu) * j_bound(x * u) * float(_sp.k0(u * cd))

    kinks = [c * c]
    if nu > 0.5:
        kinks.append((c * g_nu * 2.0 ** (nu - 1.0)) ** (1.0 / (nu - 0.5)))
    if nu > 1.0:
        kinks.append(2.0 * g_nu ** (1.0 / (nu - 1.0)))
    upper = 60.0 / cd
    pts = sorted(k / x for k in kinks if 0 < k / x < upper)
    lo, elo = _si.quad(f, 0.0, upper, points=pts or None, limit=400, epsabs=0.0, epsrel=1e-9)
    hi, ehi = _si.quad(f, upper, np.inf, limit=200)
    integral = (lo + hi) * (1.0 + 1e-6) + abs(elo) + abs(ehi)
    return 2.0 ** (1.0 - 2.0 * mu + nu) * x ** (1.0 - nu) * g_nu * integral


def _cor5_lhs_for(case_id):
    def side(kern, p, chi, ctx):
        nu = _cor5_nu(case_id, p)
        z = -p.x * p.x

        def value(tau):
            w = float(kern.gamma_modulus_sq(p.mu, tau))
            return w * complex(kern.hyp2f1(p.mu + 1j * tau, p.mu - 1j * tau, nu, z)).real

        s0 = value(0.0)
        envs = [
            GeometricEnvelope(_cor5_amplitude(p.mu, nu, p.x, d), math.exp(-2.0 * d * p.alpha))
            for d in (1.2, 1.45, 1.55)
        ]
        target = 0.5 * ctx.target(s0)
        series = sum_index_side(
            lambda n: value(p.alpha * n), best_envelope(envs, target), target,
            n_max=ctx.n_max, slack=_slack(s0) + 1e-16,
        )
        value_, tail = _fold(s0, series)
        # summed series, relative accuracy of the Gauss series about 1e-15
        return SideResult(value_, tail, 1e-14 * abs(value_) * series.terms_used, series.terms_used)

    return side


def _cor5_rhs(kern, p, chi, ctx):
    nu = _cor5_nu("COR5", p)
    pref = math.pi / p.alpha * 2.0 ** (1.0 - 2.0 * p.mu) * float(kern.gamma(2.0 * p.mu).real)
    x2 = p.x * p.x
    log = _ErrorLog()

    def f(ws):
        r = kern.hyp2f1_euler(p.mu + 0.5, p.mu, nu, ws, full_output=True)
        log.add(r.abs_error_estimate, np.size(ws))
        return np.asarray(r.value)

    s0 = float(f(np.array([x2]))[0])

    def term(ns):
        c = np.cosh(math.pi * np.asarray(ns, dtype=float) / p.alpha)
        return c ** (-2.0 * p.mu) * f(x2 / (c * c))

    env = GeometricEnvelope(2.0 ** (2.0 * p.mu), math.exp(-2.0 * math.pi * p.mu / p.alpha))
    series = sum_cosh_side(
        term, None, ctx.target(pref * s0) / (2.0 * pref), envelope=env, n_max=ctx.n_max, vectorized=True
    )
    value, tail = _fold(s0, series, pref)
    return SideResult(value, tail, 2.0 * pref * log.total, series.terms_used)


def _cor5_reduced_rhs(plus_one: bool):
    def side(kern, p, chi, ctx):
        mu, x2 = p.mu, p.x * p.x
        g2 = float(kern.gamma(2.0 * mu).real)
        if plus_one:
            pref = 2.0 * math.pi / p.alpha * g2

            def h(c):
                return (c + np.sqrt(c * c + x2)) ** (-2.0 * mu)

            env = GeometricEnvelope(1.0, math.exp(-2.0 * math.pi * mu / p.alpha))
        else:
            pref = math.pi / p.alpha * g2

            def h(c):
                r = np.sqrt(c * c + x2)
                return (c + r) ** (1.0 - 2.0 * mu) / r

            amp = 2.0 ** max(0.0, 1.0 - 2.0 * mu) * 2.0 ** (2.0 * mu)
            env = GeometricEnvelope(amp, math.exp(-2.0 * math.pi * mu / p.alpha))
        s0 = float(h(1.0))

        def term(ns):
            with np.errstate(over="ignore"):
                c = np.cosh(math.pi * np.asarray(ns, dtype=float) / p.alpha)
            return h(c)

        series = sum_cosh_side(
            term, None, ctx.target(pref * s0) / (2.0 * pref), envelope=env, n_max=ctx.n_max, vectorized=True
        )
        value, tail = _fold(s0, series, pref)
        return SideResult(value, tail, 0.0, series.terms_used)

    return side


# ---------------------------------------------------------------------------
# COR6 (Lommel), COR8, COR9, GAMMA_LATTICE
# ---------------------------------------------------------------------------


def _cor6_lhs(kern, p, chi, ctx):
    mu, x, alpha = p.mu, p.x, p.alpha
    amp0 = x ** (mu - 1.0) * math.gamma(0.5 * (1.0 - mu)) ** 2
    envs = _macdonald_envelopes(lambda d: amp0 / math.cos(d) ** (1.0 - mu), lambda d: d * alpha)
    errs = _ErrorLog()
    # the tau = 0 value fixes the target; it is recomputed with the tail terms
    v0, e0 = kern.lommel_weighted_many(mu, [0.0], x, rtol=max(ctx.kernel_tol * 0.1, 1e-13))
    s0 = float(v0[0])
    target = 0.5 * ctx.target(s0)
    env = best_envelope(envs, target)
    n_terms = max(env.terms_for(target, ctx.n_max), 1)
    vals, err = kern.lommel_weighted_many(mu, alpha * np.arange(0, n_terms + 1), x, rtol=max(ctx.kernel_tol * 0.1, 1e-13))
    errs.add(err, 2 * n_terms + 1)
    series = sum_index_side(lambda ns: vals[np.asarray(ns)], env, target, n_max=ctx.n_max, vectorized=True, slack=err)
    value, tail = _fold(float(vals[0]), series)
    return SideResult(value, tail, errs.total, series.terms_used)


def _cor6_rhs(kern, p, chi, ctx):
    mu, x = p.mu, p.x
    beta = 2.0 * math.pi / p.alpha
    pref = 2.0 ** (mu + 1.0) * math.pi * float(kern.gamma(1.0 - mu).real) * math.sqrt(x) / p.alpha
    log = _ErrorLog()

    def term(ns):
        with np.errstate(over="ignore"):
            c = np.cosh(beta * np.asarray(ns, dtype=float))
        r = kern.lommel_half(mu, x * c, full_output=True)
        log.add(r.abs_error_estimate, np.size(ns))
        return np.sqrt(c) * np.atleast_1d(r.value)

    s0 = float(term(np.array([0]))[0])
    env = GeometricEnvelope(x ** (mu - 1.5) * 2.0 ** (1.0 - mu), math.exp(-beta * (1.0 - mu)))
    series = sum_cosh_side(
        term, None, ctx.target(pref * s0) / (2.0 * pref), envelope=env, n_max=ctx.n_max, vectorized=True
    )
    value, tail = _fold(s0, series, pref)
    return SideResult(value, tail, 2.0 * pref * log.total, series.terms_used)


def _cor8_lhs(kern, p, chi, ctx):
    log = _ErrorLog()
    x = p.x

    def term(ns):
        taus = p.alpha * np.asarray(ns, dtype=float)
        a = kern.whittaker_imag_mb(-0.25, taus, x, tol=ctx.kernel_tol, full_output=True)
        b = kern.whittaker_imag_mb(0.25, taus, x, tol=ctx.kernel_tol, full_output=True)
        scale = max(float(np.max(np.abs(a.value))), float(np.max(np.abs(b.value))))
        log.add(scale * (a.abs_error_estimate + b.abs_error_estimate), len(taus))
        return a.value * b.value

    s0 = float(term(np.array([0]))[0])
    start = max(1, math.ceil(max(1.0, 2.0 * x) / p.alpha))
    env = GeometricEnvelope(WHITTAKER_ENVELOPE_C**2 * 2.0 * x, math.exp(-math.pi * p.alpha), 0, start)
    series = sum_index_side(
        term, env, 0.5 * ctx.target(s0), n_max=ctx.n_max, vectorized=True, slack=_slack(s0)
    )
    value, tail = _fold(s0, series)
    return SideResult(value, tail, 2.0 * log.total, series.terms_used)


def _cor8_rhs(kern, p, chi, ctx):
    log = _ErrorLog()
    x = p.x
    pref = x / (math.sqrt(2.0) * p.alpha)

    def args(ns):
        with np.errstate(over="ignore"):
            return np.cosh(math.pi * np.asarray(ns, dtype=float) / p.alpha)

    def term(ns):
        c = args(ns)
        live = x * c < 745.0
        out = np.zeros(c.shape)
        if np.any(live):
            r = kern.macdonald_real(0.0, 0.5 * x * c[live], scaled=True, tol=ctx.kernel_tol, full_output=True)
            out[live] = np.exp(-x * c[live]) * r.value
            log.add(r.abs_error_estimate * math.exp(-x), int(np.sum(live)))
        return out

    def env(n):
        c = args(n)
        with np.errstate(under="ignore"):
            return np.sqrt(math.pi / (x * c)) * np.exp(-x * c)

    s0 = float(term(np.array([0]))[0])
    series = sum_cosh_side(term, None, ctx.target(pref * s0) / (2.0 * pref), envelope=env, vectorized=True)
    value, tail = _fold(s0, series, pref)
    return SideResult(value, tail, 2.0 * pref * log.total, series.terms_used)


def _cor9_amplitude(mu: float, x: float, delta: float) -> float:
    return (
        2.0 * (4.0 * x) ** mu * math.exp(-0.5 * x) * 2.0 ** (-2.0 * mu - 1.0)
        * math.cos(delta) ** (2.0 * mu - 1.0) * math.gamma(0.5 - mu) ** 2
    )


def _cor9_lhs(kern, p, chi, ctx):
    log = _ErrorLog()
    mu, x = p.mu, p.x

    def term(ns):
        taus = p.alpha * np.asarray(ns, dtype=float)
        w = kern.whittaker_imag_mb(mu, taus, x, tol=ctx.kernel_tol, full_output=True)
        g = np.asarray(kern.gamma_modulus_sq(0.5 - mu, taus), dtype=float)
        log.add(w.abs_error_estimate * float(np.max(g)), len(taus))
        return g * w.value

    s0 = float(term(np.array([0]))[0])
    envs = _macdonald_envelopes(lambda d: _cor9_amplitude(mu, x, d), lambda d: 2.0 * d * p.alpha)
    target = 0.5 * ctx.target(s0)
    series = sum_index_side(
        term, best_envelope(envs, target), target, n_max=ctx.n_max, vectorized=True, slack=_slack(s0)
    )
    value, tail = _fold(s0, series)
    return SideResult(value, tail, 2.0 * log.total, series.terms_used)


def _cor9_rhs(kern, p, chi, ctx):
    mu, x = p.mu, p.x
    log = _ErrorLog()
    order = 2.0 * mu - 1.0
    root = math.sqrt(2.0 * x)
    pref = (
        math.pi * 2.0 ** (mu + 0.5) * math.sqrt(x) / p.alpha
        * float(kern.gamma(1.0 - 2.0 * mu).real) * math.exp(-0.5 * x)
    )

    def term(ns):
        with np.errstate(over="ignore"):
            z = root * np.cosh(math.pi * np.asarray(ns, dtype=float) / p.alpha)
        live = np.isfinite(z)
        out = np.zeros(z.shape)
        if np.any(live):
            r = kern.parabolic_d_scaled(order, z[live], full_output=True)
            out[live] = np.atleast_1d(r.value)
            log.add(r.abs_error_estimate, int(np.sum(live)))
        return out

    s0 = float(term(np.array([0]))[0])
    env = GeometricEnvelope((0.5 * root) ** order, math.exp(order * math.pi / p.alpha))
    series = sum_cosh_side(
        term, None, ctx.target(pref * s0) / (2.0 * pref), envelope=env, n_max=ctx.n_max, vectorized=True
    )
    value, tail = _fold(s0, series, pref)
    return SideResult(value, tail, 2.0 * pref * log.total, series.terms_used)


def _gamma_lhs(kern, p, chi, ctx):
    a = 0.5 * p.s
    s0 = float(kern.gamma_modulus_sq(a, 0.0))
    envs = []
    for beta in (0.5 * math.pi, 2.0, 2.5, 2.8, 3.0, 3.1):
        amp = s0 / math.cos(0.5 * beta) ** (2.0 * a)
        envs.append(GeometricEnvelope(amp, math.exp(-beta * p.alpha)))
    target = 0.5 * ctx.target(s0)

    def term(ns):
        return np.asarray(kern.gamma_modulus_sq(a, p.alpha * np.asarray(ns, dtype=float)), dtype=float)

    series = sum_index_side(
        term, best_envelope(envs, target), target, n_max=ctx.n_max, vectorized=True, slack=_slack(s0)
    )
    value, tail = _fold(s0, series)
    return SideResult(value, tail, 1e-14 * abs(value), series.terms_used)


def _gamma_rhs(kern, p, chi, ctx):
    s = p.s
    pref = math.sqrt(math.pi) / p.alpha * float(kern.gamma(0.5 * s).real) * float(kern.gamma(0.5 * (s + 1.0)).real)

    def term(ns):
        with np.errstate(over="ignore"):
            c = np.cosh(math.pi * np.asarray(ns, dtype=float) / p.alpha)
        return c ** (-s)

    env = GeometricEnvelope(2.0**s, math.exp(-s * math.pi / p.alpha))
    series = sum_cosh_side(term, None, ctx.target(pref) / (2.0 * pref), envelope=env, n_max=ctx.n_max, vectorized=True)
    value, tail = _fold(1.0, series, pref)
    return SideResult(value, tail, 1e-14 * abs(value), series.terms_used)


# ---------------------------------------------------------------------------
# COR3 (elementary)
# ---------------------------------------------------------------------------


def _cor3_lhs(odd: bool):
    def side(kern, p, chi, ctx):
        a, phi = p.alpha, p.phi
        gap = 0.5 * math.pi - phi

        def term(ns):
            n = np.asarray(ns, dtype=float)
            with np.errstate(under="ignore"):
                lead = np.exp(-a * gap * n)
                if odd:
                    return lead * (-np.expm1(-2.0 * a * phi * n)) / (-np.expm1(-math.pi * a * n))
                return lead * (1.0 + np.exp(-2.0 * a * phi * n)) / (1.0 + np.exp(-math.pi * a * n))

        if odd:
            s0 = 2.0 * phi / math.pi
            env = GeometricEnvelope(1.0 / -math.expm1(-math.pi * a), math.exp(-a * gap))
        else:
            s0 = 1.0
            env = GeometricEnvelope(2.0, math.exp(-a * gap))
        series = sum_index_side(term, env, 0.5 * ctx.target(s0), n_max=ctx.n_max, vectorized=True)
        value, tail = _fold(s0, series)
        return SideResult(value, tail, 1e-15 * abs(value) * series.terms_used, series.terms_used)

    return side


def _cor3_rhs(odd: bool):
    def side(kern, p, chi, ctx):
        a, phi = p.alpha, p.phi
        beta = 2.0 * math.pi / a
        c2 = math.cos(phi) ** 2

        def sh2(ns):
            with np.errstate(over="ignore"):
                return np.sinh(beta * np.asarray(ns, dtype=float)) ** 2

        geo = 1.0 / (-math.expm1(-2.0 * beta)) ** 2
        if odd:
            lead = 2.0 * math.tan(phi) / a
            pref = 2.0 * math.sin(2.0 * phi) / a

            def term(ns):
                with np.errstate(over="ignore"):
                    return 1.0 / (sh2(ns) + c2)

            env = GeometricEnvelope(4.0 * geo, math.exp(-2.0 * beta))
        else:
            lead = 2.0 / (a * math.cos(phi))
            pref = 4.0 * math.cos(phi) / a

            def term(ns):
                n = np.asarray(ns, dtype=float)
                with np.errstate(over="ignore", invalid="ignore"):
                    ch = np.cosh(beta * n)
                    out = ch / (ch * ch - 1.0 + c2)
                return np.where(np.isfinite(ch), out, 0.0)

            env = GeometricEnvelope(4.0 * geo, math.exp(-beta))
        series = sum_cosh_side(
            term, None, ctx.target(lead) / pref, envelope=env, n_max=ctx.n_max, vectorized=True
        )
        value = lead + pref * series.value
        return SideResult(value, pref * series.tail_bound, 1e-15 * abs(value), series.terms_used)

    return side


# ---------------------------------------------------------------------------
# Fourier pairs
# ---------------------------------------------------------------------------


def _tau_cutoff(env_at: Callable[[float], float], rate: float, start: float, target: float) -> tuple[float, float]:
    """Smallest ``T >= start`` on a 1/4 grid with ``2 env(T) / rate <= target``.

    ``env`` must be log-concave beyond ``start`` with logarithmic slope
    below ``-rate/2``; then ``int_T^inf env <= 2 env(T)/rate``.
    """
    t = max(start, 0.25)
    while 2.0 * env_at(t) / rate > target:
        t += 0.25
        if t > 1e4:
            raise DomainError("Fourier integrand envelope does not decay")
    return t, 2.0 * env_at(t) / rate


def _fourier_index_value(which: str, mu: float, x: float, taus, kern, ctx):
    """Index-side function ``F(tau)`` of a pair, vectorized, and an error estimate."""
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if which == "L1":
        r = kern.whittaker_imag_mb(mu, taus, x, tol=ctx.kernel_tol, full_output=True)
        return r.value, r.abs_error_estimate
    if which == "C8":
        a = kern.whittaker_imag_mb(-0.25, taus, x, tol=ctx.kernel_tol, full_output=True)
        b = kern.whittaker_imag_mb(0.25, taus, x, tol=ctx.kernel_tol, full_output=True)
        scale = max(float(np.max(np.abs(a.value))), float(np.max(np.abs(b.value))))
        return a.value * b.value, scale * (a.abs_error_estimate + b.abs_error_estimate)
    w = kern.whittaker_imag_mb(mu, taus, x, tol=ctx.kernel_tol, full_output=True)
    g = np.asarray(kern.gamma_modulus_sq(0.5 - mu, taus), dtype=float)
    return g * w.value, w.abs_error_estimate * float(np.max(g))


def _fourier_cosh_value(which: str, mu: float, x: float, xis, kern, ctx):
    """Cosh-side function ``G(xi)`` of a pair, vectorized, and an error estimate."""
    xis = np.atleast_1d(np.asarray(xis, dtype=float))
    out = np.zeros(xis.shape)
    if which == "L1":
        with np.errstate(over="ignore", under="ignore"):
            damp = np.exp(-0.5 * x * np.cosh(xis))
        live = damp > 0
        err = 0.0
        if np.any(live):
            r = kern.parabolic_d_scaled(2.0 * mu, math.sqrt(2.0 * x) * np.cosh(0.5 * xis[live]), full_output=True)
            pref = 2.0 ** (-mu) * math.sqrt(math.pi * x)
            out[live] = pref * damp[live] * np.atleast_1d(r.value)
            err = pref * r.abs_error_estimate * float(np.max(damp))
        return out, err
    if which == "C8":
        c = np.cosh(0.5 * xis)
        live = x * c < 745.0
        err = 0.0
        if np.any(live):
            r = kern.macdonald_real(0.0, 0.5 * x * c[live], scaled=True, tol=ctx.kernel_tol, full_output=True)
            pref = x / math.sqrt(2.0)
            out[live] = pref * np.exp(-x * c[live]) * np.atleast_1d(r.value)
            err = pref * math.exp(-x) * r.abs_error_estimate
        return out, err
    pref = math.pi * 2.0 ** (mu + 0.5) * math.sqrt(x) * float(kern.gamma(1.0 - 2.0 * mu).real) * math.exp(-0.5 * x)
    with np.errstate(over="ignore"):
        z = math.sqrt(2.0 * x) * np.cosh(0.5 * xis)
    live = np.isfinite(z)
    err = 0.0
    if np.any(live):
        r = kern.parabolic_d_scaled(2.0 * mu - 1.0, z[live], full_output=True)
        out[live] = pref * np.atleast_1d(r.value)
        err = pref * r.abs_error_estimate
    return out, err


def _fourier_index_envelope(which: str, mu: float, x: float):
    """``(env(tau), rate, start)`` for ``|F(tau)|`` in the forward integral."""
    if which == "L1":
        k = math.ceil(mu - 0.5)
        env = lambda t: WHITTAKER_ENVELOPE_C * math.sqrt(2.0 * x) * t**k * math.exp(-0.5 * math.pi * t)  # noqa: E731
        return env, 0.5 * math.pi, max(1.0, 2.0 * x, 4.0 * k / math.pi)
    if which == "C8":
        env = lambda t: WHITTAKER_ENVELOPE_C**2 * 2.0 * x * math.exp(-math.pi * t)  # noqa: E731
        return env, math.pi, max(1.0, 2.0 * x)
    d = 1.5
    amp = _cor9_amplitude(mu, x, d)
    return (lambda t: amp * math.exp(-2.0 * d * t)), 2.0 * d, 0.0


def _fourier_forward_lhs(which):
    def side(kern, p, chi, ctx):
        mu, x, xi = p.mu, p.x, p.xi
        f0, _ = _fourier_index_value(which, mu, x, [0.0], kern, ctx)
        scale = abs(float(f0[0]))
        env, rate, start = _fourier_index_envelope(which, mu, x)
        upper, tail = _tau_cutoff(env, rate, start, 0.5 * ctx.target(scale))
        errs = _ErrorLog()

        def f(t):
            vals, err = _fourier_index_value(which, mu, x, t, kern, ctx)
            errs.add(err)
            return vals * np.cos(np.asarray(t) * xi)

        res = q.integrate_tanh_sinh(f, 0.0, upper, 0.0, rtol=1e-13, max_level=12)
        value = 2.0 * float(res.value)
        quad_err = 2.0 * (res.abs_error_estimate + upper * max(errs.total, 0.0) / max(res.evaluations, 1))
        return SideResult(value, 2.0 * tail, quad_err, res.evaluations)

    return side


def _fourier_forward_rhs(which):
    def side(kern, p, chi, ctx):
        vals, err = _fourier_cosh_value(which, p.mu, p.x, [p.xi], kern, ctx)
        return SideResult(float(vals[0]), 0.0, err, 1)

    return side


def _fourier_inverse_lhs(which):
    def side(kern, p, chi, ctx):
        mu, x, tau = p.mu, p.x, p.tau
        g0, _ = _fourier_cosh_value(which, mu, x, [0.0], kern, ctx)
        scale = abs(float(g0[0])) / math.pi
        target = 0.5 * ctx.target(scale)
        errs = _ErrorLog()

        def f(xi):
            vals, err = _fourier_cosh_value(which, mu, x, xi, kern, ctx)
            errs.add(err)
            return vals * np.cos(tau * np.asarray(xi))

        if which == "C9":
            # G decreases like cosh(xi/2)^(2 mu - 1); by the second mean value
            # theorem the cosine tail beyond L is at most 2 G(L) / tau.
            if tau <= 0:
                raise DomainError("the C9 inverse check needs tau > 0")
            bound = lambda L: float(_fourier_cosh_value("C9", mu, x, [L], kern, ctx)[0][0])  # noqa: E731
            upper = 8.0
            while 2.0 * bound(upper) / (math.pi * tau) > target:
                upper *= 1.25
            tail = 2.0 * bound(upper) / (math.pi * tau)
            # roundoff accumulated over [0, upper] limits what can be certified
            floor = 100.0 * q.EPS * upper * abs(float(g0[0]))
            res = q.integrate_finite(f, 0.0, upper, max(0.1 * target * math.pi, floor), rtol=1e-13, max_intervals=20000)
        else:
            p_order = 2.0 * mu if which == "L1" else 0.0
            upper = q.cosh_cutoff(0.5 * x if which == "L1" else x, margin=50.0 + 10.0 * abs(p_order))
            if which == "C8":
                upper *= 2.0
            tail = 0.0
            res = q.integrate_tanh_sinh(f, 0.0, upper, 0.1 * target * math.pi, max_level=12)
        value = float(res.value) / math.pi
        quad_err = (res.abs_error_estimate + upper * errs.total / max(res.evaluations, 1)) / math.pi
        return SideResult(value, tail, quad_err, res.evaluations)

    return side


def _fourier_inverse_rhs(which):
    def side(kern, p, chi, ctx):
        vals, err = _fourier_index_value(which, p.mu, p.x, [p.tau], kern, ctx)
        return SideResult(float(vals[0]), 0.0, err, 1)

    return side


def _fourier_lhs(which):
    fwd, inv = _fourier_forward_lhs(which), _fourier_inverse_lhs(which)
    return lambda kern, p, chi, ctx: (fwd if p.xi is not None else inv)(kern, p, chi, ctx)


def _fourier_rhs(which):
    fwd, inv = _fourier_forward_rhs(which), _fourier_inverse_rhs(which)
    return lambda kern, p, chi, ctx: (fwd if p.xi is not None else inv)(kern, p, chi, ctx)


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Constraint:
    """A validity condition with the text reported when it fails."""

    text: str
    check: Callable[[LatticeCase, CharacterSpec | None], bool]


@dataclass(frozen=True)
class IdentitySpec:
    id: str
    title: str
    constraints: tuple
    defaults: LatticeCase
    lhs_kernels: frozenset
    rhs_kernels: frozenset
    lhs: Callable
    rhs: Callable
    required: tuple = ()
    default_char: CharacterSpec | None = None

    def kernels_for(self, params: LatticeCase) -> tuple[frozenset, frozenset]:
        """Kernel sets of the reported ``(lhs, rhs)``; an inverse Fourier check swaps the roles."""
        if self.id.startswith("FOURIER") and params.tau is not None:
            return self.rhs_kernels, self.lhs_kernels
        return self.lhs_kernels, self.rhs_kernels

    @property
    def domain(self) -> str:
        return "; ".join(c.text for c in self.constraints) or "alpha > 0, x > 0"


def _c(text, check):
    return Constraint(text, check)


_MU_HALF = _c("mu < 1/2", lambda p, chi: p.mu < 0.5)
_FOURIER_ONE = _c("exactly one of xi, tau", lambda p, chi: (p.xi is None) != (p.tau is None))
_XI_REAL = _c("xi >= 0 and tau >= 0", lambda p, chi: (p.xi or 0.0) >= 0 and (p.tau or 0.0) >= 0)


def _char_constraints(parity):
    return (
        _c(f"chi {parity}", lambda p, chi: chi is not None and chi.parity == parity),
        _c("chi nonprincipal and primitive", lambda p, chi: chi is not None and not chi.is_principal and chi.is_primitive),
    )


_K = frozenset
REGISTRY: dict[str, IdentitySpec] = {}


def _register(spec: IdentitySpec):
    if spec.lhs_kernels & spec.rhs_kernels:
        raise RuntimeError(f"{spec.id}: sides share kernels {sorted(spec.lhs_kernels & spec.rhs_kernels)}")
    REGISTRY[spec.id] = spec


_register(IdentitySpec(
    "THM1", "sum W_{mu, i alpha n}(x) against the D_{2 mu} lattice",
    (), LatticeCase(mu=0.25, alpha=1.0, x=1.0),
    _K({"whittaker_imag_mb"}), _K({"parabolic_d_scaled"}), _thm1_lhs, _thm1_rhs,
))
_register(IdentitySpec(
    "COR1", "sum K_{i alpha n}(x) against exp(-x cosh(2 pi n/alpha))",
    (), LatticeCase(alpha=1.0, x=1.0),
    _K({"macdonald_imag"}), _K(), _cor1_lhs, _cor1_rhs,
))
_register(IdentitySpec(
    "COR2A", "sum K_{i alpha n}(x) K_{i alpha n}(y) against K_0 of the hyperbolic distance",
    (), LatticeCase(alpha=1.0, x=1.0, y=0.5),
    _K({"macdonald_imag"}), _K({"macdonald_real"}), _cor2a_lhs, _cor2a_rhs, required=("y",),
))
_register(IdentitySpec(
    "COR2B", "sum |K_{sigma + i alpha n}(x)|^2 against K_{2 sigma}(2x cosh(pi n/alpha))",
    (), LatticeCase(alpha=1.0, x=1.0, sigma=0.3),
    _K({"macdonald_complex_order"}), _K({"macdonald_real"}), _cor2b_lhs, _cor2b_rhs, required=("sigma",),
))
_register(IdentitySpec(
    "COR3A", "sum sinh(alpha phi n)/sinh(pi alpha n/2)",
    (_c("0 < phi < pi/2", lambda p, chi: p.phi is not None),), LatticeCase(alpha=1.0, phi=math.pi / 4),
    _K(), _K(), _cor3_lhs(True), _cor3_rhs(True), required=("phi",),
))
_register(IdentitySpec(
    "COR3B", "sum cosh(alpha phi n)/cosh(pi alpha n/2)",
    (_c("0 < phi < pi/2", lambda p, chi: p.phi is not None),), LatticeCase(alpha=1.0, phi=math.pi / 4),
    _K(), _K(), _cor3_lhs(False), _cor3_rhs(False), required=("phi",),
))
_register(IdentitySpec(
    "COR4", "E1(x) plus Im K_{1/2 + i alpha n}(x/2)/n against erfc",
    (), LatticeCase(alpha=1.0, x=1.0),
    _K({"exp_integral_e1", "macdonald_complex_order"}), _K({"erfc"}), _cor4_lhs, _cor4_rhs,
))
_COR5_LHS = _K({"gamma_modulus_sq", "hyp2f1"})
_register(IdentitySpec(
    "COR5", "sum |Gamma(mu + i alpha n)|^2 2F1(mu + i alpha n, mu - i alpha n; nu; -x^2)",
    (
        _c("mu > nu/2", lambda p, chi: p.mu > 0.5 * _cor5_nu("COR5", p)),
        _c("nu > mu", lambda p, chi: _cor5_nu("COR5", p) > p.mu),
        _c("nu >= 1/2", lambda p, chi: _cor5_nu("COR5", p) >= 0.5),
    ),
    LatticeCase(mu=0.75, alpha=1.0, x=1.0, nu=1.0),
    _COR5_LHS, _K({"gamma", "hyp2f1_euler"}), _cor5_lhs_for("COR5"), _cor5_rhs,
))
_register(IdentitySpec(
    "COR5_2MU", "COR5 with nu = 2 mu, closed-form cosh side",
    (_c("mu >= 1/4", lambda p, chi: p.mu >= 0.25), _c("nu = 2 mu", lambda p, chi: p.nu is None or p.nu == 2.0 * p.mu)),
    LatticeCase(mu=0.75, alpha=1.0, x=1.0),
    _COR5_LHS, _K({"gamma"}), _cor5_lhs_for("COR5_2MU"), _cor5_reduced_rhs(False),
))
_register(IdentitySpec(
    "COR5_2MU1", "COR5 with nu = 2 mu + 1, closed-form cosh side",
    (_c("mu > 0", lambda p, chi: p.mu > 0), _c("nu = 2 mu + 1", lambda p, chi: p.nu is None or p.nu == 2.0 * p.mu + 1.0)),
    LatticeCase(mu=0.75, alpha=1.0, x=1.0),
    _COR5_LHS, _K({"gamma"}), _cor5_lhs_for("COR5_2MU1"), _cor5_reduced_rhs(True),
))
_register(IdentitySpec(
    "COR6", "sum of Gamma-weighted Lommel functions S_{mu, i alpha n}(x)",
    (_MU_HALF,), LatticeCase(mu=0.25, alpha=1.0, x=1.0),
    _K({"lommel_weighted_many"}), _K({"lommel_half", "gamma"}), _cor6_lhs, _cor6_rhs,
))
_register(IdentitySpec(
    "COR7", "sum K_{i alpha n}(x)/cosh(pi alpha n) against erfcx",
    (), LatticeCase(alpha=1.0, x=1.0),
    _K({"macdonald_imag"}), _K({"erfcx"}), _cor7_lhs, _cor7_rhs,
))
_register(IdentitySpec(
    "COR8", "sum W_{-1/4, i alpha n}(x) W_{1/4, i alpha n}(x) against exp K_0",
    (), LatticeCase(alpha=1.0, x=1.0),
    _K({"whittaker_imag_mb"}), _K({"macdonald_real"}), _cor8_lhs, _cor8_rhs,
))
_register(IdentitySpec(
    "COR9", "sum |Gamma(1/2 - mu + i alpha n)|^2 W_{mu, i alpha n}(x) against D_{2 mu - 1}",
    (_MU_HALF,), LatticeCase(mu=0.25, alpha=1.0, x=1.0),
    _K({"whittaker_imag_mb", "gamma_modulus_sq"}), _K({"parabolic_d_scaled", "gamma"}), _cor9_lhs, _cor9_rhs,
))
_register(IdentitySpec(
    "GAMMA_LATTICE", "sum |Gamma(s/2 + i alpha n)|^2 against cosh(pi n/alpha)^(-s)",
    (_c("s > 0", lambda p, chi: p.s is not None and p.s > 0),), LatticeCase(alpha=1.0, s=1.0),
    _K({"gamma_modulus_sq"}), _K({"gamma"}), _gamma_lhs, _gamma_rhs, required=("s",),
))
_register(IdentitySpec(
    "CHAR_EVEN", "sum chi(n) W_{mu, i alpha n}(x) for even primitive chi",
    _char_constraints("even"), LatticeCase(mu=0.0, alpha=1.0, x=1.0),
    _K({"whittaker_imag_mb"}), _K({"parabolic_d_scaled"}), _char_lhs(False), _char_rhs(False),
    default_char=MOD5_EVEN,
))
_register(IdentitySpec(
    "CHAR_ODD", "sum chi(n) n W_{mu, i alpha n}(x) for odd primitive chi",
    _char_constraints("odd"), LatticeCase(mu=0.0, alpha=1.0, x=1.0),
    _K({"whittaker_imag_mb"}), _K({"parabolic_d_scaled"}), _char_lhs(True), _char_rhs(True),
    default_char=MOD5_ODD,
))
_register(IdentitySpec(
    "FOURIER_PAIR_L1", "index Fourier pair of W_{mu, i tau}(x) and the D_{2 mu} kernel",
    (_FOURIER_ONE, _XI_REAL), LatticeCase(mu=0.25, x=1.0, xi=0.5),
    _K({"whittaker_imag_mb"}), _K({"parabolic_d_scaled"}), _fourier_lhs("L1"), _fourier_rhs("L1"),
))
_register(IdentitySpec(
    "FOURIER_PAIR_C8", "index Fourier pair of W_{-1/4, i tau} W_{1/4, i tau} and exp K_0",
    (_FOURIER_ONE, _XI_REAL), LatticeCase(x=1.0, xi=0.5),
    _K({"whittaker_imag_mb"}), _K({"macdonald_real"}), _fourier_lhs("C8"), _fourier_rhs("C8"),
))
_register(IdentitySpec(
    "FOURIER_PAIR_C9", "index Fourier pair of |Gamma(1/2 - mu + i tau)|^2 W_{mu, i tau} and D_{2 mu - 1}",
    (_MU_HALF, _FOURIER_ONE, _XI_REAL, _c("tau > 0 for the inverse check", lambda p, chi: p.tau is None or p.tau > 0)),
    LatticeCase(mu=0.25, x=1.0, xi=0.5),
    _K({"whittaker_imag_mb", "gamma_modulus_sq"}), _K({"parabolic_d_scaled", "gamma"}),
    _fourier_lhs("C9"), _fourier_rhs("C9"),
))

assert tuple(REGISTRY) == CASE_IDS


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def list_cases() -> list[tuple[str, str, LatticeCase]]:
    """``(id, validity-domain description, default params)`` in registry order."""
    return [(s.id, s.domain, s.defaults) for s in REGISTRY.values()]


def make_case(case_id: str, char: CharacterSpec | None = None, **params) -> IdentityCase:
    """Build a case from the registry defaults overridden by ``params``."""
    if case_id not in REGISTRY:
        raise DomainError(f"unknown identity id {case_id!r}; known ids: {', '.join(CASE_IDS)}")
    spec = REGISTRY[case_id]
    fields = spec.defaults.as_dict()
    if case_id.startswith("FOURIER") and "tau" in params and "xi" not in params:
        fields.pop("xi", None)
    fields.update(params)
    return IdentityCase(case_id, LatticeCase(**fields), char if char is not None else spec.default_char)


def check_domain(case: IdentityCase) -> None:
    """Raise ``DomainError`` naming the first violated constraint."""
    spec = REGISTRY[case.id]
    for name in spec.required:
        if getattr(case.params, name) is None:
            raise DomainError(f"{case.id} requires the parameter {name}")
    for c in spec.constraints:
        if not c.check(case.params, case.char):
            raise DomainError(f"{case.id} requires {c.text}")


def _note(case: IdentityCase) -> str:
    if case.id == "THM1" and case.params.mu == 0.0:
        return "mu = 0 reduces THM1 to COR1 at x/2 via W_{0, i tau}(x) = sqrt(x/pi) K_{i tau}(x/2)"
    return ""


def verify(
    case: IdentityCase,
    tol: float = q.DEFAULT_IDENTITY_TOL,
    *,
    quad_tol: float = q.DEFAULT_KERNEL_TOL,
    n_max: int = 10000,
) -> IdentityReport:
    """Evaluate both sides of ``case`` on disjoint code paths and compare them.

    Parameters
    ----------
    case : IdentityCase
    tol : float
        Relative tolerance for the comparison; also sets the tail targets.
    quad_tol : float
        Kernel tolerance knob; kernels run at ``quad_tol / 100``.
    n_max : int
        Cap on the number of series terms.

    Returns
    -------
    IdentityReport

    Raises
    ------
    DomainError
        If the parameters violate the identity's validity domain.
    IndexKernelError
        Numerical failures, with the case id prepended to the message.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    check_domain(case)
    spec = REGISTRY[case.id]
    ctx = _Context(float(tol), kernel_tolerance(quad_tol), int(n_max))
    start = time.perf_counter()
    try:
        lhs_kernels, rhs_kernels = spec.kernels_for(case.params)
        lhs = spec.lhs(KernelAccess(lhs_kernels), case.params, case.char, ctx)
        rhs = spec.rhs(KernelAccess(rhs_kernels), case.params, case.char, ctx)
    except DomainError:
        raise
    except IndexKernelError as exc:
        exc.args = (f"{case.id}: {exc.args[0] if exc.args else exc}",) + tuple(exc.args[1:])
        raise
    wall = time.perf_counter() - start
    lv, rv = complex(lhs.value), complex(rhs.value)
    abs_err = abs(lv - rv)
    denom = max(abs(lv), abs(rv), 1e-300)
    rel_err = abs_err / denom
    passed = rel_err <= tol or (max(abs(lv), abs(rv)) <= ABS_FLOOR and abs_err <= ABS_FLOOR)
    diag: dict = {}
    if lv.imag != 0 or rv.imag != 0:
        diag["lhs_imag"] = lv.imag
        diag["rhs_imag"] = rv.imag
    return IdentityReport(
        case=case,
        lhs=lv.real,
        rhs=rv.real,
        abs_err=abs_err,
        rel_err=rel_err,
        lhs_tail_bound=float(lhs.tail_bound),
        rhs_tail_bound=float(rhs.tail_bound),
        passed=bool(passed),
        wall_time=wall,
        tol=float(tol),
        lhs_quad_error=float(lhs.quad_error),
        rhs_quad_error=float(rhs.quad_error),
        lhs_terms=lhs.terms,
        rhs_terms=rhs.terms,
        note=_note(case),
        diagnostics=diag,
    )


def verify_fourier_pair(which: str, p: kn.EvalPoint, xi_grid, tol: float = 1e-7, **kw) -> list[IdentityReport]:
    """Forward checks at every ``xi`` in ``xi_grid`` and one inverse check at ``p.tau``.

    Parameters
    ----------
    which : {"L1", "C8", "C9"}
    p : EvalPoint
        ``mu`` and ``x`` of the pair (``mu`` is ignored for C8, whose
        indices are fixed to -1/4 and 1/4); ``tau`` is the inverse point.
    xi_grid : sequence of float
    tol : float

    Returns
    -------
    list of IdentityReport
        Forward reports in ``xi_grid`` order, then the inverse report.
    """
    if which not in ("L1", "C8", "C9"):
        raise DomainError("which must be one of L1, C8, C9")
    case_id = f"FOURIER_PAIR_{which}"
    mu = 0.0 if which == "C8" else p.mu
    reports = [verify(make_case(case_id, mu=mu, x=p.x, xi=float(xi)), tol, **kw) for xi in xi_grid]
    reports.append(verify(make_case(case_id, mu=mu, x=p.x, tau=abs(p.tau)), tol, **kw))
    return reports


def mu_degeneracy(x: float, alpha: float, tol: float = q.DEFAULT_IDENTITY_TOL) -> dict:
    """Compare THM1 at ``mu = 0`` with COR1 at ``x/2`` after the ``sqrt(x/pi)`` rescaling.

    Returns the two reports and the relative differences of both sides.
    """
    thm = verify(make_case("THM1", mu=0.0, x=x, alpha=alpha), tol)
    cor = verify(make_case("COR1", x=0.5 * x, alpha=alpha), tol)
    scale = math.sqrt(x / math.pi)
    return {
        "thm1": thm,
        "cor1": cor,
        "lhs_rel_diff": abs(thm.lhs - scale * cor.lhs) / abs(thm.lhs),
        "rhs_rel_diff": abs(thm.rhs - scale * cor.rhs) / abs(thm.rhs),
    }


# ---------------------------------------------------------------------------
# Default grid
# ---------------------------------------------------------------------------

GRID_X = (0.25, 1.0, 4.0)
GRID_ALPHA = (0.5, 1.0, 2.0)
GRID_MU = (-0.5, -0.25, 0.0, 0.25, 0.4)
GRID_PHI = (math.pi / 6, math.pi / 4, math.pi / 3)


def default_grid() -> list[IdentityCase]:
    """The suite grid, in registry order then parameter order."""
    cases: list[IdentityCase] = []
    xa = [(x, a) for x in GRID_X for a in GRID_ALPHA]
    for cid in CASE_IDS:
        if cid == "THM1":
            pts = [dict(mu=m, x=x, alpha=1.0) for m in GRID_MU for x in GRID_X]
            pts += [dict(mu=m, x=1.0, alpha=a) for m in (-0.5, 0.4) for a in (0.5, 2.0)]
        elif cid in ("COR1", "COR4", "COR7", "COR8"):
            pts = [dict(x=x, alpha=a) for x, a in xa]
        elif cid == "COR2A":
            pts = [dict(x=x, y=1.0, alpha=a) for x, a in xa]
        elif cid == "COR2B":
            pts = [dict(x=x, sigma=0.3, alpha=a) for x, a in xa]
        elif cid in ("COR3A", "COR3B"):
            pts = [dict(phi=f, alpha=a) for f in GRID_PHI for a in GRID_ALPHA]
        elif cid.startswith("COR5"):
            pts = [dict(mu=0.75, x=x, alpha=a) for x, a in xa]
        elif cid in ("COR6", "COR9"):
            pts = [dict(mu=m, x=x, alpha=1.0) for m in GRID_MU for x in GRID_X]
        elif cid == "GAMMA_LATTICE":
            pts = [dict(s=s, alpha=a) for s in (0.5, 1.0, 3.0) for a in GRID_ALPHA]
        elif cid.startswith("CHAR"):
            pts = [dict(mu=m, x=x, alpha=1.0) for m in (-0.5, 0.0, 0.4) for x in GRID_X]
        else:
            mu = 0.0 if cid.endswith("C8") else 0.25
            pts = [dict(mu=mu, x=1.0, xi=xi) for xi in (0.0, 0.5, 1.0, 2.0)]
            pts += [dict(mu=mu, x=1.0, tau=t) for t in (0.5, 2.0)]
        cases.extend(make_case(cid, **pt) for pt in pts)
    return cases
