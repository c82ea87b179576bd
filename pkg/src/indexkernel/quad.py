"""Quadrature engine.

Three integrators cover everything the kernels need:

* ``integrate_semi_infinite``: double-exponential rules on ``[0, inf)``
  (exp-sinh) or on ``[0, U]`` (tanh-sinh) when the integrand carries a
  factor ``exp(-x cosh u)`` and can be cut at ``cosh_cutoff(x)``.
* ``integrate_finite``: globally adaptive Gauss-Kronrod (7/15 points).
* ``integrate_line``: trapezoidal rule on a vertical line ``sigma + i t``
  with a certified bound on the truncated tails.

All integrands are called with numpy arrays of abscissae and must return
an array whose first axis matches; extra trailing axes are carried along,
so one call can integrate a whole family of integrands at once.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .errors import ConvergenceError, DecayViolationError

Integrand = Callable[[np.ndarray], np.ndarray]

EPS = np.finfo(float).eps
LOG_TINY = 745.0  # -log of the smallest subnormal, rounded up

DEFAULT_SCALAR_TOL = 1e-12
DEFAULT_KERNEL_TOL = 1e-10
DEFAULT_IDENTITY_TOL = 1e-8


@dataclass(frozen=True)
class QuadratureResult:
    """Value of an integral together with an error estimate.

    Attributes
    ----------
    value : float, complex or ndarray
    abs_error_estimate : float
        Nonnegative; for vector-valued integrands it is the largest
        componentwise estimate.
    evaluations : int
        Number of integrand abscissae used.
    diagnostics : dict
        Per-level history and similar details.
    """

    value: Any
    abs_error_estimate: float
    evaluations: int
    diagnostics: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class LineSpec:
    """A truncated vertical line ``sigma + i t``, ``|t| <= t_cap``.

    ``decay_rate`` is the exponential rate ``r`` in the tail model
    ``|f(sigma + i t)| <= |f(sigma + i t_cap)| exp(-r (|t| - t_cap))``.
    """

    sigma: float
    t_cap: float
    decay_rate: float = math.pi / 2


def _norm(v) -> float:
    return float(np.max(np.abs(v))) if np.ndim(v) else float(abs(v))


def _wsum(w: np.ndarray, f: np.ndarray):
    return np.tensordot(w, f, axes=(0, 0))


def cosh_cutoff(x: float, margin: float = 0.0) -> float:
    """Upper limit ``U`` beyond which ``exp(-x cosh u)`` is below binary64 range.

    Parameters
    ----------
    x : float
        Positive coefficient of ``cosh u`` in the exponent.
    margin : float
        Extra log-scale allowance for prefactors that grow with ``u``.
    """
    return math.acosh(max((LOG_TINY + margin) / x, 1.0))


def _level_loop(nodes_weights, f, tol, rtol, max_level, min_level, what):
    """Shared level-doubling driver for the double-exponential rules.

    Level 0 samples the integer points of the transformed variable; level k
    adds the odd multiples of 2**-k, so each level reuses all earlier work.
    """
    raw = None
    raw_abs = None
    history: list[float] = []
    evaluations = 0
    prev = None
    for level in range(max_level + 1):
        u, w = nodes_weights(level)
        with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
            vals = np.asarray(f(u))
        evaluations += len(u)
        finite = np.isfinite(vals)
        if not np.all(finite):
            bad = ~finite if vals.ndim == 1 else ~finite.reshape(len(u), -1).all(axis=1)
            # inf * 0 at abscissae whose weight underflowed is harmless
            if np.any(bad & (w != 0)):
                raise ConvergenceError(
                    f"{what}: integrand returned non-finite values",
                    {"level": level, "abscissae": u[bad & (w != 0)][:5].tolist()},
                )
            mask = bad.reshape((-1,) + (1,) * (vals.ndim - 1))
            vals = np.where(mask, 0.0, vals)
        part = _wsum(w, vals)
        part_abs = _wsum(w, np.abs(vals))
        raw = part if raw is None else raw + part
        raw_abs = part_abs if raw_abs is None else raw_abs + part_abs
        h = 2.0 ** (-level)
        value = raw * h
        roundoff = 4.0 * EPS * _norm(raw_abs * h)
        if prev is not None:
            diff = _norm(value - prev)
            history.append(diff + roundoff)
            if level >= min_level and diff <= 0.5 * max(tol, rtol * _norm(value)):
                return QuadratureResult(
                    value, history[-1], evaluations, {"level": level, "history": history}
                )
        prev = value
    raise ConvergenceError(
        f"{what}: no convergence after level {max_level}",
        {"last_two": history[-2:], "value": prev, "max_level": max_level},
    )


def _odd_grid(level: int, lo: int, hi: int) -> np.ndarray:
    """Points of level ``level`` inside ``[lo, hi]`` (integers at level 0)."""
    if level == 0:
        return np.arange(lo, hi + 1, dtype=float)
    scale = 2**level
    k = np.arange(lo * scale + 1, hi * scale, 2, dtype=float)
    return k / scale


def _exp_sinh_nodes(t_lo: int, t_hi: int):
    def nodes(level: int):
        t = _odd_grid(level, t_lo, t_hi)
        s = 0.5 * math.pi * np.sinh(t)
        with np.errstate(over="ignore"):
            u = np.exp(s)
            w = 0.5 * math.pi * np.cosh(t) * u
        return u, w

    return nodes


def _tanh_sinh_nodes(a: float, b: float, t_max: int):
    half = 0.5 * (b - a)

    def nodes(level: int):
        t = _odd_grid(level, -t_max, t_max)
        s = 0.5 * math.pi * np.sinh(t)
        # a + (b - a)/(1 + e^{-2s}) keeps full relative accuracy near a
        with np.errstate(over="ignore"):
            u = a + (b - a) / (1.0 + np.exp(-2.0 * s))
            w = half * 0.5 * math.pi * np.cosh(t) / np.cosh(s) ** 2
        # abscissae that rounded onto an endpoint would sample a singularity
        w = np.where((u == a) | (u == b), 0.0, w)
        return u, w

    return nodes


def integrate_semi_infinite(
    f: Integrand,
    tol: float = DEFAULT_SCALAR_TOL,
    *,
    rtol: float = 0.0,
    cutoff: float | None = None,
    max_level: int = 12,
    min_level: int = 3,
) -> QuadratureResult:
    """Integrate ``f`` over ``[0, inf)``.

    Parameters
    ----------
    f : callable
        Vectorized integrand.  May have an integrable power or logarithmic
        singularity at ``u = 0``.
    tol : float
        Absolute tolerance; refinement stops once two successive levels
        differ by less than ``max(tol, rtol*|value|)/2``.
    rtol : float
        Optional relative tolerance.
    cutoff : float, optional
        If given, the integral is taken over ``[0, cutoff]`` with the
        tanh-sinh rule.  Use ``cosh_cutoff`` for integrands dominated by
        ``exp(-x cosh u)``.
    max_level : int
        Number of step halvings allowed.

    Returns
    -------
    QuadratureResult

    Raises
    ------
    ConvergenceError
        Carries the estimates of the last two levels.
    """
    if cutoff is not None:
        nodes = _tanh_sinh_nodes(0.0, float(cutoff), 5)
        return _level_loop(nodes, f, tol, rtol, max_level, min_level, "tanh-sinh")
    # u spans exp(-pi/2 sinh 7) ~ 1e-375 (underflows to 0 with zero weight)
    # up to exp(pi/2 sinh 5) ~ 1e50
    nodes = _exp_sinh_nodes(-7, 5)
    return _level_loop(nodes, f, tol, rtol, max_level, min_level, "exp-sinh")


def integrate_tanh_sinh(
    f: Integrand,
    a: float,
    b: float,
    tol: float = DEFAULT_SCALAR_TOL,
    *,
    rtol: float = 0.0,
    max_level: int = 12,
    min_level: int = 3,
) -> QuadratureResult:
    """Tanh-sinh rule on ``[a, b]``; tolerant of endpoint singularities.

    Abscissae near ``a`` keep full relative accuracy, those near ``b`` only
    absolute accuracy ``eps |b|``.  Put a strong singularity at ``a`` (by
    reflecting the integrand) when full accuracy is needed.
    """
    nodes = _tanh_sinh_nodes(float(a), float(b), 5)
    return _level_loop(nodes, f, tol, rtol, max_level, min_level, "tanh-sinh")


# Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (symmetric halves).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_GK_X = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_GK_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GK_WG = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes: 0.949.., 0.741.., 0.405.., 0
_gauss_pos = {1: 0, 3: 1, 5: 2, 7: 3}
for i, x in enumerate(_GK_X):
    j = 7 - abs(i - 7)
    if j in _gauss_pos:
        _GK_WG[i] = _WG[_gauss_pos[j]]


def _gk15(f: Integrand, a: float, b: float):
    c, h = 0.5 * (a + b), 0.5 * (b - a)
    x = c + h * _GK_X
    with np.errstate(over="ignore", under="ignore"):
        v = np.asarray(f(x))
    k = h * _wsum(_GK_WK, v)
    g = h * _wsum(_GK_WG, v)
    err = _norm(k - g)
    # QUADPACK-style sharpening of the raw Gauss-Kronrod difference
    resasc = h * _norm(_wsum(_GK_WK, np.abs(v - _wsum(_GK_WK, v) / 2.0)))
    if resasc != 0 and err != 0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    resabs = h * _norm(_wsum(_GK_WK, np.abs(v)))
    err = max(err, 50.0 * EPS * resabs)
    return k, err


def integrate_finite(
    f: Integrand,
    a: float,
    b: float,
    tol: float = DEFAULT_SCALAR_TOL,
    *,
    rtol: float = 0.0,
    max_intervals: int = 4000,
    max_depth: int = 60,
) -> QuadratureResult:
    """Globally adaptive Gauss-Kronrod 7/15 quadrature on ``[a, b]``.

    The interval with the largest error estimate is bisected until the
    summed estimate falls below ``max(tol, rtol*|value|)``.

    Raises
    ------
    ConvergenceError
        When an interval would be split beyond ``max_depth`` levels or the
        interval budget is exhausted.
    """
    a, b = float(a), float(b)
    if a == b:
        v = np.asarray(f(np.array([a])))[0] * 0.0
        return QuadratureResult(v, 0.0, 1)
    val, err = _gk15(f, a, b)
    heap = [(-err, 0, a, b, 0)]
    pieces = {0: (val, err)}
    total, total_err = val, err
    counter, evaluations = 1, 15
    while total_err > max(tol, rtol * _norm(total)):
        if len(pieces) >= max_intervals:
            raise ConvergenceError(
                "Gauss-Kronrod interval budget exhausted",
                {"value": total, "error": total_err, "intervals": len(pieces)},
            )
        _, key, lo, hi, depth = heapq.heappop(heap)
        if depth >= max_depth:
            raise ConvergenceError(
                "Gauss-Kronrod maximum depth exceeded",
                {"value": total, "error": total_err, "interval": (lo, hi)},
            )
        pv, pe = pieces.pop(key)
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        evaluations += 30
        for v_, e_, l_, h_ in ((v1, e1, lo, mid), (v2, e2, mid, hi)):
            pieces[counter] = (v_, e_)
            heapq.heappush(heap, (-e_, counter, l_, h_, depth + 1))
            counter += 1
        total = total - pv + v1 + v2
        total_err = total_err - pe + e1 + e2
        if len(pieces) % 64 == 0:
            # refresh the running sums to keep cancellation error bounded
            total = sum(p[0] for p in pieces.values())
            total_err = math.fsum(p[1] for p in pieces.values())
    return QuadratureResult(total, float(total_err), evaluations, {"intervals": len(pieces)})


def line_t_cap(sigma: float, mu: float, tol: float, shift: float = 0.0) -> float:
    """Truncation height for a Stirling-decaying line integrand.

    Solves ``t^(sigma + |mu| + 1) exp(-pi t / 2) = tol / 10`` for ``t`` and
    adds ``shift`` (for integrands whose bulk sits near ``|t| = shift``).
    """
    p = sigma + abs(mu) + 1.0
    target = math.log(tol / 10.0)
    t = max(1.0, 2.0 * p)
    for _ in range(100):
        g = p * math.log(t) - 0.5 * math.pi * t - target
        dg = p / t - 0.5 * math.pi
        step = g / dg
        t_new = t - step
        if t_new <= p / (0.5 * math.pi):
            t_new = 0.5 * (t + p / (0.5 * math.pi)) + 1.0
        if abs(t_new - t) < 1e-10 * t:
            t = t_new
            break
        t = t_new
    return t + abs(shift)


def integrate_line(
    f: Integrand,
    spec: LineSpec,
    tol: float = DEFAULT_KERNEL_TOL,
    *,
    rtol: float = 0.0,
    h0: float = 0.5,
    max_level: int = 9,
) -> QuadratureResult:
    """``(1/2pi) int_{-t_cap}^{t_cap} f(sigma + i t) dt`` by the trapezoidal rule.

    For integrands analytic in a strip around the line the trapezoidal rule
    converges geometrically, so the step is halved until two successive
    values agree.  The discarded tails are bounded with the exponential
    decay model of ``spec`` and added to the error estimate.

    Parameters
    ----------
    f : callable
        Receives complex ``s`` on the line (vectorized).
    spec : LineSpec
    tol, rtol : float
        Absolute and relative targets for the truncated integral.

    Raises
    ------
    DecayViolationError
        If ``|f|`` is not decreasing over the last stretch before
        ``t_cap`` on either side.
    ConvergenceError
        If halving the step ``max_level`` times does not settle the value.
    """
    sig, tc, r = float(spec.sigma), float(spec.t_cap), float(spec.decay_rate)
    probe_t = tc * np.array([0.8, 0.9, 1.0])
    probe = np.concatenate([probe_t, -probe_t])
    pv = np.abs(np.asarray(f(sig + 1j * probe)))
    if pv.ndim > 1:
        pv = pv.reshape(len(probe), -1).max(axis=1)
    scale = None
    for side in (pv[:3], pv[3:]):
        if side[2] > max(side[0], side[1]) * (1.0 + 1e-12) and side[2] > 1e-300:
            raise DecayViolationError(
                "line integrand is not decaying near the truncation height",
                {"t": probe_t.tolist(), "abs_f": side.tolist()},
            )
    tail = (pv[2] + pv[5]) / r / (2.0 * math.pi)

    total = None
    prev = None
    history: list[float] = []
    evaluations = 6
    h = h0
    n = int(math.ceil(tc / h))
    h = tc / n
    for level in range(max_level + 1):
        if level == 0:
            k = np.arange(-n, n + 1)
            t = k * h
            w = np.full(t.shape, h)
            w[0] = w[-1] = 0.5 * h
        else:
            step = h * 2.0 ** (-level)
            m = n * 2**level
            k = np.arange(-m + 1, m, 2)
            t = k * step
            w = np.full(t.shape, step)
        vals = np.asarray(f(sig + 1j * t))
        evaluations += len(t)
        part = _wsum(w, vals)
        if total is None:
            total = part
            value = total
        else:
            total = total * 0.5 + part
            value = total
        value_scaled = value / (2.0 * math.pi)
        if prev is not None:
            diff = _norm(value_scaled - prev)
            history.append(diff)
            if diff <= 0.5 * max(tol, rtol * _norm(value_scaled)):
                est = diff + tail + 4.0 * EPS * _norm(value_scaled) * math.sqrt(len(t))
                return QuadratureResult(
                    value_scaled,
                    float(est),
                    evaluations,
                    {"level": level, "history": history, "tail_bound": tail, "h": h * 2.0 ** (-level)},
                )
        prev = value_scaled
    raise ConvergenceError(
        "line trapezoid did not converge", {"last_two": history[-2:], "value": prev}
    )
