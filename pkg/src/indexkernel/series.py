"""Certified summation of index-side and cosh-side lattice series.

Index-side series ``sum_n f(i alpha n)`` decay geometrically; their tails
are bounded by a ``GeometricEnvelope`` whose remainder has a closed form,
so the number of terms is fixed before any term is evaluated.  Cosh-side
series decay doubly exponentially (terms carry ``exp(-c cosh(beta n))``)
or, for a few algebraic kernels, geometrically in ``n``; both are handled
by ``sum_cosh_side``.

The engines sum ``n >= 1`` only.  The ``n = 0`` term and the factor 2 from
folding ``n`` and ``-n`` belong to the caller.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special as _sp

from .errors import ConvergenceError, DecayViolationError, DomainError

INDEX_N_MAX = 10000
COSH_N_MAX = 64


@dataclass(frozen=True)
class SeriesValue:
    """A partial sum with a certified bound on the omitted remainder.

    Attributes
    ----------
    value : float or complex
        Sum of the evaluated terms.
    terms_used : int
        Number of terms evaluated (at least 1).
    tail_bound : float
        Upper bound for the absolute value of the omitted remainder.
    """

    value: complex | float
    terms_used: int
    tail_bound: float
    diagnostics: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class GeometricEnvelope:
    """Majorant ``amplitude * n**power * ratio**n`` valid for ``n >= start``.

    Parameters
    ----------
    amplitude : float
        Nonnegative constant.
    ratio : float
        Geometric ratio in ``(0, 1)``.
    power : float
        Polynomial factor exponent.
    start : int
        First ``n`` for which the majorant is claimed.
    """

    amplitude: float
    ratio: float
    power: float = 0.0
    start: int = 1

    def __post_init__(self):
        if not (0.0 < self.ratio < 1.0):
            raise DomainError("GeometricEnvelope.ratio must lie in (0, 1)")
        if not self.amplitude >= 0:
            raise DomainError("GeometricEnvelope.amplitude must be nonnegative")

    def log_value(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        with np.errstate(divide="ignore"):
            return math.log(self.amplitude) + self.power * np.log(n) + n * math.log(self.ratio)

    def __call__(self, n):
        if self.amplitude == 0:
            return np.zeros_like(np.asarray(n, dtype=float))
        return np.exp(self.log_value(n))

    def tail(self, n_last: int) -> float:
        """Bound on ``sum_{n > n_last} envelope(n)``; requires ``n_last + 1 >= start``."""
        if self.amplitude == 0:
            return 0.0
        m = n_last + 1
        if m < self.start:
            return math.inf
        head = 0.0
        if self.power > 0:
            # the term ratio r (1 + 1/k)^p drops to (1 + r)/2 once
            # k >= 1 / (((1 + r) / 2r)^(1/p) - 1); earlier terms are summed explicitly
            grow = ((1.0 + self.ratio) / (2.0 * self.ratio)) ** (1.0 / self.power) - 1.0
            k_min = math.ceil(1.0 / grow)
            if k_min > m:
                if k_min - m > 10**6:
                    return math.inf
                head = float(np.sum(self(np.arange(m, k_min))))
                m = k_min
        rho = self.ratio * (1.0 + 1.0 / m) ** self.power if self.power > 0 else self.ratio
        if rho >= 1.0:
            return math.inf
        log_first = float(self.log_value(m))
        return head + math.exp(log_first - math.log1p(-rho))

    def terms_for(self, tol: float, n_max: int = INDEX_N_MAX) -> int:
        """Smallest ``N >= start - 1`` with ``tail(N) <= tol`` (``n_max + 1`` if none)."""
        lo = max(self.start - 1, 0)
        if self.tail(lo) <= tol:
            return lo
        hi = max(lo + 1, 1)
        while self.tail(hi) > tol:
            if hi > n_max:
                return n_max + 1
            hi *= 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.tail(mid) <= tol:
                hi = mid
            else:
                lo = mid
        return hi


def best_envelope(candidates: Sequence[GeometricEnvelope], tol: float) -> GeometricEnvelope:
    """The candidate that certifies ``tol`` with the fewest terms."""
    return min(candidates, key=lambda e: (e.terms_for(tol), e.tail(max(e.start, 1))))


def _evaluate(term, ns: np.ndarray, vectorized: bool) -> np.ndarray:
    if ns.size == 0:
        return np.zeros(0)
    if vectorized:
        vals = np.asarray(term(ns))
    else:
        vals = np.array([term(int(n)) for n in ns])
    if vals.shape != ns.shape:
        raise ValueError("term returned an array of the wrong shape")
    return vals


def _fsum(vals: np.ndarray):
    if np.iscomplexobj(vals):
        return complex(math.fsum(vals.real), math.fsum(vals.imag))
    return math.fsum(vals)


def sum_index_side(
    term: Callable,
    envelope: GeometricEnvelope,
    tol: float,
    *,
    n_max: int = INDEX_N_MAX,
    vectorized: bool = False,
    check_envelope: bool = True,
    slack: float = 0.0,
) -> SeriesValue:
    """Sum ``term(n)`` for ``n = 1..N`` with ``N`` fixed by the envelope tail.

    Parameters
    ----------
    term : callable
        ``n -> float or complex``; with ``vectorized=True`` it receives an
        integer array and returns an array of values.
    envelope : GeometricEnvelope
        Majorant of ``|term(n)|``.
    tol : float
        Required bound on the omitted remainder.
    n_max : int
        Cap on the number of terms.
    check_envelope : bool
        Verify ``|term(n)| <= envelope(n) + slack`` for every evaluated
        ``n >= envelope.start`` and raise ``DecayViolationError`` otherwise.
    slack : float
        Absolute allowance for rounding in the terms.

    Returns
    -------
    SeriesValue

    Raises
    ------
    ConvergenceError
        If more than ``n_max`` terms would be needed; the partial value over
        ``n_max`` terms is in ``diagnostics["partial"]``.
    """
    n_terms = max(envelope.terms_for(tol, n_max), 1)
    if n_terms > n_max:
        ns = np.arange(1, n_max + 1)
        partial = _fsum(_evaluate(term, ns, vectorized))
        raise ConvergenceError(
            "index-side series needs more than n_max terms",
            {"partial": partial, "n_max": n_max, "tail_at_cap": envelope.tail(n_max)},
        )
    ns = np.arange(1, n_terms + 1)
    vals = _evaluate(term, ns, vectorized)
    if check_envelope:
        claimed = ns >= envelope.start
        over = np.abs(vals[claimed]) > envelope(ns[claimed]) * (1.0 + 1e-9) + slack
        if np.any(over):
            first = int(ns[claimed][over][0])
            raise DecayViolationError(
                "index-side term exceeds its envelope",
                {"n": first, "term": complex(vals[first - 1]), "envelope": float(envelope(first))},
            )
    return SeriesValue(_fsum(vals), n_terms, envelope.tail(n_terms), {"envelope": envelope})


def doubly_exponential_envelope(decay_x: float, beta: float, amplitude: float = 1.0, power: float = 0.0):
    """``amplitude * cosh(beta n)**power * exp(-decay_x cosh(beta n))`` as a callable."""

    def env(n):
        c = np.cosh(beta * np.asarray(n, dtype=float))
        with np.errstate(over="ignore", under="ignore"):
            return amplitude * np.exp(power * np.log(c) - decay_x * c)

    return env


def sum_cosh_side(
    term: Callable,
    decay_x: float | None,
    tol: float,
    *,
    beta: float | None = None,
    amplitude: float = 1.0,
    envelope: Callable | GeometricEnvelope | None = None,
    n_max: int = COSH_N_MAX,
    vectorized: bool = False,
) -> SeriesValue:
    """Sum a cosh-lattice series ``term(n)``, ``n >= 1``, with a certified tail.

    The default majorant is ``amplitude * exp(-decay_x cosh(beta n))``.  A
    custom callable ``envelope(n)`` may replace it; it must have
    nonincreasing ratios ``envelope(n+1)/envelope(n)``.  The sum stops at
    the first ``N`` with ``envelope(N+2) <= envelope(N+1)/2``, and then
    ``tail <= 2 envelope(N+1)``: every later ratio is at most 1/2.
    A ``GeometricEnvelope`` is also accepted for kernels that only decay
    like a power of ``cosh``; its closed-form tail is used instead.

    Parameters
    ----------
    term : callable
    decay_x : float or None
        Coefficient of ``cosh(beta n)`` in the exponent.
    tol : float
        Required bound on the omitted remainder.
    beta : float
        Lattice spacing inside ``cosh``.
    amplitude : float
        Constant ``C`` of the default majorant.
    envelope : callable or GeometricEnvelope, optional
    n_max : int
        Cap on the number of terms (64 by default).

    Returns
    -------
    SeriesValue

    Raises
    ------
    ConvergenceError
        If the cap is reached first.
    """
    if isinstance(envelope, GeometricEnvelope):
        return sum_index_side(term, envelope, tol, n_max=n_max, vectorized=vectorized)
    if envelope is None:
        if decay_x is None or beta is None:
            raise DomainError("sum_cosh_side needs decay_x and beta or an explicit envelope")
        if not decay_x > 0:
            raise DomainError("decay_x must be positive")
        envelope = doubly_exponential_envelope(decay_x, beta, amplitude)
    n_terms = None
    for n in range(1, n_max + 1):
        e1, e2 = float(envelope(n + 1)), float(envelope(n + 2))
        if e1 == 0.0 or (e2 <= 0.5 * e1 and 2.0 * e1 <= tol):
            n_terms = n
            break
    if n_terms is None:
        ns = np.arange(1, n_max + 1)
        partial = _fsum(_evaluate(term, ns, vectorized))
        raise ConvergenceError(
            "cosh-side series needs more than n_max terms", {"partial": partial, "n_max": n_max}
        )
    ns = np.arange(1, n_terms + 1)
    vals = _evaluate(term, ns, vectorized)
    tail = 2.0 * float(envelope(n_terms + 1))
    return SeriesValue(_fsum(vals), n_terms, tail, {})


# ---------------------------------------------------------------------------
# Dirichlet characters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CharacterSpec:
    """A Dirichlet character given by its value table ``chi(0), ..., chi(q-1)``.

    Parameters
    ----------
    modulus : int
    values : tuple of complex
    parity : str
        ``"even"`` or ``"odd"``; must match ``chi(-1)``.

    Raises
    ------
    DomainError
        If the table is not a character of the stated parity.
    """

    modulus: int
    values: tuple
    parity: str

    def __post_init__(self):
        q = int(self.modulus)
        vals = tuple(complex(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if q < 1 or len(vals) != q:
            raise DomainError("character table must have exactly q entries")
        if self.parity not in ("even", "odd"):
            raise DomainError("parity must be 'even' or 'odd'")
        for n in range(q):
            unit = math.gcd(n, q) == 1
            if unit and abs(abs(vals[n]) - 1.0) > 1e-12:
                raise DomainError(f"chi({n}) must have modulus 1")
            if not unit and vals[n] != 0:
                raise DomainError(f"chi({n}) must vanish since gcd({n}, {q}) > 1")
        for a in range(q):
            for b in range(q):
                if abs(vals[a * b % q] - vals[a] * vals[b]) > 1e-12:
                    raise DomainError("character table is not multiplicative")
        sign = 1.0 if self.parity == "even" else -1.0
        if q > 1 and abs(vals[q - 1] - sign) > 1e-12:
            raise DomainError(f"chi(-1) does not match parity {self.parity!r}")

    def __call__(self, n):
        idx = np.asarray(n) % self.modulus
        table = np.array(self.values)
        out = table[idx]
        return complex(out) if np.ndim(out) == 0 else out

    @property
    def is_principal(self) -> bool:
        return all(v == 1 for n, v in enumerate(self.values) if math.gcd(n, self.modulus) == 1)

    @property
    def is_real(self) -> bool:
        return all(v.imag == 0 for v in self.values)

    @property
    def gauss_sum(self) -> complex:
        """``G(chi) = sum_r chi(r) exp(2 pi i r / q)``."""
        q = self.modulus
        return complex(sum(self.values[r] * cmath.exp(2j * math.pi * r / q) for r in range(q)))

    @property
    def is_primitive(self) -> bool:
        return abs(abs(self.gauss_sum) ** 2 - self.modulus) < 1e-9 * self.modulus

    def conjugate(self) -> "CharacterSpec":
        return CharacterSpec(self.modulus, tuple(v.conjugate() for v in self.values), self.parity)


MOD5_EVEN = CharacterSpec(5, (0, 1, -1, -1, 1), "even")
MOD5_ODD = CharacterSpec(5, (0, 1, 1j, -1j, -1), "odd")


def parse_complex(text: str) -> complex:
    """Parse ``re+imi`` style numbers (``i`` or ``j`` as the imaginary unit)."""
    t = text.strip().replace(" ", "").replace("i", "j")
    if not t:
        raise DomainError("empty character value")
    try:
        return complex(t)
    except ValueError as exc:
        raise DomainError(f"cannot parse complex value {text!r}") from exc


def parse_character(text: str) -> CharacterSpec:
    """Read a character from the two-line text format.

    The first line is ``q parity``, the second the ``q`` comma-separated
    values ``chi(0), ..., chi(q-1)``.
    """
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if len(lines) != 2:
        raise DomainError("character file must have exactly two non-empty lines")
    head = lines[0].split()
    if len(head) != 2:
        raise DomainError("first line must read 'q parity'")
    try:
        q = int(head[0])
    except ValueError as exc:
        raise DomainError("modulus must be an integer") from exc
    values = tuple(parse_complex(v) for v in lines[1].split(","))
    return CharacterSpec(q, values, head[1])


def sum_character(
    term: Callable,
    chi: CharacterSpec,
    tol: float,
    envelope: GeometricEnvelope,
    *,
    n_max: int = INDEX_N_MAX,
    vectorized: bool = False,
) -> SeriesValue:
    """Character-twisted index-side sum ``sum_{n>=1} chi(n) term(n)``.

    ``|chi(n)| <= 1``, so the envelope of ``term`` certifies the twisted tail.

    Raises
    ------
    DomainError
        For principal or imprimitive characters.
    """
    if chi.is_principal:
        raise DomainError("the character analogues need a nonprincipal character")
    if not chi.is_primitive:
        raise DomainError("the character analogues need a primitive character")
    if vectorized:
        def twisted(ns):
            return chi(ns) * np.asarray(term(ns))
    else:
        def twisted(n):
            return chi(n) * term(n)
    return sum_index_side(twisted, envelope, tol, n_max=n_max, vectorized=vectorized)


# ---------------------------------------------------------------------------
# Bessel amplitude constant
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BesselAmplitudeBound:
    """Constant ``c`` with ``|J_order(t)| <= c t^(-1/2)`` for all ``t > 0``.

    Use ``BesselAmplitudeBound.calibrate(order)``; the constant is the
    maximum of ``sqrt(t) |J_order(t)|`` on a fine grid over ``(0, 400]``
    (where the maximum is attained) raised by 2 percent, and never below
    the asymptotic amplitude ``sqrt(2/pi)`` raised by the first correction.
    """

    order: float
    c_nu: float

    @classmethod
    def calibrate(cls, order: float) -> "BesselAmplitudeBound":
        order = float(order)
        if order < -0.5:
            raise DomainError("sqrt(t) J_order(t) is unbounded near 0 for order < -1/2")
        t = np.concatenate([np.linspace(1e-6, 50.0, 200001), np.linspace(50.0, 400.0, 200001)])
        grid_max = float(np.max(np.sqrt(t) * np.abs(_sp.jv(order, t))))
        asym = math.sqrt(2.0 / math.pi) * (1.0 + abs(4.0 * order * order - 1.0) / (8.0 * 400.0))
        return cls(order, 1.02 * max(grid_max, asym))

    def __call__(self, t):
        return self.c_nu / np.sqrt(t)
