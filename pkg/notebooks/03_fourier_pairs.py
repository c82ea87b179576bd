"""
Index Fourier pairs
===================

A forward check integrates the index-side function F(tau) against
cos(xi tau) and compares with the closed form G(xi).  The inverse check goes
the other way at one tau.
"""

import math

import numpy as np
from scipy.integrate import trapezoid

from indexkernel import identities as ids
from indexkernel import kernels as kn

xi_grid = [0.0, 0.5, 1.0, 2.0]
for which in ("L1", "C8", "C9"):
    mu = 0.0 if which == "C8" else 0.25
    reports = ids.verify_fourier_pair(which, kn.EvalPoint(mu, 2.0, 1.0), xi_grid)
    for rep in reports:
        p = rep.case.params
        where = f"xi={p.xi:g}" if p.xi is not None else f"tau={p.tau:g}"
        print(f"{which} {where:<8} lhs={rep.lhs: .12e} rhs={rep.rhs: .12e} rel_err={rep.rel_err:.1e}")

# At mu = 0 the first pair is the classical cosine transform of K_{i tau}:
# 2 int_0^inf K_{i tau}(y) cos(xi tau) d tau = pi exp(-y cosh xi)
y = 0.5
taus = np.linspace(0.0, 40.0, 4001)
vals = np.array([kn.macdonald_imag(t, y) for t in taus])
for xi in (0.0, 1.0):
    approx = 2 * trapezoid(vals * np.cos(xi * taus), taus)
    print(xi, approx, math.pi * math.exp(-y * math.cosh(xi)))
