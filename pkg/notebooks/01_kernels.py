"""
Evaluating the index kernels
============================

Each kernel has a primary route and a second, independent one.  This script
prints both and compares against closed forms where they exist.
"""

import math

import numpy as np
from scipy import special as sp

from indexkernel import kernels as kn

# K_{i tau}(x) is real and even in tau.  At tau = 0 it is the ordinary K_0.
r = kn.macdonald_imag(0.0, 1.0, full_output=True)
print("K_0(1) =", r.value, "route:", r.route, "scipy:", sp.k0(1.0))

# For growing tau the values fall like exp(-pi tau / 2), so the estimate
# printed next to each value is absolute.
for tau in (1.0, 5.0, 20.0):
    r = kn.macdonald_imag(tau, 1.0, full_output=True)
    print(f"K_(i {tau:g})(1) = {r.value: .6e}   est. error {r.abs_error_estimate:.1e}")

# the uniform majorant exp(-delta |tau|) K_0(x cos delta) that drives the
# truncation of every index-side series
taus = np.linspace(0, 10, 6)
print(np.array([abs(kn.macdonald_imag(t, 1.0)) for t in taus]))
print(kn.macdonald_bound(taus, 1.0, math.pi / 3))

# Complex order.  K_{1/2}(x) is elementary.
print(kn.macdonald_complex_order(0.5, 0.0, 2.0), math.sqrt(math.pi / 4) * math.exp(-2.0))
print(kn.macdonald_complex_order(0.5, 2.0, 1.0))

# W_{mu, i tau}(x): inverse index Fourier integral over D_{2 mu}, checked
# against the Mellin-Barnes line (full_output exposes both numbers).
r = kn.whittaker_imag(0.25, 2.0, 1.0, full_output=True)
print("W_(1/4, 2i)(1) =", r.value, " line:", r.diagnostics["mellin_barnes"])

# mu = 0 brings back the Macdonald function
x = 1.5
print(kn.whittaker_imag(0.0, 1.0, 2 * x), math.sqrt(2 * x / math.pi) * kn.macdonald_imag(1.0, x))

# W_{-1/2, 0} has the closed form sqrt(x) E1(x) exp(x/2)
print(kn.whittaker_imag(-0.5, 1e-4, 1.0), kn.whittaker_minus_half_zero(1.0))

# Parabolic cylinder functions for z > 0
z = np.array([0.5, 1.0, 2.0, 8.0])
print(kn.parabolic_d(0.0, 2.0), math.exp(-1.0))
print(kn.parabolic_d_scaled(-1.0, z))
print(math.sqrt(math.pi / 2) * sp.erfcx(z / math.sqrt(2)))

# The Gamma-weighted Lommel function from the Widder integral, and the
# half-integer order one from a Laplace integral
print(kn.lommel_weighted(0.25, 1.0, 2.0))
x = np.array([1.0, 10.0, 100.0, 1000.0])
print(kn.lommel_half(0.25, x) * x ** 1.25)  # bounded: S ~ x^(mu - 3/2)
