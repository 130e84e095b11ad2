"""Independent reference implementations used only by the tests.

Nothing here imports the package: Jacobi polynomials come from the explicit
binomial sum, Bessel functions and integrals from mpmath.
"""

from __future__ import annotations

import math

import mpmath as mp


def jacobi_monomial(n, a, b, t):
    """``P_n^(a,b)(t)`` from the explicit sum in powers of ``(t-1)/2`` and ``(t+1)/2``."""
    mp.mp.dps = 40
    a, b, t = mp.mpf(a), mp.mpf(b), mp.mpf(t)
    s = mp.mpf(0)
    for k in range(n + 1):
        s += mp.binomial(n + a, n - k) * mp.binomial(n + b, k) * ((t - 1) / 2) ** k * ((t + 1) / 2) ** (n - k)
    return float(s)


def gegenbauer_monomial(k, lam, t):
    """``C_k^lam(t)`` from its power-series coefficients."""
    mp.mp.dps = 40
    s = mp.mpf(0)
    for m in range(k // 2 + 1):
        s += (-1) ** m * mp.rf(lam, k - m) / (mp.factorial(m) * mp.factorial(k - 2 * m)) * (2 * mp.mpf(t)) ** (k - 2 * m)
    return float(s)


def bessel_normalized(order, z):
    """``Gamma(order+1) (z/2)^-order J_order(z)`` via mpmath."""
    mp.mp.dps = 30
    if z == 0:
        return 1.0
    z = mp.mpf(z)
    return float(mp.gamma(order + 1) * (z / 2) ** (-order) * mp.besselj(order, z))


def zonal_lp_norm(coeff_fn, d, p, breaks=()):
    """``(omega_(d-1) int |P|^p (1-t^2)^((d-2)/2) dt)^(1/p)`` by mpmath adaptive quadrature."""
    mp.mp.dps = 30
    a = mp.mpf(d - 2) / 2
    omega = 2 * mp.pi ** (mp.mpf(d) / 2) / mp.gamma(mp.mpf(d) / 2)
    pts = [-1, *sorted(breaks), 1]
    val = mp.quad(lambda t: abs(coeff_fn(t)) ** p * (1 - t * t) ** a, pts)
    return float((omega * val) ** (mp.mpf(1) / p))


def sphere_area(d):
    return 2 * math.pi ** ((d + 1) / 2) / math.gamma((d + 1) / 2)
