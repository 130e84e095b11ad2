"""Reproducing kernels on S^d, their smoothed versions, and the flat scaling limit.

Points of R^d are carried to the sphere by ``psi(x) = (xi sin|x|, cos|x|)``
(``x = |x| xi``), which maps the ball of radius pi onto S^d and preserves
the geodesic distance to the north pole ``e = (0, ..., 0, 1)``. Under the
dilation ``x -> psi(x / n)`` the smoothed kernel ``n^-d G_{n,eta}``
approaches the inverse Fourier transform ``K_eta`` of the radial profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .constants import dim_pi, reproducing_density
from .errors import DomainError, NumericError
from .quadrature import sphere_area
from .special import (
    JacobiBasis,
    bessel_j_normalized,
    gauss_jacobi_nodes_weights,
    gegenbauer_eval,
    gegenbauer_normalized,
    jacobi_normalized,
)

__all__ = [
    "KernelProfile",
    "SpherePoint",
    "K_eta",
    "geodesic_distance",
    "kernel_G",
    "kernel_G_eta",
    "localization_profile",
    "localization_sweep",
    "psi_map",
    "scaling_limit_residual",
    "scaling_sweep",
    "sphere_integral_scaled",
    "sphere_rule",
]


@dataclass(frozen=True)
class SpherePoint:
    """Unit vector in R^(d+1)."""

    coords: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(v) for v in self.coords)
        if len(c) < 2:
            raise DomainError("a point of S^d needs at least two coordinates")
        if abs(math.sqrt(sum(v * v for v in c)) - 1) > 1e-12:
            raise DomainError("sphere point must have unit norm")
        object.__setattr__(self, "coords", c)

    @property
    def d(self) -> int:
        return len(self.coords) - 1

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)


def _smooth_step(s):
    # C^inf transition: 0 for s <= 0, 1 for s >= 1
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        f = np.where(s > 0, np.exp(-1 / np.where(s > 0, s, 1.0)), 0.0)
        g = np.where(s < 1, np.exp(-1 / np.where(s < 1, 1 - s, 1.0)), 0.0)
    return f / (f + g)


@dataclass(frozen=True)
class KernelProfile:
    """Cutoff ``eta`` on [0, inf).

    ``variant="lower"``: 1 on ``[0, 1-eps]``, 0 from 1 on.
    ``variant="upper"``: 1 on ``[0, 1]``, 0 from ``1+eps`` on.
    ``variant="indicator"``: the sharp cutoff of [0, 1] (not smooth; for
    testing the limit case only).
    """

    eps: float = 0.25
    variant: str = "lower"
    kind: str = "plateau_cutoff"

    def __post_init__(self):
        if self.variant not in ("lower", "upper", "indicator"):
            raise DomainError(f"unknown profile variant {self.variant!r}")
        if self.variant != "indicator" and not (0 < self.eps < 1):
            raise DomainError(f"eps must lie in (0, 1), got {self.eps}")

    @property
    def plateau(self) -> float:
        return {"lower": 1 - self.eps, "upper": 1.0, "indicator": 1.0}[self.variant]

    @property
    def support_end(self) -> float:
        return {"lower": 1.0, "upper": 1 + self.eps, "indicator": 1.0}[self.variant]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.variant == "indicator":
            return np.where(t <= 1, 1.0, 0.0)
        a, b = self.support_end, self.plateau
        return _smooth_step((a - t) / (a - b))


def psi_map(x, d: int | None = None) -> np.ndarray:
    """``psi(x) = (xi sin|x|, cos|x|)`` for ``x = |x| xi`` with ``|x| <= pi``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if d is not None and x.shape[-1] != d:
        raise DomainError(f"expected a vector of length {d}, got {x.shape[-1]}")
    r = np.linalg.norm(x, axis=-1, keepdims=True)
    if np.any(r > math.pi * (1 + 1e-15)):
        raise DomainError("psi_map needs |x| <= pi")
    with np.errstate(invalid="ignore", divide="ignore"):
        sinc = np.where(r > 0, np.sin(r) / np.where(r > 0, r, 1.0), 1.0)
    return np.concatenate((x * sinc, np.cos(r)), axis=-1)


def geodesic_distance(u, v) -> np.ndarray:
    """Angle between unit vectors, accurate for nearby points."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    # |u-v| |u+v| = 2 sin(theta) for unit vectors
    sin2 = np.linalg.norm(u - v, axis=-1) * np.linalg.norm(u + v, axis=-1)
    return np.arctan2(sin2, 2 * np.sum(u * v, axis=-1))


@lru_cache(maxsize=64)
def _sphere_rule_cached(dim: int, degree: int):
    if dim == 0:
        return np.array([[-1.0], [1.0]]), np.array([1.0, 1.0])
    if dim == 1:
        m = degree + 1
        th = 2 * math.pi * np.arange(m) / m
        return np.stack((np.cos(th), np.sin(th)), axis=1), np.full(m, 2 * math.pi / m)
    a = (dim - 2) / 2
    t, wt = gauss_jacobi_nodes_weights(degree // 2 + 1, a, a)
    sub, ws = _sphere_rule_cached(dim - 1, degree)
    r = np.sqrt(1 - t * t)
    pts = np.concatenate(
        ((r[:, None, None] * sub[None]).reshape(-1, dim), np.repeat(t, sub.shape[0])[:, None]),
        axis=1,
    )
    return pts, np.outer(wt, ws).ravel()


def sphere_rule(dim: int, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Product rule on S^dim exact for polynomials of degree <= ``degree``.

    Returns ``(points, weights)`` with weights summing to the surface area.
    """
    if dim < 0 or degree < 0:
        raise DomainError("sphere_rule needs dim >= 0 and degree >= 0")
    return _sphere_rule_cached(int(dim), int(degree))


def sphere_integral_scaled(
    f: Callable[[np.ndarray], np.ndarray],
    n: int,
    d: int,
    *,
    radial_nodes: int = 200,
    angular_degree: int = 40,
) -> float:
    """Integral of ``f`` over S^d through the dilated map ``x -> psi(x / n)``.

    Evaluates ``n^-d int_{B(n pi)} f(psi(x/n)) (sin(|x|/n) / (|x|/n))^(d-1) dx``
    in polar coordinates: Gauss-Legendre in the radius, a product rule of
    degree ``angular_degree`` on S^(d-1).
    """
    if n < 1 or d < 1:
        raise DomainError("sphere_integral_scaled needs n >= 1 and d >= 1")
    xs, ws = gauss_jacobi_nodes_weights(radial_nodes, 0.0, 0.0)
    R = n * math.pi
    r = 0.5 * R * (1 + xs)
    wr = 0.5 * R * ws
    dirs, wd = sphere_rule(d - 1, angular_degree)
    x = (r[:, None, None] * dirs[None]).reshape(-1, d)
    vals = np.asarray(f(psi_map(x / n)), dtype=float).reshape(r.size, dirs.shape[0])
    u = r / n
    jac = r ** (d - 1) * (np.sin(u) / np.where(u > 0, u, 1.0)) ** (d - 1)
    return float(np.dot(wr * jac, vals @ wd)) / n**d


def kernel_G(n: int, d: int, t, *, method: str = "jacobi"):
    """Reproducing kernel of the degree-n spherical polynomials on S^d.

    ``method="jacobi"`` uses ``d_n R_n^(d/2, (d-2)/2)(t)``;
    ``method="gegenbauer"`` sums ``(k + lam)/lam C_k^lam(t) / omega_d`` with
    ``lam = (d-1)/2`` (Chebyshev limit ``1 + 2 sum T_k`` at d = 1).
    """
    if n < 0 or d < 1:
        raise DomainError("kernel_G needs n >= 0 and d >= 1")
    t = np.asarray(t, dtype=float)
    if method == "jacobi":
        return reproducing_density(n, d) * jacobi_normalized(n, JacobiBasis(d / 2, (d - 2) / 2), t)
    if method != "gegenbauer":
        raise DomainError(f"unknown method {method!r}")
    lam = (d - 1) / 2
    total = np.ones_like(t)
    if d == 1:
        tab = gegenbauer_normalized(n, 0.0, t, table=True)
        total = total + 2 * tab[1:].sum(axis=0)
    else:
        for k in range(1, n + 1):
            total = total + (k + lam) / lam * gegenbauer_eval(k, lam, t)
    return total / sphere_area(d)


@lru_cache(maxsize=64)
def _harmonic_dims(cap: int, d: int) -> np.ndarray:
    dims = np.array([float(dim_pi(j, d)) for j in range(cap + 1)])
    dims[1:] -= dims[:-1].copy()
    return dims


def _degree_cap(n: int, profile: KernelProfile) -> int:
    return int(math.ceil(n * profile.support_end))


def kernel_G_eta(n: int, d: int, profile: KernelProfile, t):
    """Smoothed kernel ``(1/omega_d) sum_j eta(j/n) (j+lam)/lam C_j^lam(t)``.

    Summation stops at ``ceil(n * sup supp eta)``; the summand equals
    ``dim H_j^d * C_j^lam(t)/C_j^lam(1)``, which stays finite at d = 1.
    """
    if n < 1 or d < 1:
        raise DomainError("kernel_G_eta needs n >= 1 and d >= 1")
    cap = _degree_cap(n, profile)
    coef = profile(np.arange(cap + 1) / n) * _harmonic_dims(cap, d)
    tab = gegenbauer_normalized(cap, (d - 1) / 2, t, table=True)
    return np.tensordot(coef, tab, axes=1) / sphere_area(d)


def K_eta(profile: KernelProfile, d: int, r, tol: float = 1e-12, *, max_nodes: int = 1 << 14):
    """Inverse Fourier transform of ``eta(|.|)`` on R^d as a function of ``|x| = r``.

    ``K(r) = omega_(d-1) / (2 pi)^d  int_0^2 eta(rho) j_(d/2-1)(rho r) rho^(d-1) d rho``;
    the integral is split at the plateau edge and refined until two node
    counts agree to ``tol`` (absolute, relative to ``K(0)``).
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r < 0):
        raise DomainError("K_eta needs r >= 0")
    const = sphere_area(d - 1) / (2 * math.pi) ** d
    edges = [0.0, profile.plateau]
    if profile.support_end > profile.plateau:
        edges.append(profile.support_end)
    order = d / 2 - 1
    scale = const * profile.support_end**d / d

    def integrate(m):
        total = np.zeros_like(r)
        x, w = gauss_jacobi_nodes_weights(m, 0.0, 0.0)
        for a, b in zip(edges[:-1], edges[1:]):
            rho = a + 0.5 * (b - a) * (1 + x)
            vals = bessel_j_normalized(order, np.multiply.outer(r, rho)) * (profile(rho) * rho ** (d - 1))
            total += 0.5 * (b - a) * vals @ w
        return const * total

    m = int(max(32, 2 ** math.ceil(math.log2(0.5 * float(r.max()) + 32))))
    prev = integrate(m)
    while True:
        m *= 2
        cur = integrate(m)
        if np.max(np.abs(cur - prev)) <= tol * scale:
            return cur
        if m > max_nodes:
            raise NumericError("K_eta quadrature did not converge", estimate=float(cur[0]))
        prev = cur


def scaling_limit_residual(n: int, d: int, profile: KernelProfile, x, y, *, k_value: float | None = None) -> float:
    """``|n^-d G_{n,eta}(psi(x/n) . psi(y/n)) - K_eta(|x - y|)|``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != (d,) or y.shape != (d,):
        raise DomainError(f"x and y must be vectors of length {d}")
    if max(np.linalg.norm(x), np.linalg.norm(y)) > n * math.pi:
        raise DomainError("scaling_limit_residual needs |x|, |y| <= n pi")
    u, v = psi_map(x / n), psi_map(y / n)
    theta = geodesic_distance(u, v)
    g = float(kernel_G_eta(n, d, profile, math.cos(float(theta)))) / n**d
    if k_value is None:
        k_value = float(K_eta(profile, d, float(np.linalg.norm(x - y)))[0])
    return abs(g - k_value)


def localization_profile(n: int, d: int, profile: KernelProfile, ell: float, *, grid: int = 512) -> float:
    """``max_rho |G_{n,eta}(cos rho)| (1 + n rho)^ell / n^d`` over a geodesic grid.

    The grid is ``rho = 0`` plus ``grid`` log-spaced radii from ``1/n`` to pi.
    """
    if ell < 0:
        raise DomainError("ell must be nonnegative")
    rho = np.concatenate(([0.0], np.geomspace(1 / n, math.pi, grid)))
    g = np.abs(kernel_G_eta(n, d, profile, np.cos(rho)))
    return float(np.max(g * (1 + n * rho) ** ell) / n**d)


def scaling_sweep(ns: Sequence[int], d: int, profile: KernelProfile, pairs) -> list[tuple]:
    """Rows ``(n, x, y, residual)`` for every degree and pair."""
    rows = []
    cache: dict[float, float] = {}
    for x, y in pairs:
        dist = float(np.linalg.norm(np.asarray(x, float) - np.asarray(y, float)))
        if dist not in cache:
            cache[dist] = float(K_eta(profile, d, dist)[0])
        for n in ns:
            rows.append((n, tuple(np.atleast_1d(x)), tuple(np.atleast_1d(y)),
                         scaling_limit_residual(n, d, profile, x, y, k_value=cache[dist])))
    return rows


def localization_sweep(ns: Sequence[int], d: int, profile: KernelProfile, ells: Sequence[float]) -> list[tuple]:
    """Rows ``(n, ell, empirical_constant)``."""
    return [(n, ell, localization_profile(n, d, profile, ell)) for n in ns for ell in ells]
