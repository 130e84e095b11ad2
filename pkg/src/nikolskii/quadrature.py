"""Weighted quadrature on [-1, 1] and radial quadrature on [0, inf)."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import chebyshev as C

from .errors import DomainError, NumericError
from .special import (
    JacobiBasis,
    PolyCoeffs,
    gauss_jacobi_nodes_weights,
    jacobi_eval,
    jacobi_zeros,
)

__all__ = [
    "QuadratureRule",
    "gauss_jacobi",
    "gauss_radau_jacobi",
    "radau_endpoint_weight",
    "lp_norm_weighted",
    "lp_integral",
    "panel_rule",
    "radial_integral",
    "real_roots",
    "sphere_area",
]

DEFAULT_TOL = 1e-10
PANEL_NODES = 64


def sphere_area(d: int) -> float:
    """Surface area ``2 pi^((d+1)/2) / Gamma((d+1)/2)`` of S^d (d >= 0)."""
    if d < 0:
        raise DomainError(f"sphere dimension must be >= 0, got {d}")
    return 2 * math.pi ** ((d + 1) / 2) / math.gamma((d + 1) / 2)


@dataclass(frozen=True)
class QuadratureRule:
    """Positive quadrature rule for the Jacobi weight of ``basis`` on [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray
    basis: JacobiBasis
    exactness_degree: int

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise DomainError("nodes and weights must be 1-d arrays of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise DomainError("nodes must be strictly increasing")
        if np.any(weights <= 0):
            raise DomainError("quadrature weights must be positive")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.nodes.size

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(np.dot(self.weights, f(self.nodes)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# alpha={self.basis.alpha!r} beta={self.basis.beta!r} exactness_degree={self.exactness_degree}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["node", "weight"])
        for x, w in zip(self.nodes, self.weights):
            writer.writerow([f"{x:.17g}", f"{w:.17g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "QuadratureRule":
        lines = text.splitlines()
        header = dict(item.split("=") for item in lines[0].lstrip("# ").split())
        rows = list(csv.reader(lines[2:]))
        nodes = [float(r[0]) for r in rows if r]
        weights = [float(r[1]) for r in rows if r]
        basis = JacobiBasis(float(header["alpha"]), float(header["beta"]))
        return cls(np.array(nodes), np.array(weights), basis, int(header["exactness_degree"]))


def gauss_jacobi(N: int, basis: JacobiBasis) -> QuadratureRule:
    """N-point Gauss-Jacobi rule, exact through degree ``2N - 1``."""
    if N < 1:
        raise DomainError("gauss_jacobi needs N >= 1")
    x, w = gauss_jacobi_nodes_weights(N, basis.alpha, basis.beta)
    return QuadratureRule(x, w, basis, 2 * N - 1)


def radau_endpoint_weight(N: int, basis: JacobiBasis) -> float:
    """Weight attached to ``t = 1`` in the N-interior-node Jacobi-Gauss-Radau rule."""
    a, b = basis.alpha, basis.beta
    log_val = (
        (a + b + 1) * math.log(2)
        + math.log(a + 1)
        + 2 * math.lgamma(a + 1)
        + math.lgamma(N + 1)
        + math.lgamma(N + b + 1)
        - math.lgamma(N + a + 2)
        - math.lgamma(N + a + b + 2)
    )
    return math.exp(log_val)


def gauss_radau_jacobi(N: int, basis: JacobiBasis) -> QuadratureRule:
    """Jacobi-Gauss-Radau rule with the fixed node ``t = 1``.

    The N interior nodes are the zeros of ``P_N^(alpha+1, beta)``. The rule
    integrates every polynomial of degree ``<= 2N`` exactly against
    ``(1-t)^alpha (1+t)^beta``.
    """
    if N < 1:
        raise DomainError("gauss_radau_jacobi needs N >= 1")
    a, b = basis.alpha, basis.beta
    x = jacobi_zeros(N, JacobiBasis(a + 1, b))
    lam0 = radau_endpoint_weight(N, basis)
    log_num = (a + b + 4) * math.log(2) + math.lgamma(N + a + 2) + math.lgamma(N + b + 1)
    # the N! in the denominator is required for exactness to degree 2N
    log_den = math.log(N + a + b + 2) + math.lgamma(N + a + b + 3) + math.lgamma(N + 1)
    q = jacobi_eval(N - 1, JacobiBasis(a + 2, b + 1), x)
    lam = math.exp(log_num - log_den) / ((1 + x) * (1 - x) ** 2 * q * q)
    return QuadratureRule(np.append(x, 1.0), np.append(lam, lam0), basis, 2 * N)


def real_roots(poly: PolyCoeffs, *, imag_tol: float = 1e-8) -> np.ndarray:
    """Real zeros of ``poly`` inside (-1, 1), sorted and Newton-polished."""
    n = poly.degree
    coeffs = np.asarray(poly.coeffs)
    nz = np.flatnonzero(np.abs(coeffs) > 0)
    if n == 0 or nz.size == 0 or nz[-1] == 0:
        return np.empty(0)
    cheb = C.chebinterpolate(poly, n)
    cheb = np.trim_zeros(cheb, "b")
    scale = np.max(np.abs(cheb))
    while cheb.size > 1 and abs(cheb[-1]) < 1e-14 * scale:
        cheb = cheb[:-1]
    if cheb.size < 2:
        return np.empty(0)
    r = C.chebroots(cheb)
    r = r[(np.abs(r.imag) <= imag_tol) & (np.abs(r.real) < 1)].real
    if r.size == 0:
        return r
    for _ in range(6):
        d = poly.derivative(r)
        ok = d != 0
        step = np.zeros_like(r)
        step[ok] = poly(r[ok]) / d[ok]
        step = np.clip(step, -1e-6, 1e-6)
        r = r - step
    r = np.sort(r[(r > -1) & (r < 1)])
    if r.size > 1:
        keep = np.concatenate(([True], np.diff(r) > 1e-13))
        r = r[keep]
    return r


def panel_rule(
    breaks: np.ndarray,
    exponents: np.ndarray,
    weight: JacobiBasis | None = None,
    nodes: int = PANEL_NODES,
    level: int = 0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Composite Gauss-Jacobi rule on ``[breaks[0], breaks[-1]] = [-1, 1]``.

    Each base panel ``[breaks[i], breaks[i+1]]`` is split into ``2**level``
    equal pieces. Pieces touching an interior break point carry the factor
    ``|t - break|^exponents[i]`` in their Gauss weight; the outer ends carry
    the Jacobi weight of ``weight`` (the ``exponents`` entries at the ends
    are ignored when ``weight`` is given).

    Returns ``(t, w, s)``: ``sum(w * F(t) / s)`` approximates
    ``int F(t) (1-t)^alpha (1+t)^beta dt`` where ``s`` holds the interior
    break factors at each node.
    """
    exponents = np.array(exponents, dtype=float)
    if weight is not None:
        exponents[0], exponents[-1] = weight.beta, weight.alpha
    a_w = weight.alpha if weight is not None else 0.0
    b_w = weight.beta if weight is not None else 0.0
    last = len(breaks) - 2
    ts, ws, ss = [], [], []
    pieces = 1 << level
    for i in range(len(breaks) - 1):
        a0, b0 = float(breaks[i]), float(breaks[i + 1])
        sub = np.linspace(a0, b0, pieces + 1)
        for j in range(pieces):
            a, b = sub[j], sub[j + 1]
            el = float(exponents[i]) if j == 0 else 0.0
            er = float(exponents[i + 1]) if j == pieces - 1 else 0.0
            x, w = gauss_jacobi_nodes_weights(nodes, er, el)
            half = 0.5 * (b - a)
            t = a + half * (1 + x)
            w = w * half ** (1 + el + er)
            s = np.ones_like(t)
            left_end = i == 0 and j == 0
            right_end = i == last and j == pieces - 1
            if el and not left_end:
                s = s * (half * (1 + x)) ** el
            if er and not right_end:
                s = s * (half * (1 - x)) ** er
            # Jacobi weight factors not already absorbed into the Gauss weight
            if a_w and not right_end:
                w = w * (1 - t) ** a_w
            if b_w and not left_end:
                w = w * (1 + t) ** b_w
            ts.append(t)
            ws.append(w)
            ss.append(s)
    return np.concatenate(ts), np.concatenate(ws), np.concatenate(ss)


def _mass_factor(weight: JacobiBasis) -> float:
    d = weight.sphere_dim
    return sphere_area(d - 1) if d is not None else 1.0


def zonal_breaks(poly: PolyCoeffs, weight: JacobiBasis, root_exponent: float):
    """Break points at -1, the real roots of ``poly`` and 1, with exponents."""
    roots = real_roots(poly)
    breaks = np.concatenate(([-1.0], roots, [1.0]))
    exps = np.concatenate(([weight.beta], np.full(roots.size, root_exponent), [weight.alpha]))
    return breaks, exps


def lp_integral(
    poly: PolyCoeffs,
    p: float,
    weight: JacobiBasis | None = None,
    tol: float = DEFAULT_TOL,
    *,
    max_level: int = 8,
) -> float:
    """``int |P|^p (1-t)^alpha (1+t)^beta dt`` by root-split panels, refined to ``tol``."""
    if not p > 0:
        raise DomainError(f"p must be positive, got {p}")
    weight = weight or poly.basis
    breaks, exps = zonal_breaks(poly, weight, p)
    prev = None
    for level in range(max_level + 1):
        t, w, s = panel_rule(breaks, exps, weight, level=level)
        f = np.abs(poly(t)) ** p
        est = float(np.dot(w, f / s))
        if prev is not None and abs(est - prev) <= tol * abs(est):
            return est
        if prev is not None and est == 0 == prev:
            return 0.0
        prev = est
    raise NumericError(f"L^{p} integral did not reach tol={tol}", estimate=prev)


def lp_norm_weighted(
    poly: PolyCoeffs,
    p: float,
    basis: JacobiBasis | None = None,
    tol: float = DEFAULT_TOL,
) -> float:
    """Weighted L^p quasi-norm of a polynomial on [-1, 1].

    Computes ``(c * int |P(t)|^p (1-t)^alpha (1+t)^beta dt)^(1/p)`` where the
    weight comes from ``basis`` (default: the polynomial's own basis) and
    ``c = omega_(d-1)`` when the weight is the zonal weight of S^d, so the
    result equals the L^p(S^d) norm of the zonal function ``P(x . e)``.
    For other weights ``c = 1``.
    """
    weight = basis or poly.basis
    return (_mass_factor(weight) * lp_integral(poly, p, weight, tol)) ** (1 / p)


def radial_integral(
    f: Callable[[np.ndarray], np.ndarray],
    d: int,
    tol: float = DEFAULT_TOL,
    *,
    period: float | None = None,
    nodes: int = 48,
    max_horizon: float = 1e7,
) -> float:
    """``omega_(d-1) int_0^inf f(t) t^(d-1) dt`` for a radial profile ``f``.

    The half-line is covered by panels of length ``period`` (1 when not
    given) over horizons that double until the tail is below ``tol``.
    Partial integrals over doubling horizons are Richardson-extrapolated in
    ``1/T``, which accelerates algebraically decaying tails; for oscillating
    profiles pass the oscillation period so horizons cut full periods.

    Raises:
        NumericError: the tail is not shrinking or the horizon budget ran out.
    """
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    width = float(period) if period else 1.0
    x, w = gauss_jacobi_nodes_weights(nodes, 0.0, 0.0)
    factor = sphere_area(d - 1)

    def chunk(a: float, b: float) -> float:
        edges = np.arange(a, b + 0.5 * width, width)
        left = edges[:-1, None]
        t = left + 0.5 * width * (1 + x)
        vals = np.asarray(f(t.ravel()), dtype=float).reshape(t.shape) * t ** (d - 1)
        return float(0.5 * width * np.sum(vals @ w))

    horizons = [width]
    partial = [chunk(0.0, width)]
    increments = []
    extrap = []
    while True:
        T = horizons[-1]
        if T * 2 > max_horizon:
            raise NumericError("radial integral horizon budget exhausted", estimate=factor * partial[-1])
        partial.append(partial[-1] + chunk(T, 2 * T))
        horizons.append(2 * T)
        inc = abs(partial[-1] - partial[-2])
        increments.append(inc)
        total = partial[-1]
        if inc <= tol * abs(total) or (inc == 0 and total == 0):
            return factor * total
        tail = partial[-5:]
        h = [1 / v for v in horizons[-len(tail):]]
        extrap.append(_neville_at_zero(h, tail))
        if len(extrap) >= 3 and abs(extrap[-1] - extrap[-2]) <= tol * abs(extrap[-1]):
            if abs(extrap[-2] - extrap[-3]) <= 10 * tol * abs(extrap[-1]):
                return factor * extrap[-1]
        if len(increments) >= 4 and all(
            increments[-k] >= 0.9 * increments[-k - 1] for k in (1, 2)
        ) and increments[-1] > tol * abs(total):
            raise NumericError("integrand tail is not decaying", estimate=factor * total)


def _neville_at_zero(h, values) -> float:
    """Value at ``h = 0`` of the interpolating polynomial through ``(h_i, values_i)``."""
    h = list(h)
    p = list(values)
    n = len(p)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            p[i] = p[i] + (p[i] - p[i - 1]) * h[i] / (h[i - j] - h[i])
    return p[-1]
