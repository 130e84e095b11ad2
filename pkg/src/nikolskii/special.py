"""Jacobi, Gegenbauer and normalized Bessel functions.

Everything here works on real arguments and float64 arrays. Polynomial
families are evaluated with their three-term recurrences; the normalized
Bessel function ``j_nu(z) = Gamma(nu+1) (z/2)^(-nu) J_nu(z)`` uses its power
series near the origin and a Gauss-Gegenbauer discretization of Poisson's
integral elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError, NumericError

__all__ = [
    "JacobiBasis",
    "PolyCoeffs",
    "bessel_j_normalized",
    "gauss_jacobi_nodes_weights",
    "gegenbauer_at_one",
    "gegenbauer_eval",
    "gegenbauer_normalized",
    "jacobi_at_one",
    "jacobi_derivative",
    "jacobi_eval",
    "jacobi_normalized",
    "jacobi_table",
    "jacobi_zeros",
    "mehler_heine_check",
]


@dataclass(frozen=True)
class JacobiBasis:
    """Exponents of the Jacobi weight ``(1-t)^alpha (1+t)^beta``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise DomainError(f"Jacobi exponents must exceed -1, got ({self.alpha}, {self.beta})")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))

    @classmethod
    def zonal(cls, d: int) -> "JacobiBasis":
        """Basis orthogonal for the zonal weight ``(1-t^2)^((d-2)/2)`` of S^d."""
        if d < 1:
            raise DomainError(f"sphere dimension must be >= 1, got {d}")
        return cls((d - 2) / 2, (d - 2) / 2)

    @property
    def sphere_dim(self) -> int | None:
        """The d with ``alpha == beta == (d-2)/2``, or None if not zonal."""
        d = 2 * self.alpha + 2
        if self.alpha == self.beta and d >= 1 and float(d).is_integer():
            return int(d)
        return None

    def weight(self, t):
        t = np.asarray(t, dtype=float)
        return (1 - t) ** self.alpha * (1 + t) ** self.beta

    def mass(self) -> float:
        """Total mass of the weight on [-1, 1]."""
        a, b = self.alpha, self.beta
        return math.exp(
            (a + b + 1) * math.log(2) + math.lgamma(a + 1) + math.lgamma(b + 1) - math.lgamma(a + b + 2)
        )


def _check_degree(n):
    if int(n) != n or n < 0:
        raise DomainError(f"degree must be a nonnegative integer, got {n}")
    return int(n)


def jacobi_table(n: int, basis: JacobiBasis, t) -> np.ndarray:
    """Values of ``P_0 .. P_n`` at ``t``; shape ``(n + 1, *t.shape)``."""
    n = _check_degree(n)
    a, b = basis.alpha, basis.beta
    t = np.asarray(t, dtype=float)
    out = np.empty((n + 1,) + t.shape)
    out[0] = 1.0
    if n == 0:
        return out
    out[1] = (a + 1) + (a + b + 2) * (t - 1) / 2
    ab = a + b
    for k in range(2, n + 1):
        c = 2 * k + ab
        a1 = 2 * k * (k + ab) * (c - 2)
        a2 = (c - 1) * (c * (c - 2) * t + a * a - b * b)
        a3 = 2 * (k + a - 1) * (k + b - 1) * c
        out[k] = (a2 * out[k - 1] - a3 * out[k - 2]) / a1
    return out


def jacobi_eval(n: int, basis: JacobiBasis, t):
    """Jacobi polynomial ``P_n^(alpha, beta)(t)``."""
    return jacobi_table(n, basis, t)[-1]


def jacobi_at_one(n: int, basis: JacobiBasis) -> float:
    """``P_n^(alpha, beta)(1) = binom(n + alpha, n)``."""
    n = _check_degree(n)
    val = 1.0
    for k in range(1, n + 1):
        val *= (k + basis.alpha) / k
    return val


def _at_one_vector(n: int, alpha: float) -> np.ndarray:
    k = np.arange(1, n + 1)
    return np.concatenate(([1.0], np.cumprod((k + alpha) / k)))


def jacobi_normalized(n: int, basis: JacobiBasis, t, *, table: bool = False):
    """Normalized Jacobi ``R_n = P_n / P_n(1)``; ``table=True`` returns ``R_0 .. R_n``."""
    tab = jacobi_table(n, basis, t)
    scale = _at_one_vector(int(n), basis.alpha).reshape((-1,) + (1,) * (tab.ndim - 1))
    tab = tab / scale
    return tab if table else tab[-1]


def jacobi_derivative(n: int, basis: JacobiBasis, t):
    """Derivative of ``P_n^(alpha, beta)`` at ``t``."""
    n = _check_degree(n)
    t = np.asarray(t, dtype=float)
    if n == 0:
        return np.zeros_like(t)
    shifted = JacobiBasis(basis.alpha + 1, basis.beta + 1)
    return 0.5 * (n + basis.alpha + basis.beta + 1) * jacobi_eval(n - 1, shifted, t)


def gegenbauer_eval(k: int, lam: float, t):
    """Gegenbauer polynomial ``C_k^lam(t)`` for ``lam > 0``.

    ``C_k^0`` vanishes identically for k >= 1; use :func:`gegenbauer_normalized`
    for the Chebyshev limit at ``lam = 0``.
    """
    k = _check_degree(k)
    if not lam > 0:
        raise DomainError(f"Gegenbauer index must be positive, got {lam}")
    t = np.asarray(t, dtype=float)
    prev = np.ones_like(t)
    if k == 0:
        return prev
    cur = 2 * lam * t
    for j in range(2, k + 1):
        prev, cur = cur, (2 * (j + lam - 1) * t * cur - (j + 2 * lam - 2) * prev) / j
    return cur


def gegenbauer_at_one(k: int, lam: float) -> float:
    """``C_k^lam(1) = Gamma(k + 2 lam) / (Gamma(k + 1) Gamma(2 lam))``."""
    k = _check_degree(k)
    return math.exp(math.lgamma(k + 2 * lam) - math.lgamma(k + 1) - math.lgamma(2 * lam))


def gegenbauer_normalized(k: int, lam: float, t, *, table: bool = False):
    """``C_k^lam(t) / C_k^lam(1)``, equal to ``R_k^(lam-1/2, lam-1/2)(t)``.

    Defined for ``lam >= 0``; at ``lam = 0`` this is the Chebyshev polynomial
    ``cos(k arccos t)``.
    """
    if lam < 0:
        raise DomainError(f"Gegenbauer index must be nonnegative, got {lam}")
    return jacobi_normalized(k, JacobiBasis(lam - 0.5, lam - 0.5), t, table=table)


@lru_cache(maxsize=256)
def _golub_welsch(n: int, a: float, b: float) -> np.ndarray:
    k = np.arange(n, dtype=float)
    ab = a + b
    diag = np.empty(n)
    with np.errstate(invalid="ignore", divide="ignore"):
        diag[:] = (b * b - a * a) / ((2 * k + ab) * (2 * k + ab + 2))
    diag[0] = (b - a) / (ab + 2)
    k = np.arange(1, n, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        off2 = 4 * k * (k + a) * (k + b) * (k + ab) / ((2 * k + ab) ** 2 * (2 * k + ab + 1) * (2 * k + ab - 1))
    if n > 1:
        off2[0] = 4 * (1 + a) * (1 + b) / ((2 + ab) ** 2 * (3 + ab))
    return eigh_tridiagonal(diag, np.sqrt(off2), eigvals_only=True)


def jacobi_zeros(n: int, basis: JacobiBasis, *, tol: float = 1e-14, maxiter: int = 100) -> np.ndarray:
    """Zeros of ``P_n^(alpha, beta)`` in increasing order.

    Seeds come from the eigenvalues of the Jacobi matrix; each is polished by
    Newton's method on the recurrence, falling back to bisection whenever a
    step leaves the bracket between neighbouring seeds.

    Raises:
        NumericError: a zero failed to converge; ``index`` names it.
    """
    n = _check_degree(n)
    if n < 1:
        raise DomainError("jacobi_zeros needs n >= 1")
    seeds = np.sort(_golub_welsch(n, basis.alpha, basis.beta))
    mids = 0.5 * (seeds[1:] + seeds[:-1])
    lo = np.concatenate(([-1.0], mids))
    hi = np.concatenate((mids, [1.0]))
    x = seeds.copy()
    f_lo = jacobi_eval(n, basis, lo)
    scale = max(abs(jacobi_at_one(n, basis)), abs(jacobi_at_one(n, JacobiBasis(basis.beta, basis.alpha))), 1.0)
    done = np.zeros(n, dtype=bool)
    for _ in range(maxiter):
        f = jacobi_eval(n, basis, x)
        df = jacobi_derivative(n, basis, x)
        # shrink brackets using the sign of f
        same = np.sign(f) == np.sign(f_lo)
        lo = np.where(same, x, lo)
        f_lo = np.where(same, f, f_lo)
        hi = np.where(same, hi, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = f / df
        newton = x - step
        bad = ~np.isfinite(newton) | (newton <= lo) | (newton >= hi)
        new = np.where(bad, 0.5 * (lo + hi), newton)
        conv = (np.abs(f) <= tol * scale) | (np.abs(new - x) <= 4 * np.finfo(float).eps * np.maximum(np.abs(x), 1e-300))
        done |= conv
        x = np.where(done, x, new)
        if done.all():
            break
    else:
        idx = int(np.flatnonzero(~done)[0])
        raise NumericError(f"zero {idx} of P_{n} did not converge", estimate=float(x[idx]), index=idx)
    return np.sort(x)


@lru_cache(maxsize=256)
def _gauss_jacobi_cached(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    basis = JacobiBasis(a, b)
    x = jacobi_zeros(n, basis)
    logc = (
        (a + b + 1) * math.log(2)
        + math.lgamma(n + a + 1)
        + math.lgamma(n + b + 1)
        - math.lgamma(n + a + b + 1)
        - math.lgamma(n + 1)
    )
    dp = jacobi_derivative(n, basis, x)
    w = math.exp(logc) / ((1 - x) * (1 + x) * dp * dp)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_jacobi_nodes_weights(n: int, alpha: float, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss rule for ``(1-t)^alpha (1+t)^beta``.

    The returned arrays are cached and read-only.
    """
    if n < 1:
        raise DomainError("a Gauss rule needs at least one node")
    return _gauss_jacobi_cached(int(n), float(alpha), float(beta))


_SERIES_CUTOFF = 4.0


def _poisson_nodes(z_max: float) -> int:
    m = int(math.ceil(0.5 * z_max + 2.5 * z_max ** (1 / 3) + 20))
    # bucket to powers of two so rules are reused
    return 1 << max(5, (m - 1).bit_length())


@lru_cache(maxsize=64)
def _poisson_rule(order: float, m: int):
    s, w = gauss_jacobi_nodes_weights(m, order - 0.5, order - 0.5)
    return s, w / w.sum()


def bessel_j_normalized(order: float, z):
    """Normalized Bessel function ``j_order(z)`` with ``j_order(0) = 1``.

    Args:
        order: ``nu >= -1/2``.
        z: nonnegative real argument(s).
    """
    if order < -0.5:
        raise DomainError(f"Bessel order must be >= -1/2, got {order}")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise DomainError("bessel_j_normalized needs z >= 0")
    if order == -0.5:
        return np.cos(z)
    flat = z.ravel()
    out = np.empty_like(flat)
    small = flat <= _SERIES_CUTOFF
    if small.any():
        zs = flat[small]
        q = -0.25 * zs * zs
        term = np.ones_like(zs)
        acc = term.copy()
        for k in range(1, 40):
            term = term * q / (k * (order + k))
            acc += term
        out[small] = acc
    big = np.flatnonzero(~small)
    if big.size:
        zb = flat[big]
        m_need = np.array([_poisson_nodes(v) for v in zb])
        for m in np.unique(m_need):
            sel = big[m_need == m]
            s, w = _poisson_rule(float(order), int(m))
            for chunk in np.array_split(sel, max(1, sel.size * m // 4_000_000 + 1)):
                out[chunk] = np.cos(np.multiply.outer(flat[chunk], s)) @ w
    return out.reshape(z.shape)


def mehler_heine_check(k: int, mu: float, z: float) -> float:
    """Residual ``|C_k^mu(cos(z/k)) / C_k^mu(1) - j_(mu-1/2)(z)|``."""
    if k < 1:
        raise DomainError("mehler_heine_check needs k >= 1")
    lhs = gegenbauer_normalized(k, mu, math.cos(z / k))
    return float(abs(lhs - bessel_j_normalized(mu - 0.5, abs(z))))


@dataclass(frozen=True)
class PolyCoeffs:
    """Polynomial ``sum_k coeffs[k] * P_k^(alpha, beta)`` in a Jacobi basis.

    The degree is an upper bound; trailing coefficients may vanish.
    """

    basis: JacobiBasis
    coeffs: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(v) for v in np.atleast_1d(np.asarray(self.coeffs, dtype=float)))
        if not c:
            raise DomainError("PolyCoeffs needs at least one coefficient")
        if not all(math.isfinite(v) for v in c):
            raise DomainError("PolyCoeffs entries must be finite")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t):
        tab = jacobi_table(self.degree, self.basis, t)
        return np.tensordot(np.asarray(self.coeffs), tab, axes=1)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        if self.degree == 0:
            return np.zeros_like(t)
        a, b = self.basis.alpha, self.basis.beta
        tab = jacobi_table(self.degree - 1, JacobiBasis(a + 1, b + 1), t)
        k = np.arange(1, self.degree + 1)
        c = np.asarray(self.coeffs[1:]) * 0.5 * (k + a + b + 1)
        return np.tensordot(c, tab, axes=1)

    def scaled(self, factor: float) -> "PolyCoeffs":
        return PolyCoeffs(self.basis, tuple(factor * c for c in self.coeffs))

    def to_dict(self) -> dict:
        return {"alpha": self.basis.alpha, "beta": self.basis.beta, "coeffs": list(self.coeffs)}

    @classmethod
    def from_dict(cls, data: dict) -> "PolyCoeffs":
        return cls(JacobiBasis(data["alpha"], data["beta"]), tuple(data["coeffs"]))
