"""Closed-form Nikolskii constants and the result types they are reported in."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import DomainError, NumericError
from .quadrature import gauss_jacobi, radial_integral, sphere_area
from .special import JacobiBasis, PolyCoeffs, bessel_j_normalized, jacobi_at_one

__all__ = [
    "ConstantEstimate",
    "NikolskiiProblem",
    "dim_harmonics",
    "dim_pi",
    "entire_extremal_ratio",
    "exact_constant_nonneg",
    "exact_constant_p2",
    "limit_constant_nonneg",
    "limit_constant_p2",
    "logconvexity_bound",
    "markov_rho0",
    "optimize_nonneg_constant",
    "reproducing_density",
    "sphere_area",
    "upper_bound_lowp",
]

KINDS = ("exact", "lower_bound", "upper_bound", "extrapolated")

# exact factorial arithmetic budget for dim_pi
MAX_FACTORIAL_ARG = 2000


@dataclass(frozen=True)
class NikolskiiProblem:
    """Instance ``(n, d, p, q)``; ``n`` is None for limit constants."""

    n: int | None
    d: int
    p: float
    q: float = math.inf

    def __post_init__(self):
        if self.n is not None and (int(self.n) != self.n or self.n < 0):
            raise DomainError(f"degree must be a nonnegative integer, got {self.n}")
        if int(self.d) != self.d or self.d < 1:
            raise DomainError(f"sphere dimension must be a positive integer, got {self.d}")
        if not (0 < self.p < self.q):
            raise DomainError(f"need 0 < p < q <= inf, got p={self.p}, q={self.q}")

    def to_dict(self) -> dict:
        return {"n": self.n, "d": self.d, "p": self.p, "q": _json_float(self.q)}


def _json_float(x):
    if x is None:
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


@dataclass(frozen=True)
class ConstantEstimate:
    """A value of ``C(n, d, p, q)`` or ``L(d, p, q)`` with its provenance.

    ``kind`` is one of ``exact``, ``lower_bound``, ``upper_bound`` or
    ``extrapolated``. Exact values name their closed form in ``formula``;
    lower bounds from optimization carry the witness polynomial.
    """

    value: float
    kind: str
    problem: NikolskiiProblem | None = None
    certificate: PolyCoeffs | None = None
    err: float | None = None
    formula: str | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown estimate kind {self.kind!r}")
        if self.kind == "exact" and not self.formula:
            raise DomainError("exact estimates must name their formula")

    def to_dict(self) -> dict:
        meta = {k: _json_float(v) if isinstance(v, float) else v for k, v in self.meta.items()}
        return {
            "problem": self.problem.to_dict() if self.problem else None,
            "kind": self.kind,
            "value": _json_float(self.value),
            "err": _json_float(self.err),
            "formula": self.formula,
            "certificate": self.certificate.to_dict() if self.certificate else None,
            "meta": meta,
        }


def _check_nd(n, d):
    if int(n) != n or n < 0:
        raise DomainError(f"degree must be a nonnegative integer, got {n}")
    if int(d) != d or d < 1:
        raise DomainError(f"sphere dimension must be a positive integer, got {d}")
    return int(n), int(d)


def dim_pi(n: int, d: int) -> int:
    """Dimension of the spherical polynomials of degree <= n on S^d."""
    n, d = _check_nd(n, d)
    if n + d > MAX_FACTORIAL_ARG:
        raise OverflowError(f"n + d = {n + d} exceeds the exact-arithmetic budget {MAX_FACTORIAL_ARG}")
    num = (2 * n + d) * math.factorial(n + d - 1)
    den = math.factorial(n) * math.factorial(d)
    q, r = divmod(num, den)
    assert r == 0
    return q


def dim_harmonics(k: int, d: int) -> int:
    """Dimension of the degree-k spherical harmonics on S^d."""
    k, d = _check_nd(k, d)
    return dim_pi(k, d) - (dim_pi(k - 1, d) if k else 0)


def reproducing_density(n: int, d: int) -> float:
    """``d_n = dim Pi_n^d / omega_d``, the reproducing kernel at t = 1."""
    return dim_pi(n, d) / sphere_area(d)


def exact_constant_p2(n: int, d: int) -> ConstantEstimate:
    """``C(n, d, 2, inf) = sqrt(d_n)``."""
    return ConstantEstimate(
        math.sqrt(reproducing_density(n, d)),
        "exact",
        NikolskiiProblem(n, d, 2.0),
        formula="sqrt(dim Pi_n^d / omega_d)",
    )


def upper_bound_lowp(n: int, d: int, p: float, q: float = math.inf) -> ConstantEstimate:
    """``d_n^(1/p - 1/q)``, an upper bound for ``C(n, d, p, q)`` when ``p <= 2``."""
    if not (0 < p <= 2 and p < q):
        raise DomainError(f"upper_bound_lowp needs 0 < p <= 2 and p < q, got p={p}, q={q}")
    expo = 1 / p - (0.0 if math.isinf(q) else 1 / q)
    return ConstantEstimate(
        reproducing_density(n, d) ** expo,
        "upper_bound",
        NikolskiiProblem(n, d, p, q),
        formula="d_n^(1/p-1/q)",
    )


def exact_constant_nonneg(n: int, d: int) -> ConstantEstimate:
    """Sharp ``sup ||P||_inf / ||P||_1`` over nonnegative ``P`` of degree <= n on S^d."""
    n, d = _check_nd(n, d)
    k, odd = divmod(n, 2)
    if odd:
        count = 2 * math.comb(d + k, d)
        formula = "2 binom(d+k, d) / omega_d, n = 2k+1"
    else:
        num = (2 * k + d) * math.factorial(k + d - 1)
        count = num / (math.factorial(k) * math.factorial(d))
        formula = "(2k+d)(k+d-1)! / (k! d! omega_d), n = 2k"
    return ConstantEstimate(
        count / sphere_area(d),
        "exact",
        NikolskiiProblem(n, d, 1.0),
        formula=formula,
        meta={"nonnegative": True},
    )


def limit_constant_nonneg(d: int) -> ConstantEstimate:
    """Limit of the nonnegative constant over ``n^d``: ``1 / ((4 sqrt(pi))^d Gamma(d/2 + 1))``."""
    _check_nd(0, d)
    val = 1 / ((4 * math.sqrt(math.pi)) ** d * math.gamma(d / 2 + 1))
    return ConstantEstimate(
        val,
        "exact",
        NikolskiiProblem(None, d, 1.0),
        formula="1/((4 sqrt(pi))^d Gamma(d/2+1))",
        meta={"nonnegative": True},
    )


def limit_constant_p2(d: int) -> ConstantEstimate:
    """``L(d, 2, inf) = (2 / (omega_d Gamma(d + 1)))^(1/2)``."""
    _check_nd(0, d)
    val = math.sqrt(2 / (sphere_area(d) * math.gamma(d + 1)))
    return ConstantEstimate(val, "exact", NikolskiiProblem(None, d, 2.0), formula="sqrt(2/(omega_d d!))")


def markov_rho0(alpha: float, tau: float) -> float:
    """Weight at the origin of the Markov-type quadrature for even entire functions.

    ``rho_0 = 2^(2 alpha) Gamma(alpha+1)^2 (2 alpha + 2) / tau^(2 alpha + 2)``
    for functions of exponential type ``2 tau`` integrated against
    ``t^(2 alpha + 1)`` on the half-line.
    """
    if alpha < -0.5 or not tau > 0:
        raise DomainError(f"markov_rho0 needs alpha >= -1/2 and tau > 0, got ({alpha}, {tau})")
    return 2 ** (2 * alpha) * math.gamma(alpha + 1) ** 2 * (2 * alpha + 2) / tau ** (2 * alpha + 2)


def entire_extremal_ratio(d: int, tol: float = 1e-8) -> ConstantEstimate:
    """``f(0) / ||f||_1`` for ``f(x) = j_(d/2)(|x|/2)^2`` on R^d.

    The L^1 norm is computed by radial quadrature and must match the closed
    form ``2^(d-1) d! omega_d`` to ``tol`` (relative); the numeric ratio is
    returned as a lower bound for the nonnegative entire-function constant.
    """
    _check_nd(0, d)

    def profile(t):
        return bessel_j_normalized(d / 2, np.asarray(t) / 2) ** 2

    norm = radial_integral(profile, d, tol=min(tol, 1e-9) / 10, period=2 * math.pi)
    closed = 2 ** (d - 1) * math.factorial(d) * sphere_area(d)
    gap = abs(norm - closed) / closed
    if gap > tol:
        raise NumericError(f"radial L1 norm {norm!r} misses closed form {closed!r} by {gap:.3g}", estimate=norm)
    return ConstantEstimate(
        1 / norm,
        "lower_bound",
        NikolskiiProblem(None, d, 1.0),
        err=abs(1 / norm - 1 / closed),
        meta={"l1_norm": norm, "l1_norm_closed_form": closed, "nonnegative": True},
    )


def optimize_nonneg_constant(k: int, d: int, tol: float = 1e-10) -> ConstantEstimate:
    """Ratio of the extremal nonnegative candidate ``R_k^(d/2, (d-2)/2)(x . e)^2``.

    Its L^1(S^d) norm is computed by Gauss quadrature for the zonal weight and
    checked against ``omega_d / dim Pi_k^d``. The certificate is the square
    root ``R_k``; ``meta["certificate_power"] == 2``.
    """
    k, d = _check_nd(k, d)
    basis = JacobiBasis(d / 2, (d - 2) / 2)
    zonal = JacobiBasis.zonal(d)
    rule = gauss_jacobi(k + 1, zonal)
    coeffs = np.zeros(k + 1)
    coeffs[k] = 1 / jacobi_at_one(k, basis)
    root = PolyCoeffs(basis, coeffs)
    norm1 = sphere_area(d - 1) * rule.integrate(lambda t: root(t) ** 2)
    value = 1 / norm1
    closed = exact_constant_nonneg(2 * k, d).value
    if abs(value - closed) > tol * closed:
        raise NumericError(f"nonnegative extremal ratio {value!r} misses {closed!r}", estimate=value)
    return ConstantEstimate(
        value,
        "lower_bound",
        NikolskiiProblem(2 * k, d, 1.0),
        certificate=root,
        err=abs(value - closed),
        meta={"certificate_power": 2, "l1_norm": norm1, "nonnegative": True},
    )


def logconvexity_bound(
    n: int,
    d: int,
    p: float,
    q: float,
    q1: float = math.inf,
    c_q1: ConstantEstimate | float | None = None,
) -> ConstantEstimate:
    """Upper bound ``C(n,d,p,q) <= C(n,d,p,q1)^((1/p-1/q)/(1/p-1/q1))``.

    ``c_q1`` supplies an estimate of ``C(n, d, p, q1)``. When omitted, the
    exact value is used at ``p = 2, q1 = inf`` and the ``d_n`` bound for
    ``p <= 2``.
    """
    if not (0 < p < q < q1):
        raise DomainError(f"need 0 < p < q < q1, got ({p}, {q}, {q1})")
    inv = lambda r: 0.0 if math.isinf(r) else 1 / r  # noqa: E731
    expo = (1 / p - inv(q)) / (1 / p - inv(q1))
    if c_q1 is None:
        if p == 2 and math.isinf(q1):
            c_q1 = exact_constant_p2(n, d)
        elif p <= 2:
            c_q1 = upper_bound_lowp(n, d, p, q1)
        else:
            raise DomainError("no built-in estimate of C(n, d, p, q1); pass c_q1")
    # an optimizer lower bound for C(n,d,p,q1) is accepted; meta records it
    input_kind = c_q1.kind if isinstance(c_q1, ConstantEstimate) else "value"
    base = c_q1.value if isinstance(c_q1, ConstantEstimate) else float(c_q1)
    return ConstantEstimate(
        base ** expo,
        "upper_bound",
        NikolskiiProblem(n, d, p, q),
        formula="C(n,d,p,q1)^((1/p-1/q)/(1/p-1/q1))",
        meta={"q1": _json_float(q1), "exponent": expo, "input_kind": input_kind},
    )
