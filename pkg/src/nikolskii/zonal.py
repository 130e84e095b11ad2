"""Numerical sharp constants ``C(n, d, p, inf)`` through zonal polynomials.

The sup-norm constant is attained by zonal polynomials, so

    C(n, d, p, inf) = sup P(1) / (omega_(d-1) int |P(t)|^p (1-t^2)^((d-2)/2) dt)^(1/p)

over real algebraic P of degree <= n. We fix ``P(1) = 1`` and minimize the
integral ``F``. Coordinates are taken in the orthonormal Gegenbauer basis of
the zonal weight, which makes ``p = 2`` diagonal. Integrals of ``|P|^p`` and
its derivatives use Gauss-Jacobi panels split at the real zeros of P, with
the algebraic endpoint behaviour at each zero built into the panel weight,
so no smoothing of ``|u|^p`` is needed:

* ``p >= 1``: the problem is convex; damped Newton on the constraint
  surface with the exact Hessian (for ``p = 1`` the Hessian is a sum of
  point masses at the zeros).
* ``0 < p < 1``: nonconvex; BFGS from several seeds, one of which is the
  ``p = 1`` optimum. Results are lower bounds only.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .constants import ConstantEstimate, NikolskiiProblem
from .errors import DomainError
from .quadrature import lp_norm_weighted, panel_rule, real_roots, sphere_area
from .special import JacobiBasis, PolyCoeffs, jacobi_table

__all__ = ["OptimizeOptions", "ZonalObjective", "optimize_zonal_constant", "zonal_ratio"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptimizeOptions:
    """Controls for :func:`optimize_zonal_constant`.

    Attributes:
        grad_tol: stop once the projected gradient of ``log F`` (divided by p)
            has Euclidean norm below this.
        max_iter: Newton / BFGS iteration cap per start.
        starts: number of seeds tried when ``p < 1``.
        seed: RNG seed for the perturbed seeds.
        norm_tol: relative tolerance of the final L^p norm evaluation.
    """

    grad_tol: float = 1e-9
    max_iter: int = 200
    starts: int = 4
    seed: int = 0
    norm_tol: float = 1e-12


def _sq_norms(n: int, a: float) -> np.ndarray:
    # int P_k^(a,a)(t)^2 (1-t^2)^a dt for k = 0..n
    k = np.arange(n + 1, dtype=float)
    out = np.empty(n + 1)
    out[0] = JacobiBasis(a, a).mass()
    if n:
        kk = k[1:]
        out[1:] = np.exp(
            (2 * a + 1) * math.log(2)
            + 2 * np.array([math.lgamma(v + a + 1) for v in kk])
            - np.log(2 * kk + 2 * a + 1)
            - np.array([math.lgamma(v + 1) for v in kk])
            - np.array([math.lgamma(v + 2 * a + 1) for v in kk])
        )
    return out


class ZonalObjective:
    """``F(c) = omega_(d-1) int |sum_k c_k phi_k|^p w`` and its derivatives.

    ``phi_k`` is the Jacobi polynomial ``P_k^((d-2)/2, (d-2)/2)`` scaled to
    unit norm in ``L^2(S^d)`` (as a zonal function).
    """

    def __init__(self, n: int, d: int, p: float, *, level: int = 0):
        self.n, self.d, self.p, self.level = n, d, p, level
        self.basis = JacobiBasis.zonal(d)
        self.omega = sphere_area(d - 1)
        self.scale = 1 / np.sqrt(self.omega * _sq_norms(n, self.basis.alpha))
        self.at_one = jacobi_table(n, self.basis, 1.0) * self.scale

    def poly(self, c) -> PolyCoeffs:
        return PolyCoeffs(self.basis, np.asarray(c) * self.scale)

    def table(self, t) -> np.ndarray:
        return jacobi_table(self.n, self.basis, t) * self.scale[:, None]

    def _rule(self, roots, expo):
        breaks = np.concatenate(([-1.0], roots, [1.0]))
        exps = np.concatenate(([self.basis.beta], np.full(roots.size, expo), [self.basis.alpha]))
        t, w, s = panel_rule(breaks, exps, self.basis, level=self.level)
        return t, self.omega * w / s

    def evaluate(self, c, order: int = 0):
        """Return ``F`` (order 0), ``(F, grad)`` (1) or ``(F, grad, hess)`` (2)."""
        p = self.p
        poly = self.poly(c)
        roots = real_roots(poly) if self.n else np.empty(0)
        t, weight = self._rule(roots, p)
        vals = poly(t)
        F = float(np.dot(weight, np.abs(vals) ** p))
        if order == 0:
            return F
        t, weight = self._rule(roots, p - 1)
        phi = self.table(t)
        vals = poly(t)
        grad = p * phi @ (weight * np.abs(vals) ** (p - 1) * np.sign(vals))
        if order == 1:
            return F, grad
        if p == 1:
            phi_r = self.table(roots)
            slope = np.abs(poly.derivative(roots))
            dens = 2 * self.omega * self.basis.weight(roots) / slope
            hess = (phi_r * dens) @ phi_r.T
        elif p > 1:
            t, weight = self._rule(roots, p - 2)
            phi = self.table(t)
            vals = poly(t)
            hess = p * (p - 1) * (phi * (weight * np.abs(vals) ** (p - 2))) @ phi.T
        else:
            raise DomainError("the Hessian of F is not integrable for p < 1")
        return F, grad, hess


def zonal_ratio(poly: PolyCoeffs, d: int, p: float, tol: float = 1e-12) -> float:
    """``P(1) / ||P(x . e)||_(L^p(S^d))`` for a zonal polynomial P."""
    norm = lp_norm_weighted(poly, p, JacobiBasis.zonal(d), tol)
    return float(poly(1.0)) / norm


def _null_space(a: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(a.reshape(-1, 1), mode="complete")
    return q[:, 1:]


def _newton(obj: ZonalObjective, c, Z, opts: OptimizeOptions):
    """Levenberg-damped Newton iteration on the affine set ``P(1) = 1``."""
    p = obj.p
    it = 0
    gn = math.inf
    converged = False
    mu = 0.0
    for it in range(1, opts.max_iter + 1):
        F, g, H = obj.evaluate(c, 2)
        gr = Z.T @ g
        gn = float(np.linalg.norm(gr) / (p * F))
        if gn <= opts.grad_tol:
            converged = True
            break
        Hr = Z.T @ H @ Z
        m = Hr.shape[0]
        floor = 1e-14 * max(np.trace(Hr) / m, F)
        accepted = False
        for _ in range(60):
            try:
                L = np.linalg.cholesky(Hr + mu * np.eye(m))
            except np.linalg.LinAlgError:
                mu = max(10 * mu, floor)
                continue
            step = Z @ -np.linalg.solve(L.T, np.linalg.solve(L, gr))
            if gn < 1e-5:
                # near the optimum the decrease in F drops below rounding;
                # judge the step by the gradient instead
                F_new, g_new = obj.evaluate(c + step, 1)
                ok = np.linalg.norm(Z.T @ g_new) / (p * F_new) < gn and F_new <= F * (1 + 1e-13)
            else:
                F_new = obj.evaluate(c + step)
                ok = F_new <= F + 1e-4 * float(g @ step)
            if ok:
                accepted = True
                c = c + step
                mu = mu / 10 if mu > 10 * floor else 0.0
                break
            mu = max(10 * mu, floor * 1e6)
        if not accepted:
            log.debug("damped Newton stalled at iteration %d (grad %.3g)", it, gn)
            break
    return c, it, gn, converged


def _bfgs(obj: ZonalObjective, c0, Z, opts: OptimizeOptions):
    p = obj.p

    def fun(y):
        F, g = obj.evaluate(c0 + Z @ y, 1)
        return math.log(F), (Z.T @ g) / F

    res = optimize.minimize(
        fun,
        np.zeros(Z.shape[1]),
        jac=True,
        method="BFGS",
        options={"gtol": opts.grad_tol * p, "maxiter": opts.max_iter},
    )
    c = c0 + Z @ res.x
    F, g = obj.evaluate(c, 1)
    gn = float(np.linalg.norm(Z.T @ g) / (p * F))
    return c, int(res.nit), gn, gn <= opts.grad_tol


def _solve(n: int, d: int, p: float, opts: OptimizeOptions, start=None):
    obj = ZonalObjective(n, d, p)
    a = obj.at_one
    if n == 0:
        return obj, np.array([1 / a[0]]), 0, 0.0, True
    Z = _null_space(a)
    c = np.zeros(n + 1)
    c[0] = 1 / a[0]
    if start is not None:
        c = np.asarray(start, dtype=float)
        c = c / float(a @ c)
    if p >= 1:
        c, it, gn, ok = _newton(obj, c, Z, opts)
        return obj, c, it, gn, ok
    c, it, gn, ok = _bfgs(obj, c, Z, opts)
    return obj, c, it, gn, ok


def optimize_zonal_constant(n: int, d: int, p: float, opts: OptimizeOptions | None = None) -> ConstantEstimate:
    """Lower bound for ``C(n, d, p, inf)`` from an optimized zonal polynomial.

    The certificate is the optimizing polynomial in the Jacobi basis
    ``((d-2)/2, (d-2)/2)`` normalized so ``P(1) = 1``. ``meta`` records the
    iteration count, the final projected gradient norm and whether the
    stationarity test passed. A non-converged run still returns its best
    polynomial, with ``meta["converged"] = False``.
    """
    problem = NikolskiiProblem(n, d, p)
    if math.isinf(p):
        raise DomainError("p must be finite")
    opts = opts or OptimizeOptions()
    n, d = int(n), int(d)
    meta: dict = {}
    if p >= 1:
        start = None
        if p != 2 and n:
            _, start, _, _, _ = _solve(n, d, 2.0, opts)
        obj, c, it, gn, ok = _solve(n, d, p, opts, start)
        method = "newton"
    else:
        seeds = []
        if n:
            _, c2, *_ = _solve(n, d, 2.0, opts)
            _, c1, *_ = _solve(n, d, 1.0, opts, c2)
            seeds = [c1, c2]
            rng = np.random.default_rng(opts.seed)
            while len(seeds) < max(opts.starts, 1):
                base = seeds[len(seeds) % 2]
                seeds.append(base + 0.1 * np.abs(base).max() * rng.standard_normal(base.size))
        best = None
        for s in seeds or [None]:
            obj, c, it, gn, ok = _solve(n, d, p, opts, s)
            F = obj.evaluate(c)
            if best is None or F < best[0]:
                best = (F, obj, c, it, gn, ok)
        _, obj, c, it, gn, ok = best
        method = "bfgs-multistart"
        meta["starts"] = len(seeds) or 1
    cert = obj.poly(c)
    cert = cert.scaled(1 / float(cert(1.0)))
    value = zonal_ratio(cert, d, p, opts.norm_tol)
    if not ok:
        log.warning("optimizer stopped before stationarity: n=%d d=%d p=%g grad=%.3g", n, d, p, gn)
    meta.update({"iterations": it, "grad_norm": gn, "converged": bool(ok), "method": method})
    return ConstantEstimate(value, "lower_bound", problem, certificate=cert, meta=meta)
