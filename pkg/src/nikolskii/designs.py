"""Point sets on S^d: design exactness, separation, covering, and sampling norms."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import qmc

from .errors import DomainError
from .kernel import SpherePoint, sphere_rule
from .quadrature import sphere_area
from .special import JacobiBasis, gegenbauer_normalized, jacobi_zeros

__all__ = [
    "DesignReport",
    "NodeFileError",
    "NodeSet",
    "PreconditionError",
    "covering_radius_bound",
    "design_moments",
    "mz_ratio",
    "read_nodes",
    "separation_and_mesh",
    "verify_design",
    "write_nodes",
]

DESIGN_TOL = 1e-10


class NodeFileError(DomainError):
    """Malformed node-set file; ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: int):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class PreconditionError(DomainError):
    pass


@dataclass(frozen=True)
class NodeSet:
    """N points on S^d, stored as an ``(N, d+1)`` array, with optional weights."""

    points: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, ndmin=2)
        if pts.shape[1] < 2:
            raise DomainError("points need at least two coordinates")
        if np.any(np.abs(np.linalg.norm(pts, axis=1) - 1) > 1e-10):
            raise DomainError("every point must have unit norm within 1e-10")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.weights is not None:
            w = np.array(self.weights, dtype=float).ravel()
            if w.shape != (pts.shape[0],):
                raise DomainError("one weight per point is required")
            if np.any(w <= 0):
                raise DomainError("weights must be positive")
            w.setflags(write=False)
            object.__setattr__(self, "weights", w)

    @property
    def d(self) -> int:
        return self.points.shape[1] - 1

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def sphere_points(self) -> list[SpherePoint]:
        return [SpherePoint(tuple(p)) for p in self.points]

    def effective_weights(self) -> np.ndarray:
        """Cubature weights; uniform ``omega_d / N`` when none were given."""
        if self.weights is None:
            return np.full(self.size, sphere_area(self.d) / self.size)
        return np.asarray(self.weights)

    def rotated(self, q: np.ndarray) -> "NodeSet":
        return NodeSet(self.points @ np.asarray(q).T, self.weights)


@dataclass(frozen=True)
class DesignReport:
    d: int
    size: int
    requested_degree: int
    certified_degree: int
    worst_residual: float
    moments: list = field(default_factory=list)
    tol: float = DESIGN_TOL
    separation: float | None = None
    mesh_norm: float | None = None
    mesh_norm_kind: str = "estimate"
    mesh_probes: int = 0
    covering_radius_bound: float | None = None
    covering_ok: bool | None = None
    separation_scaled: float | None = None
    mesh_scaled: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def design_moments(nodes: NodeSet, t: int, *, block: int = 256) -> np.ndarray:
    """``m_k = sum_ij w_i w_j R_k(z_i . z_j) / (sum w)^2`` for k = 0..t.

    ``R_k`` is the Gegenbauer polynomial of index (d-1)/2 normalized at 1
    (Chebyshev at d = 1), so ``m_0 = 1`` and ``m_k >= 0``.
    """
    if t < 0:
        raise DomainError("t must be nonnegative")
    z = nodes.points
    w = nodes.effective_weights()
    lam = (nodes.d - 1) / 2
    out = np.zeros(t + 1)
    for start in range(0, z.shape[0], block):
        g = np.clip(z[start:start + block] @ z.T, -1.0, 1.0)
        tab = gegenbauer_normalized(t, lam, g, table=True)
        out += np.einsum("kij,i,j->k", tab, w[start:start + block], w)
    return out / w.sum() ** 2


def covering_radius_bound(n: int, d: int) -> float:
    """Angle ``arccos t_n`` with ``t_n`` the largest zero of the covering polynomial.

    ``n = 2k - 1`` uses ``P_k^((d-2)/2, (d-2)/2)``; ``n = 2k`` uses
    ``P_k^((d-2)/2, d/2)``. Any positive cubature of degree n has covering
    radius at most this angle.
    """
    if n < 1 or d < 1:
        raise DomainError("covering_radius_bound needs n >= 1 and d >= 1")
    a = (d - 2) / 2
    k = (n + 1) // 2
    basis = JacobiBasis(a, a) if n % 2 else JacobiBasis(a, d / 2)
    return float(math.acos(jacobi_zeros(k, basis)[-1]))


def _geodesic_from_chord(c):
    return 2 * np.arcsin(np.clip(np.asarray(c) / 2, 0.0, 1.0))


def _probes(d: int, count: int, seed: int) -> np.ndarray:
    # scrambled Sobol points pushed through the Gaussian map onto S^d
    from scipy.special import ndtri

    m = int(math.ceil(math.log2(max(count, 2))))
    u = qmc.Sobol(d + 1, scramble=True, seed=seed).random_base2(m)[:count]
    g = ndtri(np.clip(u, 1e-12, 1 - 1e-12))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _refine_hole(tree: cKDTree, u: np.ndarray, rng: np.random.Generator, step: float) -> tuple[float, np.ndarray]:
    best, _ = tree.query(u)
    while step > 1e-11:
        improved = False
        for _ in range(8 * u.size):
            v = u + step * rng.standard_normal(u.size)
            v /= np.linalg.norm(v)
            dist, _ = tree.query(v)
            if dist > best:
                best, u, improved = dist, v, True
        if not improved:
            step /= 2
    return float(best), u


def separation_and_mesh(
    nodes: NodeSet, *, probes: int = 100_000, refine: int = 16, seed: int = 0
) -> tuple[float, float, int]:
    """Minimum pairwise geodesic distance and an estimate of the mesh norm.

    Separation is exact. The mesh norm ``max_x min_j rho(x, z_j)`` is
    estimated from quasi-random probes, the ``refine`` worst of which are
    polished by a local random search; the estimate never exceeds the true
    value. Returns ``(separation, mesh_norm, probes)``.
    """
    if nodes.size < 2:
        raise DomainError("separation needs at least two points")
    tree = cKDTree(nodes.points)
    chord, _ = tree.query(nodes.points, k=2)
    separation = float(_geodesic_from_chord(chord[:, 1].min()))
    pts = _probes(nodes.d, probes, seed)
    dist, _ = tree.query(pts)
    rng = np.random.default_rng(seed)
    order = np.argsort(dist)[::-1][:refine]
    best = float(dist[order[0]])
    for i in order:
        val, _ = _refine_hole(tree, pts[i], rng, step=0.1)
        best = max(best, val)
    return separation, float(_geodesic_from_chord(best)), int(pts.shape[0])


def verify_design(
    nodes: NodeSet,
    t: int,
    tol: float = DESIGN_TOL,
    *,
    geometry: bool = True,
    probes: int = 100_000,
    seed: int = 0,
) -> DesignReport:
    """Certify the design degree of ``nodes`` up to ``t``.

    ``certified_degree`` is the largest ``s <= t`` with ``|m_k| <= tol`` for
    every ``k = 1..s``. The raw moments are kept so callers can apply a
    different threshold.
    """
    if t < 1:
        raise DomainError("t must be at least 1")
    m = design_moments(nodes, t)[1:]
    certified = 0
    for k, v in enumerate(m, start=1):
        if abs(v) > tol:
            break
        certified = k
    report = dict(
        d=nodes.d,
        size=nodes.size,
        requested_degree=int(t),
        certified_degree=certified,
        worst_residual=float(np.max(np.abs(m))),
        moments=[float(v) for v in m],
        tol=float(tol),
    )
    if geometry and nodes.size >= 2:
        sep, mesh, count = separation_and_mesh(nodes, probes=probes, seed=seed)
        report.update(
            separation=sep,
            mesh_norm=mesh,
            mesh_probes=count,
            separation_scaled=sep * nodes.size ** (1 / nodes.d),
        )
        if certified >= 1:
            bound = covering_radius_bound(certified, nodes.d)
            report.update(
                covering_radius_bound=bound,
                covering_ok=bool(mesh <= bound * (1 + 1e-8)),
                mesh_scaled=mesh * certified,
            )
    return DesignReport(**report)


def _random_zonal_mixture(n: int, d: int, rng: np.random.Generator, terms: int = 3):
    centers = rng.standard_normal((terms, d + 1))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    coef = rng.standard_normal((terms, n + 1))
    lam = (d - 1) / 2

    def f(x):
        out = np.zeros(x.shape[0])
        for y, c in zip(centers, coef):
            tab = gegenbauer_normalized(n, lam, np.clip(x @ y, -1, 1), table=True)
            out += c @ tab
        return out

    return f


def mz_ratio(
    nodes: NodeSet,
    n: int,
    p: float,
    trials: int = 20,
    *,
    seed: int = 0,
    certified_degree: int | None = None,
) -> tuple[float, float]:
    """Extreme ratios ``||f||_(p, nodes) / ||f||_(L^p(S^d))`` over random f in Pi_n^d.

    The test functions are sums of a few random zonal polynomials around
    random centers. The continuous norm uses a product rule of degree
    ``max(2n, 8n) + 8`` (exact for p = 2). Requires the nodes to be a
    design of degree at least 3n.
    """
    if n < 0 or not (0 < p < math.inf):
        raise DomainError("mz_ratio needs n >= 0 and finite p > 0")
    if certified_degree is None:
        certified_degree = verify_design(nodes, max(3 * n, 1), geometry=False).certified_degree
    if certified_degree < 3 * n:
        raise PreconditionError(
            f"nodes certify degree {certified_degree}, but degree >= {3 * n} is required"
        )
    d = nodes.d
    pts, w = sphere_rule(d, 8 * n + 8)
    lam = nodes.effective_weights()
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(trials):
        f = _random_zonal_mixture(n, d, rng)
        disc = np.dot(lam, np.abs(f(nodes.points)) ** p) ** (1 / p)
        cont = np.dot(w, np.abs(f(pts)) ** p) ** (1 / p)
        ratios.append(disc / cont)
    return float(min(ratios)), float(max(ratios))


def read_nodes(path_or_text, *, d: int | None = None) -> NodeSet:
    """Parse the node-set text format.

    One point per line as whitespace-separated coordinates; lines starting
    with ``#`` are comments, except the directive ``#weighted`` which adds a
    trailing weight column to every following point line.
    """
    if isinstance(path_or_text, Path) or (isinstance(path_or_text, str) and "\n" not in path_or_text
                                          and Path(path_or_text).exists()):
        text = Path(path_or_text).read_text()
    else:
        text = str(path_or_text)
    weighted = False
    rows, weights = [], []
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line[1:].strip().lower() == "weighted":
                if rows:
                    raise NodeFileError("#weighted must precede the first point", lineno)
                weighted = True
            continue
        try:
            vals = [float(tok) for tok in line.split()]
        except ValueError:
            raise NodeFileError(f"cannot parse {line!r}", lineno) from None
        if weighted:
            if len(vals) < 3:
                raise NodeFileError("expected coordinates and a weight", lineno)
            vals, wt = vals[:-1], vals[-1]
            if not wt > 0:
                raise NodeFileError("weight must be positive", lineno)
            weights.append(wt)
        if width is None:
            width = len(vals)
            if width < 2 or (d is not None and width != d + 1):
                raise NodeFileError(f"expected {d + 1 if d is not None else 'at least 2'} coordinates, got {width}", lineno)
        elif len(vals) != width:
            raise NodeFileError(f"expected {width} coordinates, got {len(vals)}", lineno)
        if not math.isfinite(sum(vals)) or abs(math.sqrt(sum(v * v for v in vals)) - 1) > 1e-10:
            raise NodeFileError("point is not on the unit sphere", lineno)
        rows.append(vals)
    if not rows:
        raise NodeFileError("no points found", max(1, len(text.splitlines())))
    return NodeSet(np.array(rows), np.array(weights) if weighted else None)


def write_nodes(nodes: NodeSet, path=None) -> str:
    """Serialize ``nodes``; writes to ``path`` when given and returns the text."""
    lines = [f"# {nodes.size} points on S^{nodes.d}"]
    if nodes.weights is not None:
        lines.append("#weighted")
        for p, w in zip(nodes.points, nodes.weights):
            lines.append(" ".join(f"{v:.17g}" for v in (*p, w)))
    else:
        lines.extend(" ".join(f"{v:.17g}" for v in p) for p in nodes.points)
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
