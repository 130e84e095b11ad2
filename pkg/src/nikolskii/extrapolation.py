"""Richardson extrapolation of normalized constants toward their n -> inf limit."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .constants import (
    ConstantEstimate,
    NikolskiiProblem,
    exact_constant_nonneg,
    exact_constant_p2,
)
from .errors import DomainError
from .zonal import OptimizeOptions, optimize_zonal_constant

__all__ = ["estimate_limit", "richardson_tableau"]

SOURCES = ("optimize", "closed_form", "nonneg")


def richardson_tableau(h: Sequence[float], values: Sequence[float], order: int | None = None) -> list[list[float]]:
    """Neville tableau for extrapolation to ``h = 0``.

    Row ``i`` holds ``T[i][0..min(i, order)]`` where column ``j`` is the value
    at 0 of the degree-j polynomial through points ``i-j .. i``. With
    ``values = L + c_1 h + c_2 h^2 + ...`` column j removes the first j error
    terms.
    """
    if len(h) != len(values):
        raise DomainError("h and values must have equal length")
    h = [float(v) for v in h]
    order = len(h) - 1 if order is None else min(order, len(h) - 1)
    rows: list[list[float]] = []
    for i, v in enumerate(values):
        row = [float(v)]
        for j in range(1, min(i, order) + 1):
            prev_row = rows[i - 1]
            t = row[j - 1] + (row[j - 1] - prev_row[j - 1]) * h[i] / (h[i - j] - h[i])
            row.append(t)
        rows.append(row)
    return rows


def _oscillating(s: Sequence[float]) -> bool:
    tail = np.diff(np.asarray(s[-3:], dtype=float))
    return tail.size >= 2 and bool(np.any(np.sign(tail[1:]) != np.sign(tail[:-1])))


def estimate_limit(
    d: int,
    p: float,
    degrees: Sequence[int],
    opts: OptimizeOptions | None = None,
    *,
    source: str = "optimize",
    order: int | None = None,
) -> ConstantEstimate:
    """Extrapolate ``C(n, d, p, inf) / n^(d/p)`` to ``n -> inf``.

    Args:
        d: sphere dimension.
        p: finite exponent; ``source="closed_form"`` needs ``p = 2`` and
            ``source="nonneg"`` (nonnegative polynomials) needs ``p = 1``.
        degrees: strictly increasing degrees, at least three.
        source: where the constants come from: the zonal optimizer or one of
            the two closed forms.
        order: highest Richardson column used (default: all).

    The model is ``s_n = L + c/n + ...``. ``err`` is the gap between the two
    highest Richardson columns of the last row. A non-monotone tail gives
    ``err = inf``, ``value`` = the last raw term and ``meta["oscillating"]``.
    """
    if source not in SOURCES:
        raise DomainError(f"source must be one of {SOURCES}, got {source!r}")
    if not (0 < p < math.inf):
        raise DomainError(f"p must be finite and positive, got {p}")
    degrees = [int(n) for n in degrees]
    if len(degrees) < 3:
        raise DomainError("estimate_limit needs at least three degrees")
    if any(b <= a for a, b in zip(degrees, degrees[1:])) or degrees[0] < 1:
        raise DomainError("degrees must be positive and strictly increasing")
    if source == "closed_form" and p != 2:
        raise DomainError("the closed-form path exists only for p = 2")
    if source == "nonneg" and p != 1:
        raise DomainError("the nonnegative closed form is for p = 1")

    values = []
    for n in degrees:
        if source == "closed_form":
            est = exact_constant_p2(n, d)
        elif source == "nonneg":
            est = exact_constant_nonneg(n, d)
        else:
            est = optimize_zonal_constant(n, d, p, opts)
        values.append(est.value)
    scaled = [v / n ** (d / p) for v, n in zip(values, degrees)]
    rows = richardson_tableau([1 / n for n in degrees], scaled, order)
    last = rows[-1]
    meta = {
        "degrees": degrees,
        "constants": values,
        "sequence": scaled,
        "tableau_last_row": last,
        "source": source,
        "nonnegative": source == "nonneg",
    }
    if _oscillating(scaled):
        meta["oscillating"] = True
        return ConstantEstimate(scaled[-1], "extrapolated", NikolskiiProblem(None, d, p), err=math.inf, meta=meta)
    value = last[-1]
    err = abs(last[-1] - last[-2])
    meta["oscillating"] = False
    return ConstantEstimate(value, "extrapolated", NikolskiiProblem(None, d, p), err=err, meta=meta)
