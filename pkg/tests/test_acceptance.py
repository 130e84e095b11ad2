"""Acceptance criteria, each at its stated tolerance.

Every test appends one PASS/FAIL line; the lines are printed in the
"acceptance criteria" section at the end of the pytest run. Run this file
directly to see only these checks.
"""

import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from nikolskii.cli import main as cli_main
from nikolskii.constants import (
    dim_pi,
    entire_extremal_ratio,
    exact_constant_nonneg,
    exact_constant_p2,
    limit_constant_nonneg,
    limit_constant_p2,
    optimize_nonneg_constant,
)
from nikolskii.designs import NodeSet, mz_ratio, verify_design
from nikolskii.kernel import KernelProfile, K_eta, kernel_G, kernel_G_eta, scaling_limit_residual, sphere_rule
from nikolskii.quadrature import gauss_radau_jacobi, radau_endpoint_weight, sphere_area
from nikolskii.special import JacobiBasis, gegenbauer_normalized
from nikolskii.zonal import optimize_zonal_constant

from _report import criterion


def test_criterion_1_p2_oracle_sweep():
    with criterion("1 p=2 oracle sweep") as info:
        start = time.perf_counter()
        worst = 0.0
        for d in range(1, 5):
            for n in range(21):
                got = optimize_zonal_constant(n, d, 2.0).value
                ref = math.sqrt(dim_pi(n, d) / sphere_area(d))
                worst = max(worst, abs(got - ref) / ref)
        elapsed = time.perf_counter() - start
        info["detail"] = f"max rel err {worst:.2e} (<= 1e-8), {elapsed:.1f} s (<= 120 s)"
        assert worst <= 1e-8
        assert elapsed <= 120


def test_criterion_2_nonneg_closed_form():
    with criterion("2 nonnegative closed form") as info:
        worst = 0.0
        for d in range(1, 5):
            for k in range(16):
                numeric = optimize_nonneg_constant(k, d).value
                closed = exact_constant_nonneg(2 * k, d).value
                worst = max(worst, abs(numeric - closed) / closed)
        spot2 = exact_constant_nonneg(2, 2).value
        spot3 = exact_constant_nonneg(3, 2).value
        info["detail"] = f"max rel gap {worst:.2e} (<= 1e-10); n=2: {spot2:.15g}, n=3: {spot3:.15g}"
        assert worst <= 1e-10
        assert spot2 == pytest.approx(1 / math.pi, rel=1e-14)
        assert spot3 == pytest.approx(3 / (2 * math.pi), rel=1e-14)
        assert optimize_nonneg_constant(1, 2).value == pytest.approx(1 / math.pi, rel=1e-12)


def _nonneg_ratio(k, d):
    # exact_constant_nonneg(2k, d) / ((2k)^d L), which simplifies to a rational number
    return Fraction((2 * k + d) * math.factorial(k + d - 1), 2 * math.factorial(k) * k**d)


def _p2_ratio_sq(n, d):
    # (sqrt(d_n) / n^(d/2) / L(d,2,inf))^2, also rational
    return Fraction(dim_pi(n, d) * math.factorial(d), 2 * n**d)


def _gaps(d):
    g1 = float(_nonneg_ratio(500, d) - 1)
    g2 = abs(math.sqrt(_p2_ratio_sq(500, d)) - 1)
    # the closed forms themselves agree with the rational reduction
    float_ratio = exact_constant_nonneg(1000, d).value / 1000**d / limit_constant_nonneg(d).value
    assert float_ratio == pytest.approx(float(_nonneg_ratio(500, d)), rel=1e-12)
    float_p2 = exact_constant_p2(500, d).value / 500 ** (d / 2) / limit_constant_p2(d).value
    assert float_p2 == pytest.approx(math.sqrt(_p2_ratio_sq(500, d)), rel=1e-12)
    return g1, g2


def test_criterion_3_limit_constants():
    with criterion("3 limit constants, d=1") as info:
        start = time.perf_counter()
        g1, g2 = _gaps(1)
        elapsed = time.perf_counter() - start
        info["detail"] = f"nonneg gap {g1:.6g}, p=2 gap {g2:.3g} (<= 1e-3), {elapsed:.3f} s"
        assert Fraction(_nonneg_ratio(500, 1) - 1) <= Fraction(1, 1000)
        assert g2 <= 1e-3
        assert elapsed < 1


@pytest.mark.xfail(strict=True, reason="gap at k = n = 500 is about d(d+1)/(4k) > 1e-3 for d >= 2; see ledger")
def test_criterion_3_limit_constants_higher_dims():
    with criterion("3 limit constants, d=2..4") as info:
        gaps = {d: _gaps(d) for d in (2, 3, 4)}
        info["detail"] = "; ".join(f"d={d}: nonneg {a:.2e}, p=2 {b:.2e}" for d, (a, b) in gaps.items())
        assert all(a <= 1e-3 and b <= 1e-3 for a, b in gaps.values())


def test_criterion_4_entire_extremal():
    with criterion("4 entire-function extremal") as info:
        start = time.perf_counter()
        gaps = []
        for d in (1, 2, 3):
            est = entire_extremal_ratio(d, tol=1e-6)
            closed = 2 ** (d - 1) * sphere_area(d) * math.factorial(d)
            gaps.append(abs(est.meta["l1_norm"] - closed) / closed)
        elapsed = time.perf_counter() - start
        info["detail"] = f"max rel gap {max(gaps):.2e} (<= 1e-6), {elapsed:.1f} s (<= 30 s)"
        assert max(gaps) <= 1e-6
        assert elapsed <= 30


def _zonal_moment(k, a):
    if k % 2:
        return 0.0
    return math.exp(math.lgamma((k + 1) / 2) + math.lgamma(a + 1) - math.lgamma(k / 2 + a + 1.5))


def test_criterion_5_radau():
    with criterion("5 Radau quadrature") as info:
        worst = 0.0
        for d in range(1, 7):
            a = (d - 2) / 2
            basis = JacobiBasis(a, a)
            for N in range(1, 41):
                rule = gauss_radau_jacobi(N, basis)
                mass = basis.mass()
                for k in range(2 * N + 1):
                    ref = _zonal_moment(k, a)
                    got = rule.integrate(lambda t: t**k)
                    # odd moments vanish; measure them against the total mass
                    err = abs(got - ref) / (abs(ref) if ref else mass)
                    worst = max(worst, err)
        lam0 = [radau_endpoint_weight(N, JacobiBasis(0, 0)) * (N + 1) ** 2 / 2 - 1 for N in range(1, 41)]
        info["detail"] = f"max rel err {worst:.2e} (<= 1e-12); max |lambda_0 (N+1)^2/2 - 1| {max(map(abs, lam0)):.1e}"
        assert worst <= 1e-12
        assert max(map(abs, lam0)) <= 1e-13


def _pairs(d, rng):
    out = []
    for _ in range(20):
        pair = []
        for _ in range(2):
            v = rng.standard_normal(d)
            pair.append(v * 5 * rng.uniform() ** (1 / d) / np.linalg.norm(v))
        out.append(pair)
    return out


def test_criterion_6_kernel_scaling_limit():
    with criterion("6 kernel scaling limit") as info:
        start = time.perf_counter()
        profile = KernelProfile(0.25, "lower")
        counts = {}
        for d in (1, 2):
            good = 0
            for x, y in _pairs(d, np.random.default_rng(2024 + d)):
                k = float(K_eta(profile, d, float(np.linalg.norm(x - y)))[0])
                r32 = scaling_limit_residual(32, d, profile, x, y, k_value=k)
                r256 = scaling_limit_residual(256, d, profile, x, y, k_value=k)
                good += r256 <= r32 / 3
            counts[d] = good
        elapsed = time.perf_counter() - start
        info["detail"] = f"pairs improving 3x: d=1 {counts[1]}/20, d=2 {counts[2]}/20 (>= 18), {elapsed:.1f} s (<= 300 s)"
        assert all(c >= 18 for c in counts.values())
        assert elapsed <= 300


def test_criterion_7_reproduction():
    with criterion("7 reproduction identity") as info:
        rng = np.random.default_rng(7)
        upper = KernelProfile(0.25, "upper")
        worst = 0.0
        for _ in range(100):
            n = int(rng.integers(1, 21))
            d = int(rng.integers(1, 4))
            lam = (d - 1) / 2
            y = rng.standard_normal(d + 1)
            y /= np.linalg.norm(y)
            c = rng.standard_normal(n + 1)

            def f(u):
                return c @ gegenbauer_normalized(n, lam, np.clip(u @ y, -1, 1), table=True)

            # exact for f times either kernel (degree <= ceil(1.25 n))
            pts, w = sphere_rule(d, 3 * n + 2)
            fy = w * f(pts)
            xs = rng.standard_normal((8, d + 1))
            xs = np.vstack([xs / np.linalg.norm(xs, axis=1, keepdims=True), y])
            exact = f(xs)
            for kern in (lambda t: kernel_G(n, d, t), lambda t: kernel_G_eta(n, d, upper, t)):
                conv = np.array([np.dot(fy, kern(np.clip(pts @ x, -1, 1))) for x in xs])
                worst = max(worst, float(np.max(np.abs(conv - exact))))
        info["detail"] = f"max sup error {worst:.2e} over 100 polynomials, G_n and G_(n,eta1) (<= 1e-8)"
        assert worst <= 1e-8


def test_criterion_8_designs():
    with criterion("8 design certification") as info:
        circle_ok = []
        for N in range(2, 17):
            th = 2 * np.pi * np.arange(N) / N
            rep = verify_design(NodeSet(np.c_[np.cos(th), np.sin(th)]), N + 1, geometry=False)
            circle_ok.append(rep.certified_degree == N - 1)
        octa = NodeSet(np.vstack([np.eye(3), -np.eye(3)]))
        rep = verify_design(octa, 4, probes=4096)
        th = 2 * np.pi * np.arange(24) / 24
        lo, hi = mz_ratio(NodeSet(np.c_[np.cos(th), np.sin(th)]), 7, 2.0)
        olo, ohi = mz_ratio(octa, 1, 2.0)
        mz_gap = max(abs(v - 1) for v in (lo, hi, olo, ohi))
        info["detail"] = (f"circle N=2..16 degree N-1: {sum(circle_ok)}/15; octahedron degree "
                          f"{rep.certified_degree}, m_4={rep.moments[3]:.3g}; MZ p=2 |ratio-1| {mz_gap:.1e} (<= 1e-9)")
        assert all(circle_ok)
        assert rep.certified_degree == 3 and rep.moments[3] > rep.tol
        assert mz_gap <= 1e-9


def test_criterion_9_limit_p1_d2(capsys):
    with criterion("9 extrapolated L(2,1,inf)") as info:
        code = cli_main(["limit", "--dim", "2", "--p", "1", "--degree", "8,16,32,64"])
        est = json.loads(capsys.readouterr().out)["estimate"]
        row = est["meta"]["tableau_last_row"]
        rel = abs(row[-1] - row[-2]) / abs(row[-1])
        info["detail"] = (f"estimate {est['value']:.10g} +/- {est['err']:.1e} (extrapolated, no reference value); "
                          f"last two Richardson levels differ by {rel:.1e} (<= 5e-3)")
        assert code == 0
        assert est["kind"] == "extrapolated"
        assert rel <= 5e-3


if __name__ == "__main__":
    import sys

    import _report

    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider"])
    print("\n".join(_report.LINES))
    sys.exit(code)
