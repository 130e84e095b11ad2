import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nikolskii.constants import reproducing_density
from nikolskii.errors import DomainError
from nikolskii.kernel import (
    K_eta,
    KernelProfile,
    SpherePoint,
    geodesic_distance,
    kernel_G,
    kernel_G_eta,
    localization_profile,
    psi_map,
    scaling_limit_residual,
    scaling_sweep,
    sphere_integral_scaled,
    sphere_rule,
)
from nikolskii.quadrature import sphere_area
from nikolskii.special import bessel_j_normalized, gegenbauer_normalized

LOWER = KernelProfile(0.25, "lower")
UPPER = KernelProfile(0.25, "upper")
SHARP = KernelProfile(variant="indicator")


def test_sphere_point_validation():
    assert SpherePoint((0.0, 1.0)).d == 1
    with pytest.raises(DomainError):
        SpherePoint((0.5, 0.5))


def test_profile_shape():
    t = np.linspace(0, 2, 401)
    for prof in (LOWER, UPPER):
        v = prof(t)
        assert np.all((v >= 0) & (v <= 1))
        assert np.all(v[t <= prof.plateau] == 1) and np.all(v[t >= prof.support_end] == 0)
        assert np.all(np.diff(v) <= 0)
    with pytest.raises(DomainError):
        KernelProfile(1.5)
    with pytest.raises(DomainError):
        KernelProfile(0.2, "middle")


def test_psi_examples():
    np.testing.assert_allclose(psi_map(np.zeros(3)), [0, 0, 0, 1])
    for xi in ([1.0, 0.0], [0.6, -0.8]):
        np.testing.assert_allclose(psi_map(math.pi * np.array(xi)), [0, 0, -1], atol=1e-15)
    e = np.array([0.0, 0.0, 1.0])
    assert geodesic_distance(psi_map([math.pi / 2, 0.0], 2), e) == pytest.approx(math.pi / 2, abs=1e-15)
    with pytest.raises(DomainError):
        psi_map([4.0, 0.0])
    with pytest.raises(DomainError):
        psi_map([1.0, 0.0], 3)


def test_psi_isometry_at_pole():
    rng = np.random.default_rng(0)
    for d in (1, 2, 3):
        e = np.zeros(d + 1)
        e[-1] = 1
        for _ in range(100):
            x = rng.standard_normal(d)
            x *= math.pi * rng.uniform() ** (1 / d) / np.linalg.norm(x)
            assert geodesic_distance(psi_map(x), e) == pytest.approx(np.linalg.norm(x), abs=1e-12)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_sphere_rule_exact(d):
    pts, w = sphere_rule(d, 6)
    assert w.sum() == pytest.approx(sphere_area(d), rel=1e-14)
    assert np.allclose(np.linalg.norm(pts, axis=1), 1)
    # int x_0^2 = omega_d / (d+1)
    assert np.dot(w, pts[:, 0] ** 2) == pytest.approx(sphere_area(d) / (d + 1), rel=1e-13)


def test_sphere_integral_scaled():
    for d in (1, 2, 3):
        one = sphere_integral_scaled(lambda u: np.ones(len(u)), 3, d)
        assert one == pytest.approx(sphere_area(d), rel=1e-8)
        assert abs(sphere_integral_scaled(lambda u: u[:, -1], 4, d)) < 1e-10
    circ = sphere_integral_scaled(lambda u: u[:, 0] ** 2 - u[:, 1] ** 2, 3, 1)
    assert abs(circ) < 1e-10
    pts, w = sphere_rule(2, 10)
    poly = lambda u: u[:, 0] ** 4 + 2 * u[:, 1] * u[:, 2] ** 2 + u[:, 2] ** 2  # noqa: E731
    assert sphere_integral_scaled(poly, 5, 2) == pytest.approx(np.dot(w, poly(pts)), rel=1e-10)


def test_kernel_g_examples():
    for d in (1, 2, 3):
        assert kernel_G(0, d, 0.3) == pytest.approx(1 / sphere_area(d))
        for n in (1, 5, 12):
            assert kernel_G(n, d, 1.0) == pytest.approx(reproducing_density(n, d), rel=1e-13)


def test_kernel_g_paths_agree():
    rng = np.random.default_rng(1)
    for d in range(1, 5):
        t = rng.uniform(-1, 1, 50)
        for n in range(21):
            a = kernel_G(n, d, t)
            b = kernel_G(n, d, t, method="gegenbauer")
            assert np.max(np.abs(a - b)) < 1e-9
    with pytest.raises(DomainError):
        kernel_G(2, 2, 0.1, method="fourier")


@given(n=st.integers(0, 25), d=st.integers(1, 5), t=st.floats(-1, 1))
@settings(max_examples=150, deadline=None)
def test_kernel_g_identity_property(n, d, t):
    a = float(kernel_G(n, d, t))
    b = float(kernel_G(n, d, t, method="gegenbauer"))
    assert a == pytest.approx(b, abs=1e-9 * max(1.0, reproducing_density(n, d)))


def test_kernel_g_eta_reduces_to_g():
    t = np.linspace(-1, 1, 9)
    for d in (1, 2, 3):
        for n in (1, 6, 15):
            np.testing.assert_allclose(kernel_G_eta(n, d, SHARP, t), kernel_G(n, d, t), atol=1e-11, rtol=1e-12)


def test_kernel_g_eta_positive_at_one():
    for prof in (LOWER, UPPER):
        for d in (1, 2, 3):
            assert kernel_G_eta(10, d, prof, 1.0) > 0


def _random_zonal(n, d, rng):
    y = rng.standard_normal(d + 1)
    y /= np.linalg.norm(y)
    c = rng.standard_normal(n + 1)
    lam = (d - 1) / 2
    return lambda u: c @ gegenbauer_normalized(n, lam, np.clip(u @ y, -1, 1), table=True)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_reproduction_with_upper_profile(d):
    rng = np.random.default_rng(d)
    n = 10
    pts, w = sphere_rule(d, 3 * n + 2)
    x = rng.standard_normal((5, d + 1))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    for _ in range(5):
        f = _random_zonal(n, d, rng)
        fy = f(pts)
        for xi in x:
            val = np.dot(w * fy, kernel_G_eta(n, d, UPPER, np.clip(pts @ xi, -1, 1)))
            assert val == pytest.approx(float(f(xi[None])[0]), abs=1e-8)


def test_k_eta_at_zero():
    for d in (1, 2, 3):
        const = sphere_area(d - 1) / (2 * math.pi) ** d
        rho = np.linspace(0, 1.25, 200001)
        ref = const * np.trapezoid(UPPER(rho) * rho ** (d - 1), rho)
        assert K_eta(UPPER, d, 0.0)[0] == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_k_eta_sharp_is_ball_transform(d):
    r = np.linspace(0, 25, 26)
    ref = sphere_area(d - 1) / (d * (2 * math.pi) ** d) * bessel_j_normalized(d / 2, r)
    np.testing.assert_allclose(K_eta(SHARP, d, r), ref, atol=1e-12)


def test_k_eta_sharp_zero_at_bessel_root():
    assert abs(K_eta(SHARP, 2, 3.8317059702075125)[0]) < 1e-12


def test_k_eta_matches_mpmath_at_d1():
    # (1/pi) int_0^1 eta(rho) cos(r rho) d rho by mpmath, frozen
    ref = {50.0: 1.972143036447346e-05, 100.0: -2.94801367660985e-05, 200.0: 1.4449892109894613e-06}
    for r, v in ref.items():
        assert K_eta(LOWER, 1, r)[0] == pytest.approx(v, rel=1e-8)


def test_k_eta_decay():
    assert abs(K_eta(LOWER, 2, 200.0)[0]) < 1e-6
    # the d = 1 transform of this profile is still 1.4e-6 at r = 200
    assert abs(K_eta(LOWER, 1, 400.0)[0]) < 1e-6
    with pytest.raises(DomainError):
        K_eta(LOWER, 2, -1.0)


def test_scaling_residual_examples():
    res = [scaling_limit_residual(n, 2, LOWER, np.zeros(2), np.zeros(2)) for n in (32, 64, 128)]
    assert res[0] > res[1] > res[2]
    # at d = 1 the diagonal is a Riemann sum of a smooth bump: exact to rounding
    assert max(scaling_limit_residual(n, 1, LOWER, [0.0], [0.0]) for n in (32, 64, 128)) < 1e-13
    x, y = np.array([1.0, 0.0]), np.array([1.0, 3.0])
    assert scaling_limit_residual(256, 2, LOWER, x, y) < scaling_limit_residual(32, 2, LOWER, x, y)
    x = np.array([0.7, -1.1])
    diag = scaling_limit_residual(64, 2, LOWER, x, x)
    assert diag == pytest.approx(abs(kernel_G_eta(64, 2, LOWER, 1.0) / 64**2 - K_eta(LOWER, 2, 0.0)[0]), rel=1e-12)
    with pytest.raises(DomainError):
        scaling_limit_residual(1, 2, LOWER, [4.0, 0.0], x)


@pytest.mark.parametrize("d", [1, 2])
def test_scaling_residual_eventually_decreasing(d):
    rng = np.random.default_rng(10 + d)
    pairs = []
    for _ in range(20):
        pair = []
        for _ in range(2):
            v = rng.standard_normal(d)
            pair.append(v * 5 * rng.uniform() ** (1 / d) / np.linalg.norm(v))
        pairs.append(tuple(pair))
    rows = scaling_sweep([32, 64, 128, 256], d, LOWER, pairs)
    for i in range(20):
        res = [r[3] for r in rows[4 * i:4 * i + 4]]
        bad = sum(b > a for a, b in zip(res, res[1:]))
        assert bad <= 1


def test_localization():
    for d in (1, 2):
        c128 = localization_profile(128, d, LOWER, 3)
        c512 = localization_profile(512, d, LOWER, 3)
        assert 0.25 < c128 / c512 < 4
    vals = [localization_profile(n, 1, LOWER, 2) for n in (64, 128, 256)]
    assert max(vals) / min(vals) < 1.5
    assert localization_profile(64, 2, LOWER, 0) == pytest.approx(
        np.max(np.abs(kernel_G_eta(64, 2, LOWER, 1.0))) / 64**2, rel=1e-12
    )
    with pytest.raises(DomainError):
        localization_profile(64, 2, LOWER, -1)
