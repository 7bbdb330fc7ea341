import math

import numpy as np
import pytest
from scipy.special import betainc as scipy_betainc, beta as scipy_beta

from greedysphere.kernels import (
    KernelSpec,
    incomplete_beta,
    log_cap_mean,
    riesz_kernel,
    riesz_kernel_sq,
    riesz_laplace_beltrami,
    sinc_power_coeffs,
    wiener_constant,
    wiener_constant_closed,
    zeta,
)
from greedysphere.sphere import Cap, random_unit, sample_cap
from greedysphere.verify import fd_laplace_beltrami_radial, fd_laplace_beltrami_s2


def test_kernel_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec("riesz", dim=2, s=0.0)
    with pytest.raises(ValueError):
        KernelSpec("green", dim=1)
    with pytest.raises(ValueError):
        KernelSpec("nope", dim=2)
    spec = KernelSpec("riesz", dim=2, s=2.5)
    with pytest.raises(ValueError):
        spec.validate_for_run()
    assert KernelSpec("log", dim=2).s_value == 0.0


def test_riesz_kernel_values():
    x = np.array([0.0, 0.0, 1.0])
    assert riesz_kernel(x, -x, 1.0) == pytest.approx(0.5, abs=1e-15)
    y = np.array([math.sqrt(3) / 2, 0.0, 0.5])  # |x-y| = 1
    assert riesz_kernel(x, y, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert riesz_kernel(x, -x, -1.0) == pytest.approx(-2.0, abs=1e-15)


def test_riesz_kernel_coincident_points():
    x = np.array([1.0, 0.0])
    assert riesz_kernel(x, x, 1.0) == math.inf
    assert riesz_kernel(x, x, 0.0) == math.inf
    assert riesz_kernel(x, x, -1.0) == 0.0


def test_kernel_symmetry_and_rotation_invariance():
    rng = np.random.default_rng(11)
    for _ in range(40):
        d = int(rng.integers(1, 4))
        s = float(rng.uniform(-1.9, d - 0.1))
        x, y = random_unit(rng, d), random_unit(rng, d)
        assert riesz_kernel(x, y, s) == riesz_kernel(y, x, s)
        q, _ = np.linalg.qr(rng.standard_normal((d + 1, d + 1)))
        assert riesz_kernel(q @ x, q @ y, s) == pytest.approx(riesz_kernel(x, y, s), rel=1e-12)


def test_laplace_beltrami_examples():
    x = np.array([1.0, 0.0, 0.0])
    y = np.array([0.0, 1.0, 0.0])
    assert riesz_laplace_beltrami(x, y, 0.0, 2) == pytest.approx(-0.5, abs=1e-14)
    x4 = np.array([0.0, 0.0, 0.0, 1.0])
    assert riesz_laplace_beltrami(x4, -x4, 1.0, 3) == pytest.approx(-0.375, abs=1e-15)
    with pytest.raises(ValueError):
        riesz_laplace_beltrami(x, x, 1.0, 2)


def test_laplace_beltrami_sign_in_subharmonic_range():
    rng = np.random.default_rng(13)
    for _ in range(200):
        d = int(rng.integers(2, 5))
        s = float(rng.uniform(max(d - 2, 0.0), d - 1e-3))
        x, y = random_unit(rng, d), random_unit(rng, d)
        if np.allclose(x, y):
            continue
        assert riesz_laplace_beltrami(x, y, s, d) <= 1e-12


def test_laplace_beltrami_vs_radial_finite_differences():
    rng = np.random.default_rng(17)
    for _ in range(100):
        d = int(rng.integers(2, 5))
        s = float(rng.uniform(-1.9, min(d, 3.0) - 0.05))
        if abs(s) < 0.05:
            s = 0.0
        theta = float(rng.uniform(0.3, math.pi - 0.3))
        x = np.array([math.sin(theta), math.cos(theta)] + [0.0] * (d - 1))
        y = np.array([0.0, 1.0] + [0.0] * (d - 1))
        exact = riesz_laplace_beltrami(x, y, s, d)
        fd = fd_laplace_beltrami_radial(s, d, theta)
        assert abs(fd - exact) / max(abs(exact), 1e-12) <= 1e-4


def test_laplace_beltrami_vs_two_coordinate_stencil():
    rng = np.random.default_rng(19)
    for _ in range(10):
        x = random_unit(rng, 2)
        while abs(x[2]) > 0.8:
            x = random_unit(rng, 2)
        y = random_unit(rng, 2)
        while abs(float(np.dot(x, y))) > 0.9:
            y = random_unit(rng, 2)
        for s in (0.0, 0.5, 1.0):
            exact = riesz_laplace_beltrami(x, y, s, 2)
            fd = fd_laplace_beltrami_s2(x, y, s)
            assert abs(fd - exact) / max(abs(exact), 1e-12) <= 1e-4


def test_incomplete_beta_values():
    for x in (0.0, 0.1, 0.37, 0.5, 0.99, 1.0):
        assert incomplete_beta(x, 1.0, 1.0) == pytest.approx(x, abs=1e-14)
    assert incomplete_beta(0.5, 0.5, 0.5) == pytest.approx(math.pi / 2, abs=1e-12)
    full = math.exp(math.lgamma(2.5) + math.lgamma(3.5) - math.lgamma(6.0))
    assert incomplete_beta(1.0, 2.5, 3.5) == pytest.approx(full, abs=1e-15)


def test_incomplete_beta_against_scipy():
    rng = np.random.default_rng(23)
    for _ in range(100):
        a = float(rng.uniform(0.2, 20.0))
        b = float(rng.uniform(0.2, 20.0))
        x = float(rng.uniform(0.0, 1.0))
        ref = float(scipy_betainc(a, b, x) * scipy_beta(a, b))
        assert incomplete_beta(x, a, b) == pytest.approx(ref, abs=1e-12, rel=1e-10)


def test_incomplete_beta_domain_errors():
    with pytest.raises(ValueError):
        incomplete_beta(-0.1, 1.0, 1.0)
    with pytest.raises(ValueError):
        incomplete_beta(0.5, 0.0, 1.0)


def test_zeta_classical_values():
    assert zeta(2.0) == pytest.approx(math.pi**2 / 6, abs=1e-12)
    assert zeta(0.0) == -0.5
    assert zeta(-1.0) == pytest.approx(-1.0 / 12.0, abs=1e-12)
    assert zeta(4.0) == pytest.approx(math.pi**4 / 90, abs=1e-12)
    with pytest.raises(ValueError):
        zeta(1.0)


def test_zeta_against_mpmath():
    mp = pytest.importorskip("mpmath")
    for s in (-3.5, -1.5, -0.5, 0.5, 1.5, 3.0, 12.0):
        assert zeta(s) == pytest.approx(float(mp.zeta(s)), abs=1e-12, rel=1e-12)


def test_sinc_power_coeffs_low_order():
    for s in (0.5, 2.0, -1.0):
        zc = sinc_power_coeffs(s, 2)
        assert zc.a[0] == 1.0
        assert zc.a[1] == pytest.approx(s * math.pi**2 / 6, rel=1e-13)


def _cauchy_taylor_coeffs(s: float, orders: list[int], radius: float = 0.4) -> list[float]:
    """Spectrally accurate Taylor coefficients of (sin(pi z)/(pi z))^(-s)
    by trapezoid quadrature of the Cauchy integral on |z| = radius."""
    m = 4096
    theta = 2.0 * math.pi * np.arange(m) / m
    z = radius * np.exp(1j * theta)
    f = (np.sin(math.pi * z) / (math.pi * z)) ** (-s)
    spec = np.fft.fft(f) / m
    return [float(np.real(spec[k])) / radius**k for k in orders]


def test_sinc_power_coeffs_match_taylor_oracle():
    s, q = 2.0, 3
    zc = sinc_power_coeffs(s, q)
    oracle = _cauchy_taylor_coeffs(s, [2 * j for j in range(q + 1)])
    for j in range(q + 1):
        assert zc.a[j] == pytest.approx(oracle[j], abs=1e-9, rel=1e-10)


def test_sinc_power_coeffs_fractional_exponent():
    s, q = 0.5, 4
    zc = sinc_power_coeffs(s, q)
    oracle = _cauchy_taylor_coeffs(s, [2 * j for j in range(q + 1)], radius=0.3)
    for j in range(q + 1):
        assert zc.a[j] == pytest.approx(oracle[j], rel=1e-9, abs=1e-10)


def test_wiener_constant_derived_values():
    assert wiener_constant(1.0, 2).value == pytest.approx(1.0, abs=1e-10)
    assert wiener_constant(0.0, 1).value == pytest.approx(0.0, abs=1e-10)
    assert wiener_constant(0.0, 2).value == pytest.approx(0.5 - math.log(2.0), abs=1e-10)


def test_wiener_constant_quadrature_vs_closed_form():
    for s, d in ((0.5, 2), (-1.5, 1), (1.5, 3), (0.0, 3), (-0.5, 4), (2.9, 3)):
        q = wiener_constant(s, d)
        c = wiener_constant_closed(s, d)
        assert q.method == "quadrature" and c.method == "closed_form"
        assert q.value == pytest.approx(c.value, abs=1e-10)
    with pytest.raises(ValueError):
        wiener_constant(2.0, 2)


def test_log_cap_mean_against_monte_carlo():
    rng = np.random.default_rng(29)
    p0 = random_unit(rng, 2)
    for a, p_angle in ((0.7, 1.6), (1.2, 0.4), (0.9, 0.0)):
        # place p at the given angle from p0
        t = random_unit(rng, 2)
        t -= np.dot(t, p0) * p0
        t /= np.linalg.norm(t)
        p = math.cos(p_angle) * p0 + math.sin(p_angle) * t
        samples = sample_cap(rng, Cap(center=p0, radius=a), 1_000_000)
        vals = np.log(np.linalg.norm(samples - p[None, :], axis=1))
        mc, se = float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(vals.size))
        assert log_cap_mean(p0, a, p) == pytest.approx(mc, abs=3 * se)


def test_log_cap_mean_center_case():
    p0 = np.array([0.0, 0.0, 1.0])
    a = 0.3
    got = log_cap_mean(p0, a, p0)
    want = math.log(2.0) - 0.5 + math.log(math.sin(a / 2.0))
    assert got == pytest.approx(want, abs=1e-14)


def test_subharmonic_cap_mean_inequality():
    # cap average of K_s(., p) dominates the center value for p outside the cap
    rng = np.random.default_rng(31)
    for s in (0.0, 1.0):
        for _ in range(5):
            p0 = random_unit(rng, 2)
            a = float(rng.uniform(0.2, 0.9))
            p = random_unit(rng, 2)
            while math.acos(np.clip(np.dot(p, p0), -1, 1)) <= a + 0.1:
                p = random_unit(rng, 2)
            samples = sample_cap(rng, Cap(center=p0, radius=a), 200_000)
            vals = riesz_kernel_sq(np.maximum(
                np.sum((samples - p[None, :]) ** 2, axis=1), 0.0), s)
            se = float(vals.std(ddof=1) / math.sqrt(vals.size))
            assert float(vals.mean()) >= riesz_kernel(p0, p, s) - 3 * se
