import math

import numpy as np
import pytest

from greedysphere.circle import (
    CircleConfig,
    brute_force_energy,
    equally_spaced_energy,
    greedy_circle_verify,
    roots_polarization,
    roots_polarization_second_order,
    van_der_corput,
)
from greedysphere.greedy import Configuration
from greedysphere.kernels import KernelSpec, wiener_constant
from greedysphere.optimize import SolverParams, minimize_potential


def test_circle_config_rejects_duplicates():
    with pytest.raises(ValueError):
        CircleConfig(angles=(0.0, 2 * math.pi))


def test_van_der_corput_small_cases():
    assert van_der_corput(2).angles == (0.0, math.pi)
    got = van_der_corput(4).angles
    assert got == (0.0, math.pi, math.pi / 2, 3 * math.pi / 2)


def test_van_der_corput_dyadic_completeness():
    for k in (3, 6, 10):
        n = 1 << k
        got = np.sort(np.asarray(van_der_corput(n).angles))
        want = 2 * math.pi * np.arange(n) / n
        assert np.max(np.abs(got - want)) <= 1e-12


def test_equally_spaced_energy_log_case():
    assert equally_spaced_energy(0.0, 100, 2) == -100 * math.log(100)


def test_equally_spaced_energy_expansion_vs_brute_force():
    for s in (-1.5, -1.0, -0.5, 0.5):
        for n in (100, 1000):
            expansion = equally_spaced_energy(s, n, 2)
            brute = brute_force_energy(s, n)
            assert expansion == pytest.approx(brute, rel=1e-6)


def test_equally_spaced_energy_converges_in_q():
    s, n = 0.5, 256
    brute = brute_force_energy(s, n)
    errs = [abs(equally_spaced_energy(s, n, q) - brute) for q in (0, 1, 2, 3)]
    assert errs[2] < errs[0]
    assert errs[3] <= errs[1]


def test_equally_spaced_energy_domain():
    with pytest.raises(ValueError):
        equally_spaced_energy(1.5, 10, 2)


def test_roots_polarization_log_case():
    for n in (3, 17, 256):
        assert roots_polarization(0.0, n) == pytest.approx(-math.log(2.0), abs=1e-10)


def test_roots_polarization_matches_direct_minimization():
    params = SolverParams(mesh_size=4096, multistart=8)
    for s in (-1.5, -1.0, -0.5, 0.0, 0.5):
        n = 64
        ang = 2 * math.pi * np.arange(n) / n
        kernel = KernelSpec("log", dim=1) if s == 0.0 else KernelSpec("riesz", dim=1, s=s)
        cfg = Configuration(dim=1, kernel=kernel,
                            points=np.column_stack([np.cos(ang), np.sin(ang)]),
                            step_values=[])
        direct = minimize_potential(cfg, kernel, params).value
        assert roots_polarization(s, n) == pytest.approx(direct, abs=1e-8)


def test_roots_polarization_second_order_limit():
    for s in (0.5, -0.5):
        n = 4096
        iw = wiener_constant(s, 1).value
        got = (roots_polarization(s, n) - iw * n) / n**s
        assert got == pytest.approx(roots_polarization_second_order(s), rel=0.02)


def test_greedy_circle_verify_log_brackets():
    rep = greedy_circle_verify(0.0, 256)
    assert rep["ok"]
    names = [c["bound"] for c in rep["checks"]]
    assert any("log(4/3)" in n for n in names)
    assert any("P <= 0" in n for n in names)


def test_greedy_circle_verify_riesz_sign_structure():
    for s in (0.5, -0.5, -1.0, -1.5):
        rep = greedy_circle_verify(s, 128)
        assert rep["ok"], rep["checks"]


def test_greedy_circle_verify_domain():
    with pytest.raises(ValueError):
        greedy_circle_verify(1.5, 16)
