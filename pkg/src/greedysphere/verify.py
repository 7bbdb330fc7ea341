"""Verification suites: kernel identities, circle oracles, separation and
Green-run regressions. Shared by the CLI `verify` command and the test suite.

Each check returns {"name", "ok", "detail"}; a suite passes when every check
does. Finite-difference oracles live here so the CLI can re-run them.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

from . import runs
from .analysis import fit_residual_exponent
from .baselines import load_baselines, within
from .circle import (
    brute_force_energy,
    equally_spaced_energy,
    greedy_circle_verify,
    roots_polarization,
    roots_polarization_second_order,
    van_der_corput,
)
from .greedy import energy
from .greenfn import (
    cap_mean_shift_at_pi,
    green_cap_mean_shift,
    green_kernel_t,
    green_series_t,
    green_small_t_constant,
    sphere_volume,
)
from .greenruns import green_polarization_margin
from .kernels import (
    KernelSpec,
    incomplete_beta,
    riesz_kernel,
    riesz_laplace_beltrami,
    wiener_constant,
    wiener_constant_closed,
    zeta,
)
from .sphere import random_unit

SUITES = ("kernels", "circle", "green", "separation")


def _check(name: str, ok: bool, detail: str) -> dict:
    return {"name": name, "ok": bool(ok), "detail": detail}


# ---------------------------------------------------------------------------
# Finite-difference oracles.
# ---------------------------------------------------------------------------


def fd_laplace_beltrami_radial(s: float, d: int, theta: float, h: float = 1e-3) -> float:
    """Sphere Laplacian of K_s at polar angle theta from the source, by
    central differences of the radial part u'' + (d-1) cot(theta) u'
    (geometer's sign)."""

    pole = np.array([0.0, 1.0] + [0.0] * (d - 1))

    def u(th: float) -> float:
        return riesz_kernel(np.array([math.sin(th), math.cos(th)] + [0.0] * (d - 1)), pole, s)

    upp = (u(theta + h) - 2.0 * u(theta) + u(theta - h)) / (h * h)
    up = (u(theta + h) - u(theta - h)) / (2.0 * h)
    return -(upp + (d - 1) * math.cos(theta) / math.sin(theta) * up)


def fd_laplace_beltrami_s2(x: np.ndarray, y: np.ndarray, s: float, h: float = 1e-3) -> float:
    """Full two-coordinate FD Laplacian on S^2 at x (no alignment with y)."""
    theta = math.acos(max(-1.0, min(1.0, float(x[2]))))
    phi = math.atan2(float(x[1]), float(x[0]))

    def u(th: float, ph: float) -> float:
        p = np.array([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)])
        return riesz_kernel(p, y, s)

    u0 = u(theta, phi)
    d_th = (u(theta + h, phi) - 2.0 * u0 + u(theta - h, phi)) / (h * h)
    d_th1 = (u(theta + h, phi) - u(theta - h, phi)) / (2.0 * h)
    d_ph = (u(theta, phi + h) - 2.0 * u0 + u(theta, phi - h)) / (h * h)
    lap = d_th + math.cos(theta) / math.sin(theta) * d_th1 + d_ph / math.sin(theta) ** 2
    return -lap


# ---------------------------------------------------------------------------
# Suite: kernels.
# ---------------------------------------------------------------------------


def suite_kernels() -> list[dict]:
    checks = []

    # Green series against the S^2 closed form
    t = np.linspace(0.1, 2.0, 100)
    series = green_series_t(t, 2)
    closed = -np.log(t) / (2 * math.pi) - 1 / (4 * math.pi) + math.log(2.0) / (2 * math.pi)
    err = float(np.max(np.abs(series - closed)))
    checks.append(_check("green S2 closed form (100 samples)", err <= 1e-8, f"max err {err:.2e}"))

    # zero mean by quadrature over the sphere
    for d in (2, 3):
        norm = quad(lambda th: math.sin(th) ** (d - 1), 0.0, math.pi)[0]
        val, _ = quad(
            lambda th: float(green_kernel_t(np.array([2.0 * math.sin(th / 2.0)]), d)[0])
            * math.sin(th) ** (d - 1),
            1e-12, math.pi, limit=200,
        )
        mean = val / norm
        checks.append(_check(f"green zero mean d={d}", abs(mean) <= 1e-6, f"mean {mean:.2e}"))

    # antipodal identity and small-t power law
    for d in (2, 3, 4):
        gap = float(green_kernel_t(np.array([2.0]), d)[0]) + cap_mean_shift_at_pi(d)
        checks.append(_check(f"green antipodal identity d={d}", abs(gap) <= 1e-12, f"gap {gap:.2e}"))
    for d in (3, 4):
        c = green_small_t_constant(d)
        r1 = float(green_kernel_t(np.array([1e-3]), d)[0]) / (c * 1e-3 ** (2 - d))
        r2 = float(green_kernel_t(np.array([1e-1]), d)[0]) / (c * 1e-1 ** (2 - d))
        ok = abs(r1 - 1.0) < 0.01 and abs(r1 - 1.0) < abs(r2 - 1.0)
        checks.append(_check(f"green small-t power law d={d}", ok, f"ratio(1e-3)={r1:.6f}"))

    # cap-mean shift: closed form on S^2, small/large angle laws
    a = math.pi / 2
    shift = green_cap_mean_shift(2, a)
    closed2 = -(1.0 / (2 * math.pi)) * (-0.5 - (math.cos(a / 2) / math.sin(a / 2)) ** 2 * math.log(math.cos(a / 2)))
    checks.append(_check("cap shift S2 closed form", abs(shift - closed2) <= 1e-10,
                         f"diff {shift - closed2:.2e}"))
    for d in (2, 3, 4):
        small = green_cap_mean_shift(d, 1e-2)
        approx = 1e-4 / ((2 * d + 4) * sphere_volume(d))
        rel = abs(small / approx - 1.0)
        checks.append(_check(f"cap shift small-angle d={d}", rel <= 1e-3, f"rel {rel:.2e}"))
    d = 3
    near_pi = green_cap_mean_shift(d, math.pi - 1e-2)
    approx = cap_mean_shift_at_pi(d) - 1e-4 / ((2 * d - 4) * sphere_volume(d))
    rel = abs(near_pi / approx - 1.0)
    checks.append(_check("cap shift near-pi law d=3", rel <= 1e-3, f"rel {rel:.2e}"))

    # Laplace-Beltrami closed forms vs finite differences
    rng = np.random.default_rng(2024)
    worst = 0.0
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
        worst = max(worst, abs(fd - exact) / max(abs(exact), 1e-12))
    checks.append(_check("laplace-beltrami vs radial FD (100 tuples)", worst <= 1e-4,
                         f"worst rel {worst:.2e}"))
    # full 2-coordinate stencil on S^2, including the constant log case
    worst2 = 0.0
    for _ in range(20):
        x = random_unit(rng, 2)
        while abs(x[2]) > 0.8:
            x = random_unit(rng, 2)
        y = random_unit(rng, 2)
        while abs(float(np.dot(x, y))) > 0.9:
            y = random_unit(rng, 2)
        for s in (0.0, 1.0, 0.5, -0.5):
            exact = riesz_laplace_beltrami(x, y, s, 2)
            fd = fd_laplace_beltrami_s2(x, y, s)
            worst2 = max(worst2, abs(fd - exact) / max(abs(exact), 1e-12))
    checks.append(_check("laplace-beltrami vs 2d stencil on S2", worst2 <= 1e-4,
                         f"worst rel {worst2:.2e}"))
    lb = riesz_laplace_beltrami(np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), 0.0, 2)
    checks.append(_check("log kernel laplacian is -1/2 on S2", abs(lb + 0.5) <= 1e-14, f"{lb}"))

    # incomplete beta spot values
    e1 = abs(incomplete_beta(0.37, 1.0, 1.0) - 0.37)
    e2 = abs(incomplete_beta(0.5, 0.5, 0.5) - math.pi / 2)
    e3 = abs(incomplete_beta(1.0, 2.5, 1.5) - math.exp(math.lgamma(2.5) + math.lgamma(1.5) - math.lgamma(4.0)))
    ok = max(e1, e2, e3) <= 1e-12
    checks.append(_check("incomplete beta spot values", ok, f"errs {e1:.1e} {e2:.1e} {e3:.1e}"))

    # zeta classical identities
    ze = max(abs(zeta(2.0) - math.pi**2 / 6), abs(zeta(0.0) + 0.5), abs(zeta(-1.0) + 1.0 / 12.0))
    checks.append(_check("zeta classical identities", ze <= 1e-12, f"max err {ze:.1e}"))

    # Wiener constants: quadrature vs independent closed forms
    werr = 0.0
    for s, d, target in ((1.0, 2, 1.0), (0.0, 1, 0.0), (0.0, 2, 0.5 - math.log(2.0))):
        werr = max(werr, abs(wiener_constant(s, d).value - target))
    for s, d in ((0.5, 2), (-1.5, 1), (1.5, 3), (0.0, 3)):
        werr = max(werr, abs(wiener_constant(s, d).value - wiener_constant_closed(s, d).value))
    checks.append(_check("wiener constants (quadrature vs closed)", werr <= 1e-10, f"max err {werr:.1e}"))
    return checks


# ---------------------------------------------------------------------------
# Suite: circle.
# ---------------------------------------------------------------------------


def suite_circle(n: int = 4096, use_baselines: bool = True) -> list[dict]:
    checks = []
    tol = 1e-9

    # roots-of-unity oracles
    for n_r in (4, 64, 1024):
        e = brute_force_energy(0.0, n_r)
        rel = abs(e + n_r * math.log(n_r)) / (n_r * math.log(n_r))
        checks.append(_check(f"roots log energy N={n_r}", rel <= 1e-10, f"rel {rel:.1e}"))
        p = roots_polarization(0.0, n_r)
        checks.append(_check(f"roots log polarization N={n_r}", abs(p + math.log(2.0)) <= 1e-8,
                             f"err {abs(p + math.log(2.0)):.1e}"))
    for s in (-1.5, -0.5, 0.5):
        for n_r in (128, 1024):
            expansion = equally_spaced_energy(s, n_r, 2)
            brute = brute_force_energy(s, n_r)
            rel = abs(expansion - brute) / abs(brute)
            checks.append(_check(f"zeta expansion s={s} N={n_r}", rel <= 1e-6, f"rel {rel:.1e}"))

    # second-order polarization coefficient at N = 4096
    for s in (0.5, -0.5):
        iw = wiener_constant(s, 1).value
        lead = roots_polarization_second_order(s)
        got = (roots_polarization(s, 4096) - iw * 4096) / 4096**s
        rel = abs(got / lead - 1.0)
        checks.append(_check(f"roots second-order s={s}", rel <= 0.02, f"rel {rel:.2e}"))

    # greedy log run: brackets and van der Corput structure
    cfg = runs.circle_run(0.0, n)
    rep = greedy_circle_verify(0.0, n, config=cfg)
    for chk in rep["checks"]:
        checks.append(_check(f"greedy s=0: {chk['bound']}", chk["ok"],
                             f"margin {chk['margin']:.2e} first bad N {chk['first_violation_n']}"))
    worst = 0.0
    for k in range(1, 13):
        m = 1 << k
        got = np.sort(np.mod(np.arctan2(cfg.points[:m, 1], cfg.points[:m, 0]), 2 * math.pi))
        want = np.sort(np.asarray(van_der_corput(m).angles))
        worst = max(worst, float(np.max(np.abs(got - want))))
    checks.append(_check("van der corput equivalence (N=2^k, k<=12)", worst <= 1e-9,
                         f"worst angle err {worst:.1e}"))

    baselines = load_baselines() if use_baselines else None
    for s in (0.5, -0.5, -1.0, -1.5):
        cfg_s = runs.circle_run(s, n)
        rep = greedy_circle_verify(s, n, config=cfg_s)
        chk = rep["checks"][0]
        ok = chk["ok"]
        detail = f"c_lo {chk['c_lo']:.4g} c_hi {chk['c_hi']:.4g}"
        if baselines is not None:
            pinned = baselines["circle"][f"s={s:g}"]
            ok = ok and within(chk["c_lo"], pinned["c_lo"]) and within(chk["c_hi"], pinned["c_hi"])
            detail += f" (pinned {pinned['c_lo']:.4g}, {pinned['c_hi']:.4g})"
        checks.append(_check(f"greedy bracket s={s}", ok, detail))
    return checks


# ---------------------------------------------------------------------------
# Suite: separation (S^2 runs).
# ---------------------------------------------------------------------------


def suite_separation(use_baselines: bool = True) -> list[dict]:
    checks = []
    baselines = load_baselines() if use_baselines else None

    cfg = runs.s2_riesz1_run()
    n_max = cfg.n - 1
    seps = cfg.prefix_separations()
    sep_ns = np.arange(2, cfg.n + 1)
    sel = (sep_ns >= 100) & (sep_ns <= n_max)
    scaled_min = float(np.min(seps[sel] * np.sqrt(sep_ns[sel])))
    ok = scaled_min > 0.0
    detail = f"min delta*sqrt(N) {scaled_min:.4f}"
    if baselines is not None:
        pinned = baselines["s2_riesz1"]["sep_scaled_min"]
        ok = ok and within(scaled_min, pinned)
        detail += f" (pinned {pinned:.4f})"
    checks.append(_check("s2 riesz1 scaled separation", ok, detail))

    exp_fit = fit_residual_exponent(cfg, n_lo=100)
    checks.append(_check("s2 riesz1 residual exponent in [1.4, 1.6]",
                         1.4 <= exp_fit <= 1.6, f"fit {exp_fit:.4f}"))

    iw1 = wiener_constant(1.0, 2).value
    pol_ns = np.arange(1, len(cfg.step_values) + 1, dtype=float)
    pols = np.asarray(cfg.step_values)
    sel_m = (pol_ns >= 100) & (pol_ns <= n_max)
    margins = (iw1 * pol_ns[sel_m] - pols[sel_m]) / np.sqrt(pol_ns[sel_m])
    m_min = float(np.min(margins))
    ok = m_min > 0.0
    detail = f"min margin {m_min:.4f}"
    if baselines is not None:
        pinned = baselines["s2_riesz1"]["margin_min"]
        ok = ok and within(m_min, pinned)
        detail += f" (pinned {pinned:.4f})"
    checks.append(_check("s2 riesz1 polarization margin positive", ok, detail))

    new_dists = np.asarray(cfg.meta["step_min_dists"])
    min_sep_scaled = float(np.min(new_dists[sel_m] * np.sqrt(pol_ns[sel_m])))
    ok = min_sep_scaled > 0.0
    detail = f"min newdist*sqrt(N) {min_sep_scaled:.4f}"
    if baselines is not None:
        pinned = baselines["s2_riesz1"]["minimizer_sep_min"]
        ok = ok and within(min_sep_scaled, pinned)
        detail += f" (pinned {pinned:.4f})"
    checks.append(_check("minimizer separation law", ok, detail))

    cfg_log = runs.s2_log_run()
    seps = cfg_log.prefix_separations()
    sep_ns = np.arange(2, cfg_log.n + 1)
    sel = (sep_ns >= 100) & (sep_ns <= cfg_log.n - 1)
    scaled_min = float(np.min(seps[sel] * np.sqrt(sep_ns[sel])))
    ok = scaled_min > 0.0
    detail = f"min delta*sqrt(N) {scaled_min:.4f}"
    if baselines is not None:
        pinned = baselines["s2_log"]["sep_scaled_min"]
        ok = ok and within(scaled_min, pinned)
        detail += f" (pinned {pinned:.4f})"
    checks.append(_check("s2 log scaled separation", ok, detail))
    return checks


# ---------------------------------------------------------------------------
# Suite: green runs.
# ---------------------------------------------------------------------------


def suite_green(use_baselines: bool = True) -> list[dict]:
    checks = []
    baselines = load_baselines() if use_baselines else None

    cfg = runs.s3_green_run()
    n_max = cfg.n - 1
    energies = cfg.prefix_energies()
    ns = np.arange(1, cfg.n + 1, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        d_of_n = -energies / ns ** (4.0 / 3.0)
    sel = (ns >= 50) & (ns <= n_max)
    d_min, d_max = float(np.min(d_of_n[sel])), float(np.max(d_of_n[sel]))
    ok = d_min > 0.0
    detail = f"D(N) in [{d_min:.4f}, {d_max:.4f}]"
    if baselines is not None:
        pinned = baselines["s3_green"]
        ok = ok and within(d_min, pinned["d_min"]) and within(d_max, pinned["d_max"])
        detail += f" (pinned [{pinned['d_min']:.4f}, {pinned['d_max']:.4f}])"
    checks.append(_check("s3 green D(N) bracket", ok, detail))

    checks.append(_check("s3 green energy negative & decreasing",
                         bool(np.all(np.diff(energies[1:]) < 0.0) and np.all(energies[1:] < 0.0)),
                         "E strictly decreasing for N >= 2"))

    seps = cfg.prefix_separations()
    sep_ns = np.arange(2, cfg.n + 1)
    sel_s = (sep_ns >= 50) & (sep_ns <= n_max)
    scaled_min = float(np.min(seps[sel_s] * sep_ns[sel_s] ** (1.0 / 3.0)))
    ok = scaled_min > 0.0
    detail = f"min delta*N^(1/3) {scaled_min:.4f}"
    if baselines is not None:
        pinned = baselines["s3_green"]["sep_scaled_min"]
        ok = ok and within(scaled_min, pinned)
        detail += f" (pinned {pinned:.4f})"
    checks.append(_check("s3 green scaled separation", ok, detail))

    pol = green_polarization_margin(cfg)
    sel_p = (pol["n"] >= 50) & (pol["n"] <= n_max)
    p_max = float(np.max(pol["scaled_polarization"][sel_p]))
    ok = bool(pol["all_negative"]) and p_max < 0.0
    detail = f"max P/N^(1/3) {p_max:.4f}"
    if baselines is not None:
        pinned = baselines["s3_green"]["pol_scaled_max"]
        ok = ok and within(p_max, pinned)
        detail += f" (pinned {pinned:.4f})"
    checks.append(_check("s3 green polarization margin", ok, detail))

    # identity at the green tolerance
    e_direct = energy(cfg)
    rel = abs(e_direct - energies[-1]) / abs(e_direct)
    checks.append(_check("green energy-polarization identity", rel <= 1e-6, f"rel {rel:.1e}"))

    # two-point structure: second greedy point is antipodal to the first
    gap = float(np.linalg.norm(cfg.points[1] + cfg.points[0]))
    checks.append(_check("second green point antipodal", gap <= 1e-6, f"|x2 + x1| {gap:.1e}"))
    p1 = cfg.step_values[0]
    g2 = -cap_mean_shift_at_pi(3)
    checks.append(_check("P(w_1) equals g(2)", abs(p1 - g2) <= 1e-9, f"err {abs(p1 - g2):.1e}"))
    return checks


def run_suite(name: str, use_baselines: bool = True) -> list[dict]:
    if name == "kernels":
        return suite_kernels()
    if name == "circle":
        return suite_circle(use_baselines=use_baselines)
    if name == "green":
        return suite_green(use_baselines=use_baselines)
    if name == "separation":
        return suite_separation(use_baselines=use_baselines)
    raise ValueError(f"unknown suite {name!r}; choose from {SUITES}")
