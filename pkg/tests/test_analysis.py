import math

import numpy as np
import pytest

from greedysphere.analysis import (
    AsymptoticsRow,
    dyadic_schedule,
    fit_residual_exponent,
    green_d_of_n,
    polarization_bound_check,
    read_report_csv,
    riesz_residuals,
    rows_for_config,
    separation_scaling,
    summary_for_config,
    write_report_csv,
    write_summary_json,
)
from greedysphere.greedy import build_sequence
from greedysphere.kernels import KernelSpec, wiener_constant
from greedysphere.optimize import SolverParams

CIRCLE_PARAMS = SolverParams(mesh_size=2048, multistart=8)


@pytest.fixture(scope="module")
def circle_log_run():
    return build_sequence(1, KernelSpec("log", dim=1), 129, params=CIRCLE_PARAMS)


@pytest.fixture(scope="module")
def s2_riesz_run():
    return build_sequence(2, KernelSpec("riesz", dim=2, s=1.0), 121,
                          params=SolverParams(mesh_size=8000, multistart=8))


def test_dyadic_schedule():
    assert dyadic_schedule(64) == [2, 4, 8, 16, 32, 64]
    assert dyadic_schedule(100) == [2, 4, 8, 16, 32, 64, 100]
    assert dyadic_schedule(100, n_min=10) == [10, 16, 32, 64, 100]


def test_rows_strictly_increasing_and_consistent(circle_log_run):
    rows = riesz_residuals(circle_log_run)
    ns = [r.n for r in rows]
    assert ns == sorted(set(ns))
    # residual for the log kernel on S^1: I = 0 (to quadrature tolerance),
    # so residual = energy up to I_err * N^2
    for r in rows:
        assert r.residual == pytest.approx(r.energy, abs=1e-11 * r.n**2)
        assert r.d_of_n == pytest.approx(-r.energy / (r.n * math.log(r.n)), abs=1e-11 * r.n)
        # the final prefix has no logged polarization (it needs point N+1)
        assert (r.polarization is not None) == (r.n < circle_log_run.n)
        assert r.sep_scaled == pytest.approx(r.separation * r.n, rel=1e-12)


def test_circle_dyadic_prefixes_hit_bracket_edge(circle_log_run):
    rows = riesz_residuals(circle_log_run, schedule=[2, 4, 8, 16, 32, 64, 128])
    for r in rows:
        lhs = r.energy + r.n * math.log(r.n)
        assert -1e-9 <= lhs <= math.log(4.0 / 3.0) * r.n + 1e-9
        # dyadic prefixes are equally spaced sets: the residual sits at the edge
        assert lhs <= 1e-7


def test_green_d_of_n_requires_green_kernel(circle_log_run):
    with pytest.raises(ValueError):
        green_d_of_n(circle_log_run)


def test_green_d_of_n_two_point_value():
    from greedysphere.greenfn import cap_mean_shift_at_pi
    from greedysphere.greenruns import greedy_green

    cfg = greedy_green(3, 2, params=SolverParams(mesh_size=3000, multistart=6,
                                                 mesh_strategy="random_uniform", seed=5))
    (n2, d2), = green_d_of_n(cfg, schedule=[2])
    want = 2.0 * cap_mean_shift_at_pi(3) / 2 ** (4.0 / 3.0)
    assert n2 == 2
    assert d2 == pytest.approx(want, rel=1e-8)


def test_separation_scaling_well_separated_regime(s2_riesz_run):
    out = separation_scaling(s2_riesz_run)
    assert out["scaled_main"].shape == out["n"].shape
    assert not out["duplicate_flag"]
    assert float(np.min(out["scaled_well_separated"])) > 0.5
    assert 1.5 <= out["alpha_fit"] <= 2.5


def test_polarization_bound_check_s2(s2_riesz_run):
    rep = polarization_bound_check(s2_riesz_run, n_lo=8)
    assert rep["regime"] == "subharmonic"
    assert rep["exponent"] == pytest.approx(0.5)
    assert rep["all_positive"]
    assert rep["next_point_b"] > 0.0


def test_polarization_bound_check_requires_riesz(circle_log_run):
    with pytest.raises(ValueError):
        polarization_bound_check(circle_log_run)


def test_polarization_bound_check_small_s_regime():
    # 0 < s < d-2 on S^3: the exponent comes from the fitted separation decay
    cfg = build_sequence(3, KernelSpec("riesz", dim=3, s=0.5), 48,
                         params=SolverParams(mesh_size=4000, multistart=8,
                                             mesh_strategy="random_uniform", seed=3))
    rep = polarization_bound_check(cfg, n_lo=4)
    assert rep["regime"] == "small_s"
    assert 1.0 < rep["alpha"] < 4.0
    assert rep["exponent"] == pytest.approx(1.0 + (0.5 - 3.0) / rep["alpha"])
    assert rep["all_positive"]


def test_fit_residual_exponent_riesz(s2_riesz_run):
    fit = fit_residual_exponent(s2_riesz_run, n_lo=24)
    assert 1.3 <= fit <= 1.7


def test_circle_log_polarization_bracket(circle_log_run):
    rows = riesz_residuals(circle_log_run, schedule=list(range(2, 128)))
    for r in rows:
        assert -math.log(r.n + 1.0) - 1e-9 <= r.polarization <= 1e-9


def test_report_csv_roundtrip(tmp_path, circle_log_run):
    rows = riesz_residuals(circle_log_run)
    path = str(tmp_path / "report.csv")
    write_report_csv(rows, path)
    with open(path) as fh:
        head = fh.readline().strip()
    assert head == "#schema=greedysphere.report.v1"
    back = read_report_csv(path)
    assert len(back) == len(rows)
    assert back[0].n == rows[0].n
    assert back[-1].energy == pytest.approx(rows[-1].energy, rel=1e-14)


def test_report_csv_rejects_bad_schema(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("N,energy\n2,0.0\n")
    with pytest.raises(ValueError):
        read_report_csv(str(p))


def test_summary_json(tmp_path, s2_riesz_run):
    rows = riesz_residuals(s2_riesz_run)
    summary = summary_for_config(s2_riesz_run, rows)
    assert summary["kernel"]["kind"] == "riesz"
    assert "residual_exponent_fit" in summary
    path = str(tmp_path / "summary.json")
    write_summary_json(summary, path)
    import json

    with open(path) as fh:
        data = json.load(fh)
    assert data["wiener_constant"] == pytest.approx(1.0, abs=1e-10)


def test_energy_row_matches_prefix_identity(s2_riesz_run):
    iw = wiener_constant(1.0, 2).value
    rows = riesz_residuals(s2_riesz_run, schedule=[16, 64, 120])
    pref = s2_riesz_run.prefix_energies()
    for r in rows:
        assert r.energy == pytest.approx(float(pref[r.n - 1]), rel=1e-12)
        assert r.residual == pytest.approx(r.energy - iw * r.n**2, rel=1e-10)
