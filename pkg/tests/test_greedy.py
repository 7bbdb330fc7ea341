import math

import numpy as np
import pytest

from greedysphere.greedy import (
    Configuration,
    build_sequence,
    energy,
    extend_sequence,
    load_checkpoint,
    polarization,
    save_checkpoint,
)
from greedysphere.kernels import KernelSpec
from greedysphere.optimize import SolverParams, angle_of
from greedysphere.sphere import random_unit

CIRCLE_PARAMS = SolverParams(mesh_size=2048, multistart=8)


def test_single_point_sequence():
    k = KernelSpec("log", dim=2)
    cfg = build_sequence(2, k, 1, params=SolverParams(mesh_size=512))
    assert cfg.n == 1
    assert cfg.step_values == []


def test_circle_log_first_steps():
    k = KernelSpec("log", dim=1)
    cfg = build_sequence(1, k, 3, params=CIRCLE_PARAMS)
    a = [angle_of(p) for p in cfg.points]
    assert a[0] == pytest.approx(0.0, abs=1e-15)
    assert a[1] == pytest.approx(math.pi, abs=1e-9)
    assert min(abs(a[2] - math.pi / 2), abs(a[2] - 3 * math.pi / 2)) <= 1e-9
    assert cfg.step_values[0] == pytest.approx(-math.log(2.0), abs=1e-12)


def test_circle_log_dyadic_structure():
    k = KernelSpec("log", dim=1)
    cfg = build_sequence(1, k, 64, params=CIRCLE_PARAMS)
    for m in (2, 4, 8, 16, 32, 64):
        got = np.sort([angle_of(p) for p in cfg.points[:m]])
        want = 2 * math.pi * np.arange(m) / m
        assert np.max(np.abs(got - want)) <= 1e-9


def test_energy_examples():
    k1 = KernelSpec("riesz", dim=2, s=1.0)
    two = Configuration(dim=2, kernel=k1,
                        points=np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]),
                        step_values=[])
    assert energy(two, k1) == pytest.approx(1.0, abs=1e-15)

    klog = KernelSpec("log", dim=1)
    for n in (4, 64, 1024):
        ang = 2 * math.pi * np.arange(n) / n
        cfg = Configuration(dim=1, kernel=klog,
                            points=np.column_stack([np.cos(ang), np.sin(ang)]),
                            step_values=[])
        assert energy(cfg, klog) == pytest.approx(-n * math.log(n), rel=1e-10)


def test_energy_is_double_sum_over_unordered_pairs():
    rng = np.random.default_rng(83)
    k = KernelSpec("riesz", dim=2, s=0.5)
    pts = random_unit(rng, 2, size=9)
    cfg = Configuration(dim=2, kernel=k, points=pts, step_values=[])
    brute = 0.0
    for i in range(9):
        for j in range(i + 1, 9):
            t = float(np.linalg.norm(pts[i] - pts[j]))
            brute += 2.0 * (1.0 / 0.5) * t ** (-0.5)
    assert energy(cfg, k) == pytest.approx(brute, rel=1e-12)


def test_energy_defective_config_is_infinite():
    k = KernelSpec("log", dim=2)
    pts = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]])
    cfg = Configuration(dim=2, kernel=k, points=pts, step_values=[])
    assert energy(cfg, k) == math.inf


def test_energy_polarization_identity_small_runs():
    for kernel, d in (
        (KernelSpec("log", dim=1), 1),
        (KernelSpec("riesz", dim=1, s=0.5), 1),
        (KernelSpec("riesz", dim=2, s=1.0), 2),
        (KernelSpec("log", dim=2), 2),
    ):
        params = CIRCLE_PARAMS if d == 1 else SolverParams(mesh_size=6000, multistart=8)
        cfg = build_sequence(d, kernel, 40, params=params)
        e = energy(cfg, kernel)
        assert e == pytest.approx(cfg.prefix_energies()[-1], rel=1e-8)


def test_polarization_wraps_minimizer():
    k = KernelSpec("riesz", dim=2, s=1.0)
    cfg = Configuration(dim=2, kernel=k, points=np.array([[0.0, 0.0, 1.0]]), step_values=[])
    assert polarization(cfg, k, SolverParams(mesh_size=2000, multistart=6)) == pytest.approx(0.5, abs=1e-10)


def test_prefix_stability():
    k = KernelSpec("log", dim=1)
    a = build_sequence(1, k, 24, params=CIRCLE_PARAMS)
    b = build_sequence(1, k, 48, params=CIRCLE_PARAMS)
    assert np.array_equal(a.points, b.points[:24])
    assert a.step_values == b.step_values[:23]


def test_extend_equals_fresh_build():
    k = KernelSpec("log", dim=1)
    half = build_sequence(1, k, 32, params=CIRCLE_PARAMS)
    full = build_sequence(1, k, 64, params=CIRCLE_PARAMS)
    ext = extend_sequence(half, 32)
    assert np.array_equal(ext.points, full.points)
    assert ext.step_values == full.step_values

    k2 = KernelSpec("riesz", dim=2, s=1.0)
    p2 = SolverParams(mesh_size=4000, multistart=8)
    half2 = build_sequence(2, k2, 20, params=p2)
    full2 = build_sequence(2, k2, 40, params=p2)
    ext2 = extend_sequence(half2, 20)
    assert np.array_equal(ext2.points, full2.points)


def test_extend_by_zero_is_identity():
    k = KernelSpec("log", dim=1)
    cfg = build_sequence(1, k, 8, params=CIRCLE_PARAMS)
    assert extend_sequence(cfg, 0) is cfg


def test_extend_rejects_mismatched_kernel():
    k = KernelSpec("log", dim=1)
    cfg = build_sequence(1, k, 8, params=CIRCLE_PARAMS)
    cfg.meta["kernel"]["s"] = 0.5
    cfg.meta["kernel"]["kind"] = "riesz"
    with pytest.raises(ValueError):
        extend_sequence(cfg, 4)


def test_extend_rejects_mismatched_params():
    k = KernelSpec("log", dim=1)
    cfg = build_sequence(1, k, 8, params=CIRCLE_PARAMS)
    with pytest.raises(ValueError):
        extend_sequence(cfg, 4, params=SolverParams(mesh_size=4096, multistart=3))


def test_checkpoint_roundtrip(tmp_path):
    k = KernelSpec("riesz", dim=2, s=1.0)
    cfg = build_sequence(2, k, 12, params=SolverParams(mesh_size=2000, multistart=6))
    path = str(tmp_path / "run.checkpoint.jsonl")
    save_checkpoint(cfg, path)
    back = load_checkpoint(path)
    assert back.n == cfg.n
    assert np.array_equal(back.points, cfg.points)
    assert back.step_values == cfg.step_values
    assert back.kernel == cfg.kernel
    ext = extend_sequence(back, 4)
    fresh = build_sequence(2, k, 16, params=SolverParams(mesh_size=2000, multistart=6))
    assert np.array_equal(ext.points, fresh.points)


def test_checkpoint_deterministic_bytes(tmp_path):
    k = KernelSpec("log", dim=1)
    p1 = str(tmp_path / "a.jsonl")
    p2 = str(tmp_path / "b.jsonl")
    save_checkpoint(build_sequence(1, k, 16, params=CIRCLE_PARAMS), p1)
    save_checkpoint(build_sequence(1, k, 16, params=CIRCLE_PARAMS), p2)
    assert open(p1, "rb").read() == open(p2, "rb").read()


def test_load_checkpoint_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("")
    with pytest.raises(ValueError):
        load_checkpoint(str(bad))
    bad.write_text('{"schema": "other"}\n')
    with pytest.raises(ValueError):
        load_checkpoint(str(bad))


def test_greedy_equivariance_on_circle():
    # rotating the start point rotates the whole run (grid is anchored at x1)
    k = KernelSpec("log", dim=1)
    base = build_sequence(1, k, 16, params=CIRCLE_PARAMS)
    shift = 0.77
    x1 = np.array([math.cos(shift), math.sin(shift)])
    rot = build_sequence(1, k, 16, x1=x1, params=CIRCLE_PARAMS)
    a = np.sort(np.mod([angle_of(p) for p in base.points], 2 * math.pi))
    b = np.sort(np.mod(np.array([angle_of(p) for p in rot.points]) - shift, 2 * math.pi))
    b = np.where(b > 2 * math.pi - 1e-9, b - 2 * math.pi, b)
    assert np.max(np.abs(np.sort(a) - np.sort(b))) <= 1e-9


def test_green_greedy_second_point_antipodal():
    k = KernelSpec("green", dim=3)
    params = SolverParams(mesh_size=4000, multistart=6, mesh_strategy="random_uniform", seed=5)
    cfg = build_sequence(3, k, 2, params=params)
    assert np.linalg.norm(cfg.points[1] + cfg.points[0]) <= 1e-6


def test_collision_perturbation_recovers(monkeypatch):
    # force the solver to report an existing point; the driver must perturb
    # along the gradient and land on a distinct refined point
    import greedysphere.greedy as greedy_mod
    from greedysphere.optimize import MinResult, minimize_on_mesh as real_min

    k = KernelSpec("riesz", dim=2, s=1.0)
    calls = {"n": 0}

    def colliding(engine, mesh, field, params):
        res = real_min(engine, mesh, field, params)
        calls["n"] += 1
        if calls["n"] == 3:
            return MinResult(point=engine.points[0].copy(), value=res.value,
                             mesh_value=res.mesh_value, refined=True, iterations=0)
        return res

    monkeypatch.setattr(greedy_mod, "minimize_on_mesh", colliding)
    cfg = build_sequence(2, k, 6, params=SolverParams(mesh_size=2000, multistart=6))
    cfg.validate_distinct(tol=1e-9)


def test_meta_records_run_provenance():
    k = KernelSpec("log", dim=1)
    cfg = build_sequence(1, k, 8, params=CIRCLE_PARAMS)
    assert cfg.meta["kernel"]["kind"] == "log"
    assert cfg.meta["params"]["mesh_size"] == 2048
    assert len(cfg.meta["step_min_dists"]) == 7
    assert len(cfg.meta["mesh_gaps"]) == 7
    assert cfg.meta["version"]
