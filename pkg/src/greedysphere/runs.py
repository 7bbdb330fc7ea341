"""Pinned reference runs shared by the verification suites and regression tests.

Every run here is fully determined by its parameters (deterministic meshes
or fixed seeds), so measured constants can be stored in the repository and
re-checked later. Results are cached per process since several suites share
the same run.
"""

from __future__ import annotations

import time
from functools import lru_cache

from .greedy import Configuration, build_sequence
from .kernels import KernelSpec
from .optimize import SolverParams

S2_MESH = 200_000
S3_MESH = 100_000
CIRCLE_N = 4096

#: wall-clock seconds of each reference build, recorded on cache miss
BUILD_SECONDS: dict[str, float] = {}


def _timed(key: str, fn):
    t0 = time.perf_counter()
    out = fn()
    BUILD_SECONDS[key] = time.perf_counter() - t0
    return out


@lru_cache(maxsize=None)
def circle_run(s: float, n: int = CIRCLE_N) -> Configuration:
    """Greedy run on S^1 with one extra point so P(w_n) is logged."""
    kernel = KernelSpec("log", dim=1) if s == 0.0 else KernelSpec("riesz", dim=1, s=s)
    params = SolverParams(mesh_size=8 * (n + 1), multistart=8)
    return _timed(f"circle_s={s:g}_n={n}", lambda: build_sequence(1, kernel, n + 1, params=params))


@lru_cache(maxsize=None)
def s2_log_run(n: int = 2000, mesh_size: int = S2_MESH) -> Configuration:
    kernel = KernelSpec("log", dim=2)
    params = SolverParams(mesh_size=mesh_size, multistart=12)
    return _timed(f"s2_log_n={n}", lambda: build_sequence(2, kernel, n + 1, params=params))


@lru_cache(maxsize=None)
def s2_riesz1_run(n: int = 2000, mesh_size: int = S2_MESH) -> Configuration:
    kernel = KernelSpec("riesz", dim=2, s=1.0)
    params = SolverParams(mesh_size=mesh_size, multistart=12)
    return _timed(f"s2_riesz1_n={n}", lambda: build_sequence(2, kernel, n + 1, params=params))


@lru_cache(maxsize=None)
def s3_green_run(n: int = 500, mesh_size: int = S3_MESH, seed: int = 11) -> Configuration:
    kernel = KernelSpec("green", dim=3)
    params = SolverParams(mesh_size=mesh_size, multistart=12,
                          mesh_strategy="random_uniform", seed=seed)
    return _timed(f"s3_green_n={n}", lambda: build_sequence(3, kernel, n + 1, params=params))
