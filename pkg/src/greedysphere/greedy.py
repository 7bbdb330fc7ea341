"""Greedy energy sequences: construction, bookkeeping, checkpoint/resume.

Each step places the next point at (an approximation of) the global minimum
of the potential of the points placed so far, so the realized step values
are exactly the per-prefix polarizations and the pairwise energy satisfies

    E(w_N) = 2 * sum_{k=1}^{N-1} P(w_k)

up to solver arithmetic. A persistent potential field over the candidate
mesh makes each step O(mesh_size) instead of O(N * mesh_size).
"""

from __future__ import annotations

import json
import math
import os
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import __version__
from .kernels import KernelSpec, riesz_kernel_sq
from .greenfn import GreenKernelTable
from .optimize import (
    MinResult,
    PotentialEngine,
    SolverParams,
    angle_of,
    circle_grid,
    minimize_on_circle,
    minimize_on_mesh,
)
from .sphere import candidate_mesh, default_start, north_pole, pairwise_chord_sq

CHECKPOINT_SCHEMA = "greedysphere.checkpoint.v1"
COLLISION_TOL = 1e-9


@dataclass
class Configuration:
    """Ordered greedy point list with its per-step polarization log."""

    dim: int
    kernel: KernelSpec
    points: np.ndarray  # (N, dim+1)
    step_values: list[float]  # P(w_k) for k = 1..N-1
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != self.dim + 1:
            raise ValueError("points must have shape (N, dim+1)")
        # static (non-greedy) configurations carry no step log
        if len(self.step_values) not in (0, max(self.n - 1, 0)):
            raise ValueError("step_values must have length N-1 (or be empty)")

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    def validate_distinct(self, tol: float = 0.0) -> None:
        if self.n >= 2 and math.sqrt(float(np.min(pairwise_chord_sq(self.points)))) <= tol:
            raise ValueError("configuration contains coincident points")

    def prefix_energies(self) -> np.ndarray:
        """E(w_k) for k = 1..N from the energy-polarization identity.

        Compensated (Neumaier) accumulation: a plain cumsum drifts by
        ~N eps |E|, which is visible against the 1e-9 circle bracket edges.
        """
        out = np.empty(self.n)
        total = 0.0
        comp = 0.0
        out[0] = 0.0
        for k, v in enumerate(self.step_values):
            t = total + v
            if abs(total) >= abs(v):
                comp += (total - t) + v
            else:
                comp += (v - t) + total
            total = t
            out[k + 1] = total + comp
        return 2.0 * out

    def prefix_separations(self) -> np.ndarray:
        """delta(w_k) for k = 2..N (index k-2), from per-step nearest distances."""
        key = "step_min_dists"
        if key in self.meta and len(self.meta[key]) == self.n - 1:
            m = np.asarray(self.meta[key], dtype=float)
        else:
            m = np.empty(self.n - 1)
            for k in range(1, self.n):
                diff = self.points[:k] - self.points[k]
                m[k - 1] = math.sqrt(float(np.min(np.einsum("ij,ij->i", diff, diff))))
        return np.minimum.accumulate(m)


def energy(config: Configuration, kernel: KernelSpec | None = None) -> float:
    """Discrete energy: sum over ordered pairs i != j of kernel values."""
    kernel = kernel or config.kernel
    pts = config.points
    if pts.shape[0] < 2:
        return 0.0
    t2 = pairwise_chord_sq(pts)
    if kernel.kind == "green":
        vals = GreenKernelTable.get(kernel.dim).value(np.sqrt(t2))
        if np.any(t2 <= 0.0):
            return math.inf
    else:
        vals = riesz_kernel_sq(t2, kernel.s_value)
    return float(2.0 * np.sum(vals))


def polarization(config: Configuration, kernel: KernelSpec | None = None,
                 params: SolverParams | None = None) -> float:
    """Global minimum of the configuration's potential over the sphere."""
    from .optimize import minimize_potential

    kernel = kernel or config.kernel
    return minimize_potential(config, kernel, params).value


class _GreedyDriver:
    """Incremental greedy state: mesh, potential field, and bookkeeping."""

    def __init__(self, kernel: KernelSpec, params: SolverParams, x1: np.ndarray):
        self.kernel = kernel
        self.params = params
        self.d = kernel.dim
        self.points: list[np.ndarray] = []
        self.step_values: list[float] = []
        self.step_min_dists: list[float] = []
        self.mesh_gaps: list[float] = []
        self._warned_mesh = False
        if self.d == 1:
            anchor = angle_of(x1)
            self.grid = circle_grid(anchor, max(params.mesh_size, 64))
            self.field = np.zeros(self.grid.shape)
            self.mesh = np.column_stack([np.cos(self.grid), np.sin(self.grid)])
        else:
            self.mesh = candidate_mesh(self.d, params.mesh_size,
                                       params.strategy_for(self.d), seed=params.seed)
            self.field = np.zeros(self.mesh.shape[0])
        self._columns = PotentialEngine(self.kernel, np.zeros((0, self.d + 1)))
        self._append(np.asarray(x1, dtype=float))

    def _engine(self) -> PotentialEngine:
        return PotentialEngine(self.kernel, np.asarray(self.points))

    def _append(self, x: np.ndarray) -> None:
        if self.points:
            diff = np.asarray(self.points) - x[None, :]
            self.step_min_dists.append(math.sqrt(float(np.min(np.einsum("ij,ij->i", diff, diff)))))
        self.points.append(x)
        self.field += self._columns.column(x, self.mesh)

    def step(self) -> None:
        n = len(self.points)
        if not self._warned_mesh and self.field.size < 8 * (n + 1):
            warnings.warn(
                f"mesh_size {self.field.size} below the recommended 8*N while extending to N={n + 1}",
                RuntimeWarning,
                stacklevel=3,
            )
            self._warned_mesh = True
        pts = np.asarray(self.points)
        if self.d == 1:
            angles = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2.0 * math.pi)
            res = minimize_on_circle(angles, self.kernel.s_value, self.params,
                                     grid=self.grid, field=self.field)
        else:
            res = minimize_on_mesh(self._engine(), self.mesh, self.field, self.params)
        x, value = res.point, res.value
        diff = pts - x[None, :]
        nearest = math.sqrt(float(np.min(np.einsum("ij,ij->i", diff, diff))))
        if nearest < COLLISION_TOL:
            if self.d == 1:
                raise RuntimeError(f"greedy step {n + 1}: refined point collides with the configuration")
            engine = self._engine()
            if nearest == 0.0:
                # gradient undefined exactly at a source; nudge off it first
                probe = x + 1e-7 * (north_pole(self.d) if abs(x[-1]) < 0.9 else np.eye(self.d + 1)[0])
                probe /= np.linalg.norm(probe)
            else:
                probe = x
            gt = engine.gradient_tangent(probe)
            x = probe - 1e-6 * gt / max(float(np.linalg.norm(gt)), 1e-30)
            x /= np.linalg.norm(x)
            from .optimize import _refine_pgd

            x, value, _ = _refine_pgd(engine, x, self.params)
            diff = pts - x[None, :]
            nearest = math.sqrt(float(np.min(np.einsum("ij,ij->i", diff, diff))))
            if nearest < COLLISION_TOL:
                raise RuntimeError(
                    f"greedy step {n + 1}: collision persists after perturbation; "
                    "mesh is likely under-resolved"
                )
        self.step_values.append(value)
        self.mesh_gaps.append(res.mesh_value - value)
        self._append(x)

    def to_configuration(self, meta: dict) -> Configuration:
        meta = dict(meta)
        meta["step_min_dists"] = list(self.step_min_dists)
        meta["mesh_gaps"] = list(self.mesh_gaps)
        return Configuration(
            dim=self.d,
            kernel=self.kernel,
            points=np.asarray(self.points),
            step_values=list(self.step_values),
            meta=meta,
        )


def _base_meta(kernel: KernelSpec, params: SolverParams, x1: np.ndarray) -> dict:
    return {
        "kernel": {"kind": kernel.kind, "s": kernel.s, "dim": kernel.dim},
        "params": params.to_dict(),
        "x1": [float(v) for v in x1],
        "seed": params.seed,
        "version": __version__,
    }


def build_sequence(
    d: int,
    kernel: KernelSpec,
    n: int,
    x1: np.ndarray | None = None,
    params: SolverParams | None = None,
) -> Configuration:
    """Greedy sequence of length n starting from x1 (default: north pole)."""
    if n < 1:
        raise ValueError("n >= 1 required")
    if kernel.dim != d:
        raise ValueError("kernel dimension does not match d")
    kernel.validate_for_run()
    params = params or SolverParams()
    x1 = default_start(d) if x1 is None else np.asarray(x1, dtype=float)
    driver = _GreedyDriver(kernel, params, x1)
    for _ in range(n - 1):
        driver.step()
    return driver.to_configuration(_base_meta(kernel, params, x1))


def extend_sequence(config: Configuration, extra: int, params: SolverParams | None = None) -> Configuration:
    """Continue a greedy run; the result matches a fresh run of the full length.

    The stored potential field is replayed point by point in original order,
    so the extension reproduces exactly what an uninterrupted run would do.
    """
    if extra < 0:
        raise ValueError("extra >= 0 required")
    meta = config.meta
    stored = SolverParams(**meta["params"]) if "params" in meta else SolverParams()
    params = params or stored
    if params.to_dict() != stored.to_dict():
        raise ValueError("checkpoint params incompatible with requested params")
    mk = meta.get("kernel")
    if mk is not None:
        if (mk["kind"], mk["s"], mk["dim"]) != (config.kernel.kind, config.kernel.s, config.kernel.dim):
            raise ValueError("checkpoint kernel mismatch")
    if extra == 0:
        return config
    x1 = np.asarray(meta.get("x1", config.points[0]), dtype=float)
    driver = _GreedyDriver(config.kernel, params, x1)
    for k in range(1, config.n):
        driver.step_values.append(config.step_values[k - 1])
        driver.mesh_gaps.append(0.0)
        driver._append(np.asarray(config.points[k], dtype=float))
    stored_gaps = meta.get("mesh_gaps")
    if stored_gaps is not None and len(stored_gaps) == config.n - 1:
        driver.mesh_gaps = list(stored_gaps)
    for _ in range(extra):
        driver.step()
    return driver.to_configuration(_base_meta(config.kernel, params, x1))


# ---------------------------------------------------------------------------
# Checkpoints: JSON lines, one metadata record then one record per point.
# ---------------------------------------------------------------------------


def save_checkpoint(config: Configuration, path: str) -> None:
    """Atomic JSONL checkpoint (write to temp file, then rename)."""
    meta = {
        "schema": CHECKPOINT_SCHEMA,
        "dim": config.dim,
        "kernel": {"kind": config.kernel.kind, "s": config.kernel.s, "dim": config.kernel.dim},
        "n": config.n,
        "x1": config.meta.get("x1", [float(v) for v in config.points[0]]),
        "seed": config.meta.get("seed"),
        "params": config.meta.get("params"),
        "step_min_dists": config.meta.get("step_min_dists"),
        "mesh_gaps": config.meta.get("mesh_gaps"),
        "version": config.meta.get("version", __version__),
    }
    lines = [json.dumps(meta, sort_keys=True)]
    has_steps = len(config.step_values) == config.n - 1
    for i in range(config.n):
        rec = {
            "index": i + 1,
            "coords": [float(v) for v in config.points[i]],
            "step_value": (float(config.step_values[i - 1]) if i >= 1 and has_steps else None),
        }
        lines.append(json.dumps(rec, sort_keys=True))
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def load_checkpoint(path: str) -> Configuration:
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"empty checkpoint {path}")
    meta = json.loads(lines[0])
    if meta.get("schema") != CHECKPOINT_SCHEMA:
        raise ValueError(f"unsupported checkpoint schema {meta.get('schema')!r}")
    kern = meta["kernel"]
    kernel = KernelSpec(kind=kern["kind"], dim=kern["dim"], s=kern["s"])
    points = []
    step_values = []
    for ln in lines[1:]:
        rec = json.loads(ln)
        points.append(rec["coords"])
        # static (non-greedy) configurations checkpoint with null step values
        if rec["index"] >= 2 and rec["step_value"] is not None:
            step_values.append(float(rec["step_value"]))
    if step_values and len(step_values) != len(points) - 1:
        raise ValueError("checkpoint has a partial step-value log")
    cfg_meta = {
        "kernel": kern,
        "params": meta.get("params"),
        "x1": meta.get("x1"),
        "seed": meta.get("seed"),
        "version": meta.get("version"),
    }
    if meta.get("step_min_dists") is not None:
        cfg_meta["step_min_dists"] = meta["step_min_dists"]
    if meta.get("mesh_gaps") is not None:
        cfg_meta["mesh_gaps"] = meta["mesh_gaps"]
    return Configuration(dim=meta["dim"], kernel=kernel, points=np.asarray(points),
                         step_values=step_values, meta=cfg_meta)
