"""Global minimization of discrete potentials over S^d.

The workhorse behind polarization values and greedy steps: evaluate the
potential on a candidate mesh, refine the best candidates by projected
gradient descent with Armijo backtracking (step, then renormalize), and
break value ties by lexicographically smallest coordinates. On S^1 the mesh
is replaced by an exact path: a dense angular grid localizes basins and
golden-section search refines them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .kernels import KernelSpec, riesz_kernel_sq, riesz_gradient_factor
from .greenfn import GreenKernelTable, green_series_t, sphere_volume
from .sphere import candidate_mesh

TIE_TOL = 1e-12
COLLISION_TOL = 1e-9


@dataclass(frozen=True)
class SolverParams:
    """Knobs of the global minimizer; defaults suit desk-scale runs."""

    mesh_size: int = 20000
    multistart: int = 12
    grad_tol: float = 1e-10
    max_iters: int = 200
    armijo_c: float = 1e-4
    tie_break: str = "lexicographic_min"
    mesh_strategy: str | None = None  # default chosen by dimension
    seed: int = 0

    def __post_init__(self):
        if self.grad_tol <= 0.0:
            raise ValueError("grad_tol must be positive")
        if not (0.0 < self.armijo_c < 1.0):
            raise ValueError("armijo_c must be in (0, 1)")
        if self.tie_break != "lexicographic_min":
            raise ValueError("only lexicographic_min tie-breaking is supported")

    def strategy_for(self, d: int) -> str:
        if self.mesh_strategy is not None:
            return self.mesh_strategy
        return "fibonacci_s2" if d == 2 else "random_uniform"

    def to_dict(self) -> dict:
        return {
            "mesh_size": self.mesh_size,
            "multistart": self.multistart,
            "grad_tol": self.grad_tol,
            "max_iters": self.max_iters,
            "armijo_c": self.armijo_c,
            "tie_break": self.tie_break,
            "mesh_strategy": self.mesh_strategy,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class MinResult:
    point: np.ndarray
    value: float
    mesh_value: float
    refined: bool
    iterations: int


class PotentialEngine:
    """Vectorized evaluation of sum_j K(x, x_j) and its ambient gradient."""

    def __init__(self, kernel: KernelSpec, points: np.ndarray, exact_green: bool = False):
        self.kernel = kernel
        self.points = np.asarray(points, dtype=float)
        self.s = kernel.s_value
        self._table = None
        self._exact_green = exact_green
        if kernel.kind == "green":
            self._table = GreenKernelTable.get(kernel.dim)

    def _chord_sq_to(self, x: np.ndarray) -> np.ndarray:
        diff = self.points - x[None, :]
        return np.einsum("ij,ij->i", diff, diff)

    def kernel_of_sq(self, t2: np.ndarray) -> np.ndarray:
        if self.kernel.kind == "green":
            t = np.sqrt(np.maximum(t2, 0.0))
            if self._exact_green:
                from .greenfn import green_kernel_t

                return green_kernel_t(t, self.kernel.dim)
            return self._table.value(t)
        return riesz_kernel_sq(t2, self.s)

    def column(self, y: np.ndarray, mesh: np.ndarray) -> np.ndarray:
        """Kernel values from a single source point to every mesh candidate."""
        t2 = np.maximum(2.0 - 2.0 * (mesh @ y), 0.0)
        return self.kernel_of_sq(t2)

    def potential(self, x: np.ndarray) -> float:
        return float(np.sum(self.kernel_of_sq(self._chord_sq_to(x))))

    def potential_many(self, xs: np.ndarray) -> np.ndarray:
        out = np.zeros(xs.shape[0])
        for p in self.points:
            t2 = np.maximum(2.0 - 2.0 * (xs @ p), 0.0)
            out += self.kernel_of_sq(t2)
        return out

    def gradient(self, x: np.ndarray) -> np.ndarray:
        """Ambient gradient of the potential at x (x distinct from sources)."""
        diff = x[None, :] - self.points
        t2 = np.einsum("ij,ij->i", diff, diff)
        if np.any(t2 <= 0.0):
            raise ValueError("gradient undefined at a configuration point")
        if self.kernel.kind == "green":
            t = np.sqrt(t2)
            if self._exact_green:
                gp = green_series_t(t, self.kernel.dim, deriv=True)
            else:
                gp = self._table.derivative(t)
            factors = gp / t
        else:
            factors = riesz_gradient_factor(t2, self.s)
        return factors @ diff

    def gradient_tangent(self, x: np.ndarray) -> np.ndarray:
        g = self.gradient(x)
        return g - np.dot(g, x) * x


def _refine_pgd(engine: PotentialEngine, x0: np.ndarray, params: SolverParams) -> tuple[np.ndarray, float, int]:
    """Projected gradient descent: step along the tangent gradient, renormalize.

    Armijo backtracking guards every move; trial steps warm-start from the
    last accepted step (Barzilai-Borwein scaled when curvature information
    is available), which keeps the line search to a couple of evaluations.
    """
    x = np.asarray(x0, dtype=float).copy()
    f = engine.potential(x)
    iters = 0
    step = 1.0
    prev_x = None
    prev_gt = None
    for _ in range(params.max_iters):
        gt = engine.gradient_tangent(x)
        gn2 = float(np.dot(gt, gt))
        if math.sqrt(gn2) <= params.grad_tol:
            break
        have_bb = False
        if prev_x is not None:
            dx = x - prev_x
            dg = gt - prev_gt
            dgg = float(np.dot(dx, dg))
            if dgg > 0.0:
                step = float(np.dot(dx, dx)) / dgg
                have_bb = True
        if not have_bb:
            step *= 2.0
        step = min(max(step, 1e-12), 1e6)
        accepted = False
        fn = f
        for _ in range(80):
            xn = x - step * gt
            xn /= np.linalg.norm(xn)
            fn = engine.potential(xn)
            if fn <= f - params.armijo_c * step * gn2:
                accepted = True
                break
            step *= 0.5
        iters += 1
        if not accepted:
            break
        prev_x, prev_gt = x, gt
        stalled = (f - fn) <= 1e-15 * max(1.0, abs(f))
        x, f = xn, fn
        if stalled:
            break
    return x, f, iters


def _lex_key(point: np.ndarray) -> tuple:
    """Coordinates quantized to 1e-9 (with exact values as a fallback), so the
    lexicographic tie-break is not driven by solver noise."""
    return (tuple(np.round(point, 9)), tuple(point))


def _lexicographic_best(candidates: list[tuple[float, np.ndarray]]) -> tuple[np.ndarray, float]:
    """Pick the smallest value; ties within TIE_TOL go to the smallest coords."""
    best_val = min(c[0] for c in candidates)
    tied = [c for c in candidates if c[0] <= best_val + TIE_TOL]
    tied.sort(key=lambda c: _lex_key(c[1]))
    val, point = tied[0]
    return point, val


def _select_starts(mesh: np.ndarray, field: np.ndarray, params: SolverParams, d: int) -> np.ndarray:
    """Best mesh candidates, thinned so multistarts cover distinct basins."""
    finite = np.isfinite(field)
    if not finite.any():
        raise RuntimeError("all mesh candidates coincide with configuration points")
    k_pool = min(field.size, max(4 * params.multistart, params.multistart + 4))
    pool = np.argpartition(field, k_pool - 1)[:k_pool]
    pool = pool[np.argsort(field[pool], kind="stable")]
    pool = pool[np.isfinite(field[pool])]
    # thin to ~2x the mesh spacing so multistarts cover distinct basins
    r = 2.0 * (sphere_volume(d) / mesh.shape[0]) ** (1.0 / d)
    r2 = r * r
    chosen: list[int] = []
    for idx in pool:
        if len(chosen) >= params.multistart:
            break
        p = mesh[idx]
        ok = True
        for j in chosen:
            gap = p - mesh[j]
            if float(np.dot(gap, gap)) < r2:
                ok = False
                break
        if ok:
            chosen.append(int(idx))
    return np.asarray(chosen, dtype=int)


def minimize_on_mesh(
    engine: PotentialEngine,
    mesh: np.ndarray,
    field: np.ndarray,
    params: SolverParams,
) -> MinResult:
    """Mesh + multistart + local refinement given a precomputed potential field."""
    starts = _select_starts(mesh, field, params, engine.kernel.dim)
    mesh_value = float(np.min(field[starts]))
    candidates = []
    total_iters = 0
    for idx in starts:
        x, f, iters = _refine_pgd(engine, mesh[idx], params)
        total_iters += iters
        candidates.append((f, x))
    point, value = _lexicographic_best(candidates)
    value = min(value, mesh_value)
    return MinResult(point=point, value=value, mesh_value=mesh_value, refined=True, iterations=total_iters)


# ---------------------------------------------------------------------------
# Exact 1-D path on the circle.
# ---------------------------------------------------------------------------

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def circle_potential(angles: np.ndarray, s: float, phi) -> np.ndarray | float:
    """Potential of sources at given angles, evaluated at angle(s) phi."""
    phi_arr = np.atleast_1d(np.asarray(phi, dtype=float))
    t2 = 2.0 - 2.0 * np.cos(phi_arr[:, None] - angles[None, :])
    vals = riesz_kernel_sq(np.maximum(t2, 0.0), s).sum(axis=1)
    return vals if np.ndim(phi) else float(vals[0])


def circle_potential_derivative(angles: np.ndarray, s: float, phi: float) -> float:
    """d/dphi of the circle potential (any s, including the log kernel)."""
    diff = phi - angles
    t = 2.0 * np.abs(np.sin(diff / 2.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        fp = -np.power(t, -s - 1.0)
    return float(np.sum(fp * np.cos(diff / 2.0) * np.sign(np.sin(diff / 2.0))))


def _circle_grad_curv(angles: np.ndarray, s: float, phi: float) -> tuple[float, float]:
    """First and second derivative of the circle potential in one pass.

    With t = 2|sin((phi-a)/2)|:  P' = sum -t^(-s-1) cos((phi-a)/2) sgn,
    P'' = sum (s+1) t^(-s-2) cos^2((phi-a)/2) + t^(-s)/4.
    """
    diff = phi - angles
    half = diff / 2.0
    sin_h = np.sin(half)
    cos_h = np.cos(half)
    t = 2.0 * np.abs(sin_h)
    with np.errstate(divide="ignore", invalid="ignore"):
        tp = np.power(t, -s - 2.0)
    grad = float(np.sum(-tp * t * cos_h * np.sign(sin_h)))
    curv = float(np.sum((s + 1.0) * tp * cos_h * cos_h + tp * t * t / 4.0))
    return grad, curv


def _refine_circle_basin(angles: np.ndarray, s: float, phi0: float, h: float) -> float:
    """Safeguarded Newton for the basin minimum near grid angle phi0.

    The derivative brackets the minimum with a sign change; Newton steps are
    accepted only inside the bracket, bisection otherwise, so convergence is
    guaranteed and typically takes a handful of iterations.
    """
    lo, hi = phi0 - h, phi0 + h
    glo = circle_potential_derivative(angles, s, lo)
    ghi = circle_potential_derivative(angles, s, hi)
    if not (glo < 0.0 < ghi):
        lo, hi = phi0 - 2.0 * h, phi0 + 2.0 * h
        glo = circle_potential_derivative(angles, s, lo)
        ghi = circle_potential_derivative(angles, s, hi)
        if not (glo < 0.0 < ghi):
            return phi0
    x = phi0
    for _ in range(80):
        g, curv = _circle_grad_curv(angles, s, x)
        if g < 0.0:
            lo = x
        else:
            hi = x
        if hi - lo <= 1e-14:
            break
        if curv > 0.0 and math.isfinite(g):
            x_next = x - g / curv
        else:
            x_next = 0.5 * (lo + hi)
        if not (lo < x_next < hi):
            x_next = 0.5 * (lo + hi)
        if abs(x_next - x) <= 5e-16 * max(1.0, abs(x)):
            x = x_next
            break
        x = x_next
    return 0.5 * (lo + hi) if hi - lo <= 1e-14 else x


def _golden_section(f, a: float, b: float, tol: float = 1e-12) -> tuple[float, float]:
    c = b - _INVPHI * (b - a)
    d_ = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d_)
    while (b - a) > tol:
        if fc < fd:
            b, d_, fd = d_, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d_, fd
            d_ = a + _INVPHI * (b - a)
            fd = f(d_)
    x = c if fc < fd else d_
    return (x, fc if fc < fd else fd)


def circle_grid(anchor: float, m: int) -> np.ndarray:
    """Uniform angular grid anchored at a configuration angle (equivariant)."""
    return np.mod(anchor + 2.0 * math.pi * np.arange(m) / m, 2.0 * math.pi)


def minimize_on_circle(
    angles: np.ndarray,
    s: float,
    params: SolverParams,
    grid: np.ndarray | None = None,
    field: np.ndarray | None = None,
) -> MinResult:
    """Grid localization plus golden-section refinement on S^1."""
    angles = np.asarray(angles, dtype=float)
    if grid is None:
        m = max(params.mesh_size, 8 * len(angles), 64)
        grid = circle_grid(float(angles[0]), m)
    if field is None:
        field = np.zeros(grid.shape)
        for a in angles:
            t2 = np.maximum(2.0 - 2.0 * np.cos(grid - a), 0.0)
            field = field + riesz_kernel_sq(t2, s)
    m = grid.size
    finite = np.isfinite(field)
    if not finite.any():
        raise RuntimeError("all grid candidates coincide with configuration points")
    # local minima of the periodic field; refine the best `multistart` basins
    left = np.roll(field, 1)
    right = np.roll(field, -1)
    is_min = (field <= left) & (field <= right) & finite
    idx_min = np.nonzero(is_min)[0]
    order = idx_min[np.argsort(field[idx_min], kind="stable")]
    take = [int(i) for i in order[: params.multistart]]
    h = 2.0 * math.pi / m
    mesh_value = float(field[order[0]])

    def f_scalar(phi: float) -> float:
        return circle_potential(angles, s, phi)

    candidates = []
    for i in take:
        phi0 = grid[i]
        x = _refine_circle_basin(angles, s, float(phi0), h)
        candidates.append((f_scalar(x), np.array([math.cos(x), math.sin(x)])))
    candidates.append((mesh_value, np.array([math.cos(grid[order[0]]), math.sin(grid[order[0]])])))
    point, value = _lexicographic_best(candidates)
    # exactly rounded value for the winner, with the cancellation-free
    # distance form: greedy prefix sums inherit every step's rounding
    phi_win = math.atan2(point[1], point[0])
    t2 = (2.0 * np.sin((phi_win - angles) / 2.0)) ** 2
    value = math.fsum(riesz_kernel_sq(t2, s).tolist())
    return MinResult(point=point, value=value, mesh_value=mesh_value, refined=True, iterations=len(take))


def angle_of(point: np.ndarray) -> float:
    return float(np.mod(math.atan2(point[1], point[0]), 2.0 * math.pi))


# ---------------------------------------------------------------------------
# Public operations on configurations.
# ---------------------------------------------------------------------------


def _points_of(config) -> np.ndarray:
    pts = getattr(config, "points", config)
    return np.asarray(pts, dtype=float)


def potential(config, kernel: KernelSpec, x) -> float:
    """Total potential sum_j K(x, x_j); +inf if x coincides with a source (s >= 0)."""
    pts = _points_of(config)
    if pts.shape[0] == 0:
        raise ValueError("potential of an empty configuration")
    engine = PotentialEngine(kernel, pts, exact_green=True)
    return engine.potential(np.asarray(x, dtype=float))


def potential_gradient(config, kernel: KernelSpec, x) -> np.ndarray:
    """Tangential gradient of the potential at x (term-wise differentiated kernels)."""
    pts = _points_of(config)
    if pts.shape[0] == 0:
        raise ValueError("potential of an empty configuration")
    engine = PotentialEngine(kernel, pts, exact_green=True)
    return engine.gradient_tangent(np.asarray(x, dtype=float))


def minimize_potential(
    config,
    kernel: KernelSpec,
    params: SolverParams | None = None,
    mesh: np.ndarray | None = None,
    field: np.ndarray | None = None,
) -> MinResult:
    """Approximate global minimizer of the potential of a configuration."""
    pts = _points_of(config)
    n = pts.shape[0]
    if n == 0:
        raise ValueError("cannot minimize the potential of an empty configuration")
    params = params or SolverParams()
    d = kernel.dim
    if pts.shape[1] != d + 1:
        raise ValueError("kernel dimension does not match configuration")
    if params.mesh_size < 8 * n:
        warnings.warn(
            f"mesh_size {params.mesh_size} below the recommended 8*N = {8 * n}",
            RuntimeWarning,
            stacklevel=2,
        )
    if d == 1:
        s = kernel.s_value
        if s is None:
            raise ValueError("green kernel is not defined on S^1")
        angles = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2.0 * math.pi)
        grid = None
        if mesh is not None:
            grid = np.mod(np.arctan2(mesh[:, 1], mesh[:, 0]), 2.0 * math.pi)
        return minimize_on_circle(angles, s, params, grid=grid, field=field)
    engine = PotentialEngine(kernel, pts)
    if mesh is None:
        mesh = candidate_mesh(d, params.mesh_size, params.strategy_for(d), seed=params.seed)
    if field is None:
        field = engine.potential_many(mesh)
    return minimize_on_mesh(engine, mesh, field, params)
