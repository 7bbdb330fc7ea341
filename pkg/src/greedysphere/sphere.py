"""Geometry of the unit sphere S^d: points, caps, candidate meshes, partitions.

All points are unit vectors in R^{d+1} stored as numpy float arrays. Angles
(geodesic distances, cap radii, colatitudes) are in radians; areas are
normalized so the whole sphere has measure 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

UNIT_NORM_TOL = 1e-12

MESH_STRATEGIES = ("fibonacci_s2", "random_uniform")


def as_unit_vector(coords, tol: float = 1e-9) -> np.ndarray:
    """Validate and return a unit vector in R^{d+1}, d >= 1."""
    x = np.asarray(coords, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError(f"expected a vector in R^(d+1) with d >= 1, got shape {x.shape}")
    norm = float(np.linalg.norm(x))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"not a unit vector: |norm - 1| = {abs(norm - 1.0):.3e}")
    return x / norm


def north_pole(d: int) -> np.ndarray:
    x = np.zeros(d + 1)
    x[-1] = 1.0
    return x


def default_start(d: int) -> np.ndarray:
    """Default greedy seed: angle 0 on the circle, north pole otherwise."""
    if d == 1:
        return np.array([1.0, 0.0])
    return north_pole(d)


def random_unit(rng: np.random.Generator, d: int, size: int | None = None) -> np.ndarray:
    """Uniform points on S^d via normalized Gaussian vectors."""
    n = 1 if size is None else size
    v = rng.standard_normal((n, d + 1))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v[0] if size is None else v


def geodesic_distance(x, y) -> float:
    """Great-circle angle between two unit vectors, in [0, pi].

    The inner product is clamped to [-1, 1] before arccos so that rounding
    near coincident or antipodal points cannot produce NaN.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return float(np.arccos(np.clip(np.dot(x, y), -1.0, 1.0)))


def chord_from_geodesic(angle) -> np.ndarray | float:
    return 2.0 * np.sin(np.asarray(angle) / 2.0)


def pairwise_chord_sq(points: np.ndarray) -> np.ndarray:
    """Condensed upper-triangle squared Euclidean distances."""
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    gram = pts @ pts.T
    sq = np.maximum(2.0 - 2.0 * gram, 0.0)
    iu = np.triu_indices(n, k=1)
    return sq[iu]


def separation(points: np.ndarray) -> float:
    """Minimum pairwise Euclidean distance of a configuration (N >= 2)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("separation requires at least 2 points")
    return float(np.sqrt(np.min(pairwise_chord_sq(pts))))


def cap_measure(d: int, a: float) -> float:
    """Normalized measure of a geodesic cap of radius a on S^d.

    Equals the regularized incomplete beta I_x(d/2, d/2) at x = sin^2(a/2);
    for d = 2 this reduces to (1 - cos a)/2, which is returned exactly.
    """
    if d < 1:
        raise ValueError("d >= 1 required")
    if not (0.0 < a <= math.pi):
        raise ValueError(f"cap radius must be in (0, pi], got {a}")
    if d == 2:
        return (1.0 - math.cos(a)) / 2.0
    x = math.sin(a / 2.0) ** 2
    return float(betainc(d / 2.0, d / 2.0, x))


def cap_radius_from_measure(d: int, measure: float) -> float:
    """Inverse of cap_measure; exact for d = 2, bisection otherwise."""
    if not (0.0 < measure <= 1.0):
        raise ValueError("measure must be in (0, 1]")
    if d == 2:
        return math.acos(1.0 - 2.0 * measure)
    lo, hi = 1e-15, math.pi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cap_measure(d, mid) < measure:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class Cap:
    """Geodesic ball on S^d with center a unit vector and radius in (0, pi]."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_unit_vector(self.center))
        if not (0.0 < self.radius <= math.pi):
            raise ValueError(f"cap radius must be in (0, pi], got {self.radius}")

    @property
    def dim(self) -> int:
        return self.center.size - 1

    def contains(self, p) -> bool:
        return geodesic_distance(self.center, p) < self.radius


def fibonacci_sphere(m: int) -> np.ndarray:
    """Spherical Fibonacci lattice on S^2; deterministic, near-uniform covering."""
    if m < 1:
        raise ValueError("m >= 1 required")
    if m == 1:
        return north_pole(2)[None, :]
    i = np.arange(m)
    z = 1.0 - (2.0 * i + 1.0) / m
    r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    golden = (1.0 + math.sqrt(5.0)) / 2.0
    phi = (2.0 * math.pi) * np.mod(i / golden, 1.0)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def candidate_mesh(d: int, m: int, strategy: str = "fibonacci_s2", seed: int = 0) -> np.ndarray:
    """Candidate point set for global minimization over S^d.

    fibonacci_s2 is deterministic and requires d = 2; random_uniform is
    reproducible for a fixed seed and valid for any d >= 1.
    """
    if m < 1:
        raise ValueError("m >= 1 required")
    if strategy == "fibonacci_s2":
        if d != 2:
            raise ValueError("fibonacci_s2 requires d = 2")
        return fibonacci_sphere(m)
    if strategy == "random_uniform":
        rng = np.random.default_rng(seed)
        return random_unit(rng, d, size=m)
    raise ValueError(f"unknown mesh strategy {strategy!r}")


# ---------------------------------------------------------------------------
# Equal-area partition of S^2: polar caps plus collars of equal-longitude cells.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PartitionRegion:
    """Colatitude band x longitude arc on S^2 with exact normalized area."""

    theta_lo: float
    theta_hi: float
    phi_lo: float
    phi_hi: float
    area: float

    def diameter_bound(self) -> float:
        return region_diameter(self)


def _sph(theta: float, phi: float) -> np.ndarray:
    s = math.sin(theta)
    return np.array([s * math.cos(phi), s * math.sin(phi), math.cos(theta)])


def region_diameter(region: PartitionRegion) -> float:
    """Euclidean diameter of a band region, from boundary extreme candidates.

    The diameter of a colatitude-band x longitude-arc region is realized
    between boundary points whose colatitudes lie in {theta_lo, theta_hi,
    pi/2 (if crossed)} and whose longitude gap is min(arc width, pi).
    """
    psi = min(region.phi_hi - region.phi_lo, math.pi)
    thetas = [region.theta_lo, region.theta_hi]
    if region.theta_lo < math.pi / 2.0 < region.theta_hi:
        thetas.append(math.pi / 2.0)
    pts = [_sph(t, 0.0) for t in thetas] + [_sph(t, psi) for t in thetas]
    best = 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            best = max(best, float(np.linalg.norm(pts[i] - pts[j])))
    return best


def _round_with_carry(ideal: np.ndarray, total: int) -> np.ndarray:
    """Round positive ideal cell counts to integers >= 1 summing to total."""
    counts = np.zeros(len(ideal), dtype=int)
    carry = 0.0
    for i, y in enumerate(ideal):
        n = max(1, int(round(y + carry)))
        counts[i] = n
        carry += y - n
    diff = total - int(counts.sum())
    # distribute any leftover to the largest collars, never below 1
    order = np.argsort(-ideal)
    k = 0
    while diff != 0:
        i = order[k % len(order)]
        step = 1 if diff > 0 else -1
        if counts[i] + step >= 1:
            counts[i] += step
            diff -= step
        k += 1
    return counts


def equal_area_partition(n: int) -> list[PartitionRegion]:
    """Partition S^2 into n regions of normalized area exactly 1/n.

    Construction: two polar caps of area 1/n, the remaining band split into
    collars of roughly square aspect, each collar cut into equal longitude
    arcs. Collar boundaries are recomputed from cumulative cell counts so
    every region area is 1/n up to rounding of cos(theta).
    """
    if n < 1:
        raise ValueError("n >= 1 required")
    if n == 1:
        return [PartitionRegion(0.0, math.pi, 0.0, 2.0 * math.pi, 1.0)]
    if n == 2:
        half = math.pi / 2.0
        return [
            PartitionRegion(0.0, half, 0.0, 2.0 * math.pi, 0.5),
            PartitionRegion(half, math.pi, 0.0, 2.0 * math.pi, 0.5),
        ]
    area = 1.0 / n
    theta_c = cap_radius_from_measure(2, area)
    band = math.pi - 2.0 * theta_c
    ideal_height = math.sqrt(4.0 * math.pi / n)
    n_collars = max(1, round(band / ideal_height))
    edges = theta_c + band * np.arange(n_collars + 1) / n_collars
    ideal = n * (np.cos(edges[:-1]) - np.cos(edges[1:])) / 2.0
    counts = _round_with_carry(ideal, n - 2)

    regions = [PartitionRegion(0.0, theta_c, 0.0, 2.0 * math.pi, area)]
    cum = 1
    lo = theta_c
    for n_cells in counts:
        cum += int(n_cells)
        hi = math.acos(max(-1.0, 1.0 - 2.0 * cum / n)) if cum < n - 1 else math.pi - theta_c
        for k in range(int(n_cells)):
            phi_lo = 2.0 * math.pi * k / n_cells
            phi_hi = 2.0 * math.pi * (k + 1) / n_cells
            regions.append(PartitionRegion(lo, hi, phi_lo, phi_hi, area))
        lo = hi
    regions.append(PartitionRegion(math.pi - theta_c, math.pi, 0.0, 2.0 * math.pi, area))
    return regions


def region_area_from_bounds(region: PartitionRegion) -> float:
    """Recompute normalized area from the stored angular bounds."""
    band = (math.cos(region.theta_lo) - math.cos(region.theta_hi)) / 2.0
    return band * (region.phi_hi - region.phi_lo) / (2.0 * math.pi)


def partition_arrays(regions: list[PartitionRegion]) -> dict[str, np.ndarray]:
    """Column arrays of the region bounds, for vectorized sweeps."""
    return {
        "theta_lo": np.array([r.theta_lo for r in regions]),
        "theta_hi": np.array([r.theta_hi for r in regions]),
        "phi_lo": np.array([r.phi_lo for r in regions]),
        "phi_hi": np.array([r.phi_hi for r in regions]),
        "area": np.array([r.area for r in regions]),
    }


def partition_diameters(regions: list[PartitionRegion]) -> np.ndarray:
    """Vectorized version of region_diameter over a whole partition."""
    cols = partition_arrays(regions)
    t_lo, t_hi = cols["theta_lo"], cols["theta_hi"]
    psi = np.minimum(cols["phi_hi"] - cols["phi_lo"], math.pi)
    t_mid = np.clip(math.pi / 2.0, t_lo, t_hi)
    thetas = np.stack([t_lo, t_mid, t_hi], axis=1)  # (n, 3)
    sin_t = np.sin(thetas)
    cos_t = np.cos(thetas)
    # chord^2 between (theta_i, 0) and (theta_j, psi) maximized over candidates
    cos_psi = np.cos(psi)[:, None, None]
    dots = sin_t[:, :, None] * sin_t[:, None, :] * cos_psi + cos_t[:, :, None] * cos_t[:, None, :]
    best = np.sqrt(np.maximum(2.0 - 2.0 * dots.min(axis=(1, 2)), 0.0))
    # vertical chord at equal phi
    vertical = np.sqrt(np.maximum(2.0 - 2.0 * (sin_t[:, 0] * sin_t[:, 2] + cos_t[:, 0] * cos_t[:, 2]), 0.0))
    return np.maximum(best, vertical)


def partition_to_json(regions: list[PartitionRegion]) -> str:
    rows = [
        {
            "theta_lo": r.theta_lo,
            "theta_hi": r.theta_hi,
            "phi_lo": r.phi_lo,
            "phi_hi": r.phi_hi,
            "area": r.area,
        }
        for r in regions
    ]
    return json.dumps(rows)


def sample_region(rng: np.random.Generator, region: PartitionRegion, size: int | None = None) -> np.ndarray:
    """Uniform samples from a band region (z uniform in the band, phi in the arc)."""
    n = 1 if size is None else size
    z = rng.uniform(math.cos(region.theta_hi), math.cos(region.theta_lo), size=n)
    phi = rng.uniform(region.phi_lo, region.phi_hi, size=n)
    r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    pts = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    return pts[0] if size is None else pts


def sample_cap(rng: np.random.Generator, cap: Cap, size: int) -> np.ndarray:
    """Uniform samples from a geodesic cap by rejection from the whole sphere."""
    d = cap.dim
    cos_a = math.cos(cap.radius)
    out = np.empty((size, d + 1))
    filled = 0
    frac = max(cap_measure(d, cap.radius), 1e-12)
    while filled < size:
        batch = max(64, int(1.5 * (size - filled) / frac))
        pts = random_unit(rng, d, size=batch)
        keep = pts @ cap.center > cos_a
        take = min(int(keep.sum()), size - filled)
        out[filled : filled + take] = pts[keep][:take]
        filled += take
    return out
