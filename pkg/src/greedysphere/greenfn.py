"""Green function of the Laplace-Beltrami operator on S^d and its cap means.

The kernel is radial: G(x, y) = g(t) with t = |x - y|, and g is given by a
power series in u = 1 - t^2/4,

    g(t) = (2/(d V_d)) * sum_k c_k [u^(k+1) - B(d/2, d/2+k+1)/B(d/2, d/2)],
    c_k  = (d)_k / ((d/2+1)_k (k+1)),

with V_d the surface volume of S^d. The constant part telescopes exactly:
c_k * B(d/2, d/2+k+1)/B(d/2, d/2) = (d/2) / ((k+1)(k+d)), so its sum is
(d/2) H_(d-1) / (d-1) in terms of harmonic numbers. Three evaluation routes
are provided:

  * the power series with a rigorous geometric tail bound (reference path),
  * a flux/divergence-theorem quadrature, independent of the series, exact
    for all t > 0 and used below the series' practical range,
  * a per-dimension spline table for bulk evaluation inside solvers,
    cross-checked against the series when built.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.interpolate import CubicSpline
from scipy.special import betainc, betaln

MAX_SERIES_TERMS = 2_000_000
SERIES_TOL = 1e-10
# below this chord distance the series needs too many terms; use the flux route
SERIES_T_MIN = 0.02


class GreenSeriesError(RuntimeError):
    """Raised when a series tail bound is not met within the term cap."""


def sphere_volume(d: int) -> float:
    """Surface volume of S^d embedded in R^(d+1)."""
    return 2.0 * math.pi ** ((d + 1) / 2.0) / math.gamma((d + 1) / 2.0)


def _series_constant(d: int) -> float:
    """sum_k c_k B(d/2, d/2+k+1)/B(d/2, d/2) = (d/2) H_(d-1)/(d-1)."""
    if d < 2:
        raise ValueError("d >= 2 required")
    harmonic = sum(1.0 / i for i in range(1, d))
    return (d / 2.0) * harmonic / (d - 1.0)


def cap_mean_shift_at_pi(d: int) -> float:
    """Value of the cap-mean shift at radius pi; equals -g(2)."""
    return 2.0 / (d * sphere_volume(d)) * _series_constant(d)


class _Coefficients:
    """Growable table of series coefficients c_k, cached per dimension."""

    _cache: dict[int, "_Coefficients"] = {}

    def __init__(self, d: int):
        self.d = d
        self.c = np.array([1.0])

    @classmethod
    def get(cls, d: int) -> "_Coefficients":
        if d not in cls._cache:
            cls._cache[d] = cls(d)
        return cls._cache[d]

    def ensure(self, n: int) -> np.ndarray:
        """Grow the table geometrically to hold at least n coefficients."""
        if n > MAX_SERIES_TERMS + 1:
            raise GreenSeriesError(f"series term cap exceeded ({n} > {MAX_SERIES_TERMS})")
        if len(self.c) < n:
            grow_to = min(max(n, 2 * len(self.c)), MAX_SERIES_TERMS + 1)
            k = np.arange(len(self.c) - 1, grow_to - 1, dtype=float)
            ratios = (self.d + k) * (k + 1.0) / ((self.d / 2.0 + 1.0 + k) * (k + 2.0))
            ext = self.c[-1] * np.cumprod(ratios)
            self.c = np.concatenate([self.c, ext])
        return self.c


def _series_sum_sorted(u: np.ndarray, d: int, deriv: bool, tol: float, max_terms: int) -> np.ndarray:
    """sum_k c_k u^(k+1) (or its u-derivative) for ascending u in [0, 1).

    Terms are positive; the tail after term k is bounded by
    term_k * r/(1-r) with r = u (d+k)/(d/2+1+k) (times (k+2)/(k+1) for the
    derivative), since the coefficient-ratio envelope is decreasing in k.
    Entries are retired from the left of the active suffix as soon as their
    bound falls below tol, absolutely or relative to the partial sum.
    """
    coeffs = _Coefficients.get(d)
    n = u.size
    out = np.zeros(n)
    if n == 0:
        return out
    term = u.copy() if not deriv else np.ones_like(u)
    out += term
    k = 0
    lo = 0
    while lo < n:
        env = (d + k) / (d / 2.0 + 1.0 + k)
        if deriv:
            env *= (k + 2.0) / (k + 1.0)
        r = u[lo:] * env
        with np.errstate(divide="ignore", invalid="ignore"):
            bound = np.where(r < 1.0, term[lo:] * r / np.maximum(1.0 - r, 1e-300), np.inf)
        done = bound <= tol * np.maximum(1.0, np.abs(out[lo:]))
        if done.all():
            break
        lo += int(np.argmax(~done))
        if k + 1 > max_terms:
            raise GreenSeriesError(
                f"series tail bound not met within {max_terms} terms (worst u = {u[-1]:.12g})"
            )
        c = coeffs.ensure(k + 2)
        ratio_c = c[k + 1] / c[k]
        if deriv:
            ratio_c *= (k + 2.0) / (k + 1.0)
        term[lo:] *= ratio_c * u[lo:]
        k += 1
        out[lo:] += term[lo:]
    return out


def green_series_t(t, d: int, deriv: bool = False, tol: float = SERIES_TOL,
                   max_terms: int = MAX_SERIES_TERMS) -> np.ndarray:
    """Green kernel (or d/dt) from chord distances by direct series summation."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    pos = t > 0.0
    out = np.full(t.shape, np.inf)
    if np.any(pos):
        tp = t[pos]
        u = np.clip(1.0 - tp * tp / 4.0, 0.0, 1.0 - 1e-16)
        order = np.argsort(u)
        scale = 2.0 / (d * sphere_volume(d))
        s_sorted = _series_sum_sorted(u[order], d, deriv, tol, max_terms)
        s = np.empty_like(s_sorted)
        s[order] = s_sorted
        if deriv:
            # dg/dt = scale * S'(u) * du/dt with du/dt = -t/2
            out[pos] = -0.5 * scale * s * tp
        else:
            out[pos] = scale * (s - _series_constant(d))
    return out


def _boundary_sphere_volume(d: int) -> float:
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def green_radial_derivative(theta, d: int) -> np.ndarray:
    """dG/d(theta) from the divergence theorem: the flux through a cap boundary
    equals cap measure minus 1, so the derivative is available in closed form.

    The complement 1 - sigma is evaluated directly as the symmetric
    incomplete beta at cos^2(theta/2); forming sigma - 1 would cancel
    catastrophically near theta = pi.
    """
    theta = np.asarray(theta, dtype=float)
    comp = betainc(d / 2.0, d / 2.0, np.cos(theta / 2.0) ** 2)
    area = _boundary_sphere_volume(d)
    return -comp / (area * np.sin(theta) ** (d - 1))


def green_flux_t(t: float, d: int) -> float:
    """Green kernel at chord t by integrating the radial derivative from pi.

    Independent of the power series; valid for any t in (0, 2].
    """
    if t <= 0.0:
        return math.inf
    theta = 2.0 * math.asin(min(t / 2.0, 1.0))
    if theta >= math.pi:
        return -cap_mean_shift_at_pi(d)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(lambda p: green_radial_derivative(p, d), theta, math.pi,
                        epsabs=1e-13, epsrel=1e-13, limit=400)
    if err > 1e-9 * max(1.0, abs(val)):
        raise RuntimeError(f"green flux quadrature error {err:.2e}")
    return -cap_mean_shift_at_pi(d) - val


def green_derivative_t(t, d: int) -> np.ndarray:
    """dg/dt; series for moderate-to-large t, flux form near the singularity."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty_like(t)
    small = t < SERIES_T_MIN
    if np.any(~small):
        out[~small] = green_series_t(t[~small], d, deriv=True)
    if np.any(small):
        ts = t[small]
        theta = 2.0 * np.arcsin(np.clip(ts / 2.0, 0.0, 1.0))
        out[small] = green_radial_derivative(theta, d) * 2.0 / np.sqrt(np.maximum(4.0 - ts * ts, 1e-300))
    return out


def green_kernel_t(t, d: int) -> np.ndarray:
    """Green kernel from chord distances; +inf at t = 0."""
    if d < 2:
        raise ValueError("green kernel requires d >= 2")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty_like(t)
    small = (t < SERIES_T_MIN) & (t > 0.0)
    rest = ~small
    if np.any(rest):
        out[rest] = green_kernel_series_or_inf(t[rest], d)
    for i in np.nonzero(small)[0]:
        out[i] = green_flux_t(float(t[i]), d)
    return out


def green_kernel_series_or_inf(t: np.ndarray, d: int) -> np.ndarray:
    return green_series_t(t, d, deriv=False)


def green_kernel(x, y, d: int) -> float:
    """Green kernel between two points of S^d (d >= 2); +inf at coincidence."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    t = float(np.linalg.norm(x - y))
    return float(green_kernel_t(np.array([t]), d)[0])


# ---------------------------------------------------------------------------
# Cap-mean shift (the additive term of the cap mean-value identity).
# ---------------------------------------------------------------------------


def _incomplete_beta_block(a: np.ndarray, b: float, x: float) -> np.ndarray:
    """Unregularized B_x(a, b) for an array of first parameters."""
    return betainc(a, b, x) * np.exp(betaln(a, b))


def _cap_shift_quad(d: int, a: float) -> float:
    """Cap shift near a = pi, via the antipodal source: averaging the kernel
    of the opposite pole over the cap gives shift(a) - shift(pi)."""
    table = GreenKernelTable.get(d)

    def num(theta: float) -> float:
        tau = 2.0 * math.cos(theta / 2.0)
        return float(table.value(np.array([tau]))[0]) * math.sin(theta) ** (d - 1)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(num, 0.0, a, epsabs=1e-12, epsrel=1e-12, limit=400)
        den, _ = quad(lambda th: math.sin(th) ** (d - 1), 0.0, a,
                      epsabs=1e-14, epsrel=1e-14, limit=400)
    if err > 1e-8 * max(1.0, abs(val)):
        raise RuntimeError(f"cap shift quadrature error {err:.2e}")
    return cap_mean_shift_at_pi(d) + val / den


def green_cap_mean_shift(d: int, a: float, tol: float = SERIES_TOL,
                         max_terms: int = MAX_SERIES_TERMS) -> float:
    """Additive shift in the Green cap mean identity for cap radius a on S^d.

    Series of incomplete-beta ratios; the term ratio is bounded by
    x (d+k)/(d/2+1+k) with x = sin^2(a/2), since B_x(a+1, b) <= x B_x(a, b).
    At a = pi the complete-beta ratio telescopes and the closed form is used;
    just below pi the series stalls and an exact quadrature form takes over.
    """
    if d < 2:
        raise ValueError("d >= 2 required")
    if not (0.0 < a <= math.pi):
        raise ValueError("cap radius must be in (0, pi]")
    if a == math.pi:
        return cap_mean_shift_at_pi(d)
    x = math.sin(a / 2.0) ** 2
    if x > 1.0 - 1e-3:
        return _cap_shift_quad(d, a)
    den = float(_incomplete_beta_block(np.array([d / 2.0]), d / 2.0, x)[0])
    scale = 2.0 / (d * sphere_volume(d))
    coeffs = _Coefficients.get(d)
    total = 0.0
    k0 = 0
    block = 4096
    while True:
        k1 = min(k0 + block, max_terms)
        c = coeffs.ensure(k1)
        kk = np.arange(k0, k1, dtype=float)
        numer = _incomplete_beta_block(d / 2.0 + kk + 1.0, d / 2.0, x)
        terms = c[k0:k1] * numer / den
        total += float(np.sum(terms))
        last = float(terms[-1])
        r = x * (d + k1) / (d / 2.0 + 1.0 + k1)
        if r < 1.0 and last * r / (1.0 - r) <= tol * max(1.0, abs(total)):
            return scale * total
        if k1 >= max_terms:
            raise GreenSeriesError(f"cap-mean shift series did not converge (a={a}, d={d})")
        k0 = k1


def log_green_affine(d2_log_value: float) -> float:
    """Affine map sending the log kernel on S^2 to the Green kernel."""
    return d2_log_value / (2.0 * math.pi) - 1.0 / (4.0 * math.pi) + math.log(2.0) / (2.0 * math.pi)


def green_small_t_constant(d: int) -> float:
    """Leading coefficient of g(t) ~ C t^(2-d) as t -> 0, for d >= 3.

    This is the flat-space fundamental-solution constant
    Gamma(d/2) / (2 (d-2) pi^(d/2)); the series, the flux route, and this
    power law all agree numerically.
    """
    if d < 3:
        raise ValueError("the power-law leading term requires d >= 3")
    return math.gamma(d / 2.0) / (2.0 * (d - 2.0) * math.pi ** (d / 2.0))


def green_cap_mean(p0, a: float, p, d: int) -> float:
    """Mean of G(p, .) over the geodesic cap B(p0, a) on S^d.

    Outside the cap the mean is G(p, p0) plus the cap shift; inside it is an
    incomplete-beta ratio times -(G(p, -p0) + shift(pi - a)). Boundary points
    resolve to the outside branch.
    """
    if not (0.0 < a < math.pi):
        raise ValueError("cap radius must be in (0, pi)")
    p0 = np.asarray(p0, dtype=float)
    p = np.asarray(p, dtype=float)
    angle = math.acos(max(-1.0, min(1.0, float(np.dot(p, p0)))))
    if angle >= a:
        return green_kernel(p, p0, d) + green_cap_mean_shift(d, a)
    x_in = math.sin(a / 2.0) ** 2
    x_out = math.cos(a / 2.0) ** 2
    ratio = float(
        _incomplete_beta_block(np.array([d / 2.0]), d / 2.0, x_out)[0]
        / _incomplete_beta_block(np.array([d / 2.0]), d / 2.0, x_in)[0]
    )
    return -ratio * (green_kernel(p, -p0, d) + green_cap_mean_shift(d, math.pi - a))


# ---------------------------------------------------------------------------
# Spline table for bulk kernel evaluation inside solvers.
# ---------------------------------------------------------------------------

TABLE_T_MIN = 1e-4
TABLE_POINTS = 6144
# seam between series-evaluated and flux-chained values during table build;
# kept well above SERIES_T_MIN so the series stays in its fast regime
TABLE_SEAM_T = 0.1


@dataclass
class GreenKernelTable:
    """Per-dimension spline of g and g', accurate to ~1e-10 on [1e-4, 2].

    Splines are fit to f(v) = g(t) t^(d-2) and h(v) = g'(t) t^(d-1) in
    v = log t, which are smooth through the t -> 0 singularity. Values come
    from the series for t >= SERIES_T_MIN and from chained Gauss-Legendre
    integration of the exact radial derivative below it. The table
    self-checks against the series at off-grid points on construction.
    """

    d: int

    _cache: dict[int, "GreenKernelTable"] = None  # type: ignore[assignment]

    def __post_init__(self):
        d = self.d
        v = np.linspace(math.log(TABLE_T_MIN), math.log(2.0), TABLE_POINTS)
        t = np.exp(v)
        t[-1] = 2.0
        g = np.empty_like(t)
        big = t >= TABLE_SEAM_T
        g[big] = green_series_t(t[big], d)
        idx_small = np.nonzero(~big)[0]
        if idx_small.size:
            seam = idx_small[-1] + 1
            theta = 2.0 * np.arcsin(t[: seam + 1] / 2.0)
            nodes, weights = np.polynomial.legendre.leggauss(12)
            a_ = theta[:-1]
            b_ = theta[1:]
            mid = 0.5 * (a_ + b_)[:, None] + 0.5 * (b_ - a_)[:, None] * nodes[None, :]
            vals = green_radial_derivative(mid.ravel(), d).reshape(mid.shape)
            seg = 0.5 * (b_ - a_) * (vals @ weights)
            # chain down from the seam: G(theta_i) = G(theta_{i+1}) - int_i^{i+1} G'
            acc = g[seam]
            for i in range(seam - 1, -1, -1):
                acc = acc - seg[i]
                g[i] = acc
        # derivative grid: differentiated series above the seam, flux form below
        gp = np.empty_like(t)
        gp[big] = green_series_t(t[big], d, deriv=True)
        if idx_small.size:
            th_small = 2.0 * np.arcsin(t[~big] / 2.0)
            gp[~big] = green_radial_derivative(th_small, d) * 2.0 / np.sqrt(4.0 - t[~big] ** 2)
        self._f = CubicSpline(v, g * t ** (d - 2))
        self._h = CubicSpline(v, gp * t ** (d - 1))
        self._check()

    def _check(self, n: int = 40) -> None:
        rng = np.random.default_rng(12345)
        t = np.exp(rng.uniform(math.log(0.05), math.log(2.0), n))
        ref = green_series_t(t, self.d)
        got = self.value(t)
        err = float(np.max(np.abs(got - ref)))
        if err > 1e-9:
            raise RuntimeError(f"green table self-check failed: max err {err:.2e}")

    @classmethod
    def get(cls, d: int) -> "GreenKernelTable":
        if cls._cache is None:
            cls._cache = {}
        if d not in cls._cache:
            cls._cache[d] = cls(d)
        return cls._cache[d]

    def value(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        tc = np.clip(t, TABLE_T_MIN, 2.0)
        out = self._f(np.log(tc)) / tc ** (self.d - 2)
        tiny = t < TABLE_T_MIN
        if np.any(tiny):
            out = np.where(tiny, 0.0, out)
            for i in np.nonzero(tiny)[0].tolist():
                out.flat[i] = green_flux_t(float(t.flat[i]), self.d) if t.flat[i] > 0 else np.inf
        return out

    def derivative(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        tc = np.clip(t, TABLE_T_MIN, 2.0)
        out = self._h(np.log(tc)) / tc ** (self.d - 1)
        tiny = t < TABLE_T_MIN
        if np.any(tiny):
            theta = 2.0 * np.arcsin(np.clip(t, 0.0, 2.0) / 2.0)
            flux = green_radial_derivative(theta, self.d) * 2.0 / np.sqrt(np.maximum(4.0 - t * t, 1e-300))
            out = np.where(tiny, flux, out)
        return out
