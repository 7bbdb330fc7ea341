"""Kernel mathematics: Riesz/log kernels, special functions, sphere constants.

The Riesz kernel family is

    K_s(x, y) = (1/s) |x - y|^(-s)   for s != 0,
    K_0(x, y) = -log |x - y|        for s = 0,

with the log kernel treated as the s = 0 member throughout. Coincident
points evaluate to +inf for s >= 0 (so defective configurations propagate
+inf through energy sums) and to 0 for s < 0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import betaln, digamma

KERNEL_KINDS = ("riesz", "log", "green")


@dataclass(frozen=True)
class KernelSpec:
    """Which kernel governs energy, polarization, and gradients."""

    kind: str
    dim: int
    s: float | None = None

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dim >= 1 required")
        if self.kind == "riesz":
            if self.s is None or self.s == 0.0:
                raise ValueError("riesz kernel requires s != 0 (use kind='log' for s = 0)")
        if self.kind == "green" and self.dim < 2:
            raise ValueError("green kernel requires dim >= 2")

    @property
    def s_value(self) -> float | None:
        """Riesz exponent; 0.0 for the log kernel, None for green."""
        if self.kind == "riesz":
            return float(self.s)
        if self.kind == "log":
            return 0.0
        return None

    def validate_for_run(self) -> None:
        """Parameter ranges enforced at run configuration, not evaluation."""
        if self.kind == "riesz" and not (-2.0 < self.s < self.dim):
            raise ValueError(f"riesz runs require -2 < s < d, got s={self.s}, d={self.dim}")

    def label(self) -> str:
        if self.kind == "riesz":
            return f"riesz(s={self.s:g})"
        return self.kind


def riesz_kernel(x, y, s: float) -> float:
    """Pairwise Riesz interaction of two points; +inf at coincidence for s >= 0."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    t2 = max(float(np.dot(x - y, x - y)), 0.0)
    return float(riesz_kernel_sq(np.array([t2]), s)[0])


def riesz_kernel_sq(t2: np.ndarray, s: float) -> np.ndarray:
    """Riesz kernel from squared Euclidean distances, vectorized."""
    t2 = np.asarray(t2, dtype=float)
    with np.errstate(divide="ignore"):
        if s == 0.0:
            return -0.5 * np.log(t2)
        out = (1.0 / s) * np.power(t2, -s / 2.0)
        if s < 0.0:
            return out
        return np.where(t2 > 0.0, out, np.inf)


def riesz_gradient_factor(t2: np.ndarray, s: float) -> np.ndarray:
    """Scalar factor c(t) with grad_x K_s(x,y) = c * (x - y); c = -|x-y|^(-s-2)."""
    t2 = np.asarray(t2, dtype=float)
    with np.errstate(divide="ignore"):
        return -np.power(t2, -(s + 2.0) / 2.0)


def riesz_laplace_beltrami(x, y, s: float, d: int) -> float:
    """Closed-form sphere Laplacian (geometer's sign, -div grad) of K_s at x.

    For s != 0:  -(1/2) |x-y|^(-s-2) (s + 2 + (s + 2 - 2d) <x, y>);
    for s  = 0:  ((d-1) <x, y> - 1) / |x-y|^2.
    Nonpositive off the diagonal whenever s >= d - 2.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dot = float(np.dot(x, y))
    t2 = max(float(np.dot(x - y, x - y)), 0.0)
    if t2 == 0.0:
        raise ValueError("Laplace-Beltrami form undefined at coincident points")
    if s == 0.0:
        return ((d - 1) * dot - 1.0) / t2
    return -0.5 * t2 ** (-(s + 2.0) / 2.0) * (s + 2.0 + (s + 2.0 - 2.0 * d) * dot)


# ---------------------------------------------------------------------------
# Incomplete beta function (continued fraction).
# ---------------------------------------------------------------------------

_FPMIN = 1e-300


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta, by the modified Lentz method."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, 400):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 3e-16:
            return h
    raise RuntimeError("incomplete beta continued fraction failed to converge")


def incomplete_beta(x: float, alpha: float, beta: float) -> float:
    """Unregularized incomplete beta B_x(alpha, beta) = int_0^x t^(a-1)(1-t)^(b-1) dt."""
    if not (0.0 <= x <= 1.0):
        raise ValueError("x must lie in [0, 1]")
    if alpha <= 0.0 or beta <= 0.0:
        raise ValueError("alpha, beta must be positive")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return math.exp(betaln(alpha, beta))
    core = math.exp(alpha * math.log(x) + beta * math.log1p(-x))
    if x < (alpha + 1.0) / (alpha + beta + 2.0):
        return core * _beta_cf(alpha, beta, x) / alpha
    comp = math.exp(betaln(alpha, beta))
    core_sym = math.exp(beta * math.log1p(-x) + alpha * math.log(x))
    return comp - core_sym * _beta_cf(beta, alpha, 1.0 - x) / beta


# ---------------------------------------------------------------------------
# Riemann zeta for real arguments.
# ---------------------------------------------------------------------------


def _eta_accelerated(s: float, terms: int = 48) -> float:
    """Dirichlet eta by Chebyshev-weighted alternating-series acceleration."""
    d = (3.0 + math.sqrt(8.0)) ** terms
    d = (d + 1.0 / d) / 2.0
    b = -1.0
    c = -d
    acc = 0.0
    for k in range(terms):
        c = b - c
        acc += c * (k + 1.0) ** (-s)
        b *= (k + terms) * (k - terms) / ((k + 0.5) * (k + 1.0))
    return acc / d


def zeta(s: float) -> float:
    """Riemann zeta for real s != 1.

    Uses the eta-function acceleration for s > 0 and the functional equation
    for s <= 0 (with zeta(0) = -1/2 handled directly).
    """
    if s == 1.0:
        raise ValueError("zeta has a pole at s = 1")
    if s > 0.0:
        return _eta_accelerated(s) / (1.0 - 2.0 ** (1.0 - s))
    if s == 0.0:
        return -0.5
    return (
        2.0**s
        * math.pi ** (s - 1.0)
        * math.sin(math.pi * s / 2.0)
        * math.gamma(1.0 - s)
        * zeta(1.0 - s)
    )


@dataclass(frozen=True)
class ZetaCoeffs:
    """Taylor coefficients a_0..a_q of (sin(pi z)/(pi z))^(-s) in powers of z^2."""

    s: float
    a: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.a and self.a[0] != 1.0:
            raise ValueError("leading coefficient must be 1")


def sinc_power_coeffs(s: float, q: int) -> ZetaCoeffs:
    """Expansion coefficients of the inverse sinc power.

    log(sin(pi z)/(pi z)) = -sum_{k>=1} zeta(2k)/k z^{2k}, so the target is
    exp(s * sum_k zeta(2k)/k w^k) in w = z^2, built by the standard
    exponential-of-power-series recurrence.
    """
    if q < 0:
        raise ValueError("q >= 0 required")
    b = [s * zeta(2 * k) / k for k in range(1, q + 1)]
    a = [1.0]
    for n in range(1, q + 1):
        a.append(sum(j * b[j - 1] * a[n - j] for j in range(1, n + 1)) / n)
    return ZetaCoeffs(s=s, a=tuple(a))


# ---------------------------------------------------------------------------
# Wiener constants (continuous energy of the uniform measure).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WienerConstant:
    s: float
    d: int
    value: float
    method: str  # "quadrature" or "closed_form"


def wiener_constant(s: float, d: int) -> WienerConstant:
    """Uniform-measure energy I_{s,d} on S^d by adaptive quadrature.

    The kernel depends only on distance, so the double integral reduces to a
    single polar-angle integral; the substitution t = sin^2(theta/2) moves
    the endpoint singularity to an integrable algebraic one at t = 0.
    """
    if d < 1:
        raise ValueError("d >= 1 required")
    if s >= d:
        raise ValueError(f"I_(s,d) diverges for s >= d (s={s}, d={d})")
    norm = math.exp(betaln(d / 2.0, d / 2.0))
    if s == 0.0:

        def integrand(t):
            return (-math.log(2.0) - 0.5 * math.log(t)) * (t * (1.0 - t)) ** (d / 2.0 - 1.0)

    else:
        pref = 2.0 ** (-s) / s

        def integrand(t):
            return pref * t ** ((d - s) / 2.0 - 1.0) * (1.0 - t) ** (d / 2.0 - 1.0)

    with warnings.catch_warnings():
        # roundoff-limited convergence near the endpoint singularity is fine;
        # the returned error estimate is checked against tolerance below
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(integrand, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13, limit=400)
    if err > 1e-10:
        raise RuntimeError(f"Wiener constant quadrature error {err:.2e} above tolerance")
    return WienerConstant(s=s, d=d, value=val / norm, method="quadrature")


def wiener_constant_closed(s: float, d: int) -> WienerConstant:
    """Closed-form I_{s,d}: beta-function ratio (s != 0) or digamma form (s = 0)."""
    if s >= d:
        raise ValueError(f"I_(s,d) diverges for s >= d (s={s}, d={d})")
    if s == 0.0:
        value = -math.log(2.0) - 0.5 * (digamma(d / 2.0) - digamma(d))
    else:
        value = (
            2.0 ** (-s)
            / s
            * math.exp(betaln((d - s) / 2.0, d / 2.0) - betaln(d / 2.0, d / 2.0))
        )
    return WienerConstant(s=s, d=d, value=float(value), method="closed_form")


def wiener_for_spec(spec: KernelSpec) -> float:
    """Leading energy coefficient for a kernel spec; identically 0 for green."""
    if spec.kind == "green":
        return 0.0
    return wiener_constant(spec.s_value, spec.dim).value


# ---------------------------------------------------------------------------
# Closed-form cap means for the log kernel on S^2.
# ---------------------------------------------------------------------------


def log_cap_mean(p0, a: float, p) -> float:
    """Mean of log|p - q| over q in the geodesic cap B(p0, a) on S^2.

    Branches on whether p lies inside the open cap; boundary points resolve
    to the outside branch (the two formulas agree in the limit).
    """
    p0 = np.asarray(p0, dtype=float)
    p = np.asarray(p, dtype=float)
    if p0.size != 3 or p.size != 3:
        raise ValueError("log_cap_mean is defined on S^2 only")
    if not (0.0 < a < math.pi):
        raise ValueError("cap radius must be in (0, pi)")
    dist2 = float(np.dot(p - p0, p - p0))
    angle = math.acos(max(-1.0, min(1.0, float(np.dot(p, p0)))))
    half = a / 2.0
    cot2 = (math.cos(half) / math.sin(half)) ** 2
    if angle >= a:
        return 0.5 * math.log(dist2) - 0.5 - cot2 * math.log(math.cos(half))
    inner = math.log1p(-dist2 / 4.0) if dist2 < 4.0 else -math.inf
    return math.log(2.0) - 0.5 - 0.5 * cot2 * inner + math.log(math.sin(half))
