"""Asymptotic diagnostics of greedy runs: residuals, D(N), separation scaling.

Energies of prefixes come from the energy-polarization identity (prefix sums
of the logged step values), separations from cumulative per-step nearest
distances, so a whole run's diagnostics cost O(N) after construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .greedy import Configuration
from .kernels import wiener_for_spec

REPORT_SCHEMA = "greedysphere.report.v1"
CSV_HEADER = "N,energy,residual,normalized_residual,polarization,pol_residual,separation,sep_scaled,d_of_n"


@dataclass(frozen=True)
class AsymptoticsRow:
    n: int
    energy: float
    residual: float
    normalized_residual: float
    polarization: float | None
    pol_residual: float | None
    separation: float
    sep_scaled: float
    d_of_n: float | None


def dyadic_schedule(n_max: int, n_min: int = 2) -> list[int]:
    """Powers of two in range plus both endpoints."""
    out = {n_min, n_max}
    p = 2
    while p <= n_max:
        if p >= n_min:
            out.add(p)
        p *= 2
    return sorted(out)


def separation_exponent_alpha(config: Configuration, n_lo: int = 8) -> float:
    """alpha with delta ~ N^(-1/alpha), from a log-log least-squares fit."""
    seps = config.prefix_separations()
    ns = np.arange(2, config.n + 1)
    keep = ns >= n_lo
    slope = np.polyfit(np.log(ns[keep]), np.log(seps[keep]), 1)[0]
    return -1.0 / slope


def _sep_exponent(spec, d: int) -> float:
    """Scaling exponent for separation: 1/d in the subharmonic range, else 1/(s+1)."""
    s = spec.s_value
    if s is None or s >= d - 2:
        return 1.0 / d
    return 1.0 / (s + 1.0)


def rows_for_config(config: Configuration, schedule: list[int] | None = None) -> list[AsymptoticsRow]:
    """Per-N diagnostics at the scheduled prefix sizes."""
    spec = config.kernel
    d = config.dim
    n_total = config.n
    if schedule is None:
        schedule = dyadic_schedule(n_total)
    schedule = [n for n in schedule if 2 <= n <= n_total]
    energies = config.prefix_energies()
    seps = config.prefix_separations()
    iw = wiener_for_spec(spec)
    s = spec.s_value
    sep_exp = _sep_exponent(spec, d)
    rows = []
    for n in schedule:
        e = float(energies[n - 1])
        resid = e - iw * n * n
        if spec.kind == "green":
            norm_resid = e / n ** (2.0 - 2.0 / d)
            d_of_n = -norm_resid
        elif s == 0.0:
            norm_resid = resid / (n * math.log(n))
            d_of_n = -norm_resid
        else:
            norm_resid = resid / n ** (1.0 + s / d)
            d_of_n = None
        pol = float(config.step_values[n - 1]) if n - 1 < len(config.step_values) else None
        pol_resid = (pol - iw * n) if pol is not None else None
        sep = float(seps[n - 2])
        rows.append(
            AsymptoticsRow(
                n=n,
                energy=e,
                residual=resid,
                normalized_residual=norm_resid,
                polarization=pol,
                pol_residual=pol_resid,
                separation=sep,
                sep_scaled=sep * n**sep_exp,
                d_of_n=d_of_n,
            )
        )
    return rows


def riesz_residuals(config: Configuration, schedule: list[int] | None = None) -> list[AsymptoticsRow]:
    """Diagnostics for Riesz/log runs (schedule defaults to dyadic + endpoints)."""
    if config.kernel.kind == "green":
        raise ValueError("riesz_residuals expects a riesz or log kernel run")
    return rows_for_config(config, schedule)


def green_d_of_n(config: Configuration, schedule: list[int] | None = None) -> list[tuple[int, float]]:
    """D(N) = -E(w_N) / N^(2-2/d) for Green runs on S^d, d >= 3."""
    if config.kernel.kind != "green":
        raise ValueError("green_d_of_n expects a green kernel run")
    if config.dim < 3:
        raise ValueError("green runs are defined for d >= 3 (d = 2 maps to the log kernel)")
    rows = rows_for_config(config, schedule)
    return [(r.n, r.d_of_n) for r in rows]


def separation_scaling(config: Configuration) -> dict:
    """Scaled separation over every prefix, plus a fitted decay exponent."""
    if config.n < 2:
        raise ValueError("separation scaling needs N >= 2")
    d = config.dim
    seps = config.prefix_separations()
    ns = np.arange(2, config.n + 1)
    out = {
        "n": ns,
        "separation": seps,
        "scaled_main": seps * ns ** _sep_exponent(config.kernel, d),
        "scaled_well_separated": seps * ns ** (1.0 / d),
        "duplicate_flag": bool(np.any(seps <= 0.0)),
    }
    s = config.kernel.s_value
    if s is not None and 0.0 < s < d - 2:
        out["scaled_small_s"] = seps * ns ** (1.0 / (s + 1.0))
    if config.n >= 16:
        out["alpha_fit"] = separation_exponent_alpha(config)
    return out


def polarization_bound_check(config: Configuration, n_lo: int = 2) -> dict:
    """Margins of the linear-term polarization upper bound for Riesz runs.

    Reports (I N - P(w_N)) / N^e per prefix, with e = s/d in the subharmonic
    range and e = 1 + (s-d)/alpha otherwise (alpha from the measured
    separation decay). Also evaluates the conditional next-point distance
    law: whenever the polarization stays within C s N^(s/(s+2)) of I N, the
    following greedy point keeps distance B N^(-1/(s+2)) from the prefix.
    """
    spec = config.kernel
    s = spec.s_value
    d = config.dim
    if spec.kind != "riesz" or not (0.0 < s < d):
        raise ValueError("polarization bounds require a riesz kernel with 0 < s < d")
    n_pol = len(config.step_values)
    ns = np.arange(1, n_pol + 1)
    pols = np.asarray(config.step_values, dtype=float)
    iw = wiener_for_spec(spec)
    deficit = iw * ns - pols
    if s >= d - 2:
        exponent = s / d
        regime = "subharmonic"
        alpha = float(d)
    else:
        alpha = separation_exponent_alpha(config) if config.n >= 16 else s + 1.0
        exponent = 1.0 + (s - d) / alpha
        regime = "small_s"
    keep = ns >= n_lo
    margins = deficit[keep] / ns[keep] ** exponent
    # conditional next-point distance law (meaningful for s <= d-2)
    c_meas = float(np.max(deficit[keep] / (s * ns[keep] ** (s / (s + 2.0)))))
    dists = np.asarray(config.meta.get("step_min_dists", []), dtype=float)
    b_meas = None
    if dists.size >= n_pol:
        b_meas = float(np.min(dists[:n_pol][keep] * ns[keep] ** (1.0 / (s + 2.0))))
    return {
        "n": ns[keep],
        "margin": margins,
        "exponent": exponent,
        "regime": regime,
        "alpha": alpha,
        "all_positive": bool(np.all(margins > 0.0)),
        "min_margin": float(np.min(margins)),
        "next_point_c": c_meas,
        "next_point_b": b_meas,
    }


def fit_residual_exponent(config: Configuration, n_lo: int = 32) -> float:
    """Least-squares slope of log|E - I N^2| against log N."""
    energies = config.prefix_energies()
    ns = np.arange(1, config.n + 1)
    iw = wiener_for_spec(config.kernel)
    resid = np.abs(energies - iw * ns.astype(float) ** 2)
    keep = (ns >= n_lo) & (resid > 0)
    return float(np.polyfit(np.log(ns[keep]), np.log(resid[keep]), 1)[0])


# ---------------------------------------------------------------------------
# Report emission (fixed, versioned CSV schema + JSON summary).
# ---------------------------------------------------------------------------


def _fmt(value: float | None) -> str:
    if value is None:
        return ""
    return f"{value:.15g}"


def write_report_csv(rows: list[AsymptoticsRow], path: str) -> None:
    lines = [f"#schema={REPORT_SCHEMA}", CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                [
                    str(r.n),
                    _fmt(r.energy),
                    _fmt(r.residual),
                    _fmt(r.normalized_residual),
                    _fmt(r.polarization),
                    _fmt(r.pol_residual),
                    _fmt(r.separation),
                    _fmt(r.sep_scaled),
                    _fmt(r.d_of_n),
                ]
            )
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_report_csv(path: str) -> list[AsymptoticsRow]:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh.read().splitlines() if ln.strip()]
    if not lines or lines[0] != f"#schema={REPORT_SCHEMA}":
        raise ValueError(f"unsupported or missing report schema in {path}")
    if lines[1] != CSV_HEADER:
        raise ValueError("report header mismatch")
    rows = []
    for ln in lines[2:]:
        parts = ln.split(",")
        vals = [float(p) if p else None for p in parts[1:]]
        rows.append(AsymptoticsRow(int(parts[0]), *vals))
    return rows


def _round15(x):
    if isinstance(x, float):
        return float(f"{x:.15g}")
    if isinstance(x, dict):
        return {k: _round15(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round15(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_round15(float(v)) for v in x]
    if isinstance(x, (np.floating,)):
        return float(f"{float(x):.15g}")
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def summary_for_config(config: Configuration, rows: list[AsymptoticsRow]) -> dict:
    spec = config.kernel
    summary: dict = {
        "schema": "greedysphere.summary.v1",
        "kernel": {"kind": spec.kind, "s": spec.s, "dim": spec.dim},
        "n": config.n,
        "wiener_constant": wiener_for_spec(spec),
        "rows": len(rows),
        "params": config.meta.get("params"),
        "seed": config.meta.get("seed"),
        "version": config.meta.get("version"),
    }
    if config.n >= 64:
        summary["residual_exponent_fit"] = fit_residual_exponent(config)
        summary["separation_alpha_fit"] = separation_exponent_alpha(config)
    if rows and rows[-1].d_of_n is not None:
        summary["d_of_n_last"] = rows[-1].d_of_n
        d_vals = [r.d_of_n for r in rows if r.d_of_n is not None]
        summary["d_of_n_min"] = min(d_vals)
        summary["d_of_n_max"] = max(d_vals)
    return summary


def write_summary_json(summary: dict, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(_round15(summary), fh, indent=2, sort_keys=True)
        fh.write("\n")
