"""Monotone quantities and convergence diagnostics along a flow run.

The headline series is min over the body of (exterior ball curvature)/F,
which is non-decreasing along convex runs with inverse-concave speeds; its
interior counterpart max (interior ball curvature)/F is non-increasing for
concave speeds.  Roundness diagnostics compare the radii against the
shrinking-sphere law sqrt(2(T_hat - t)) and measure the rescaled Hausdorff
distance to the unit sphere.

Trend assertions carry explicit slack: an absolute floor plus, where the
caller provides one, a measured grid-refinement delta.  The continuum
statements are exact; the honest discrete statement is monotone up to
discretisation.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DiagonalWitness, DomainError, RunTooShort
from .flow import REACHED_MAX_F, FlowRun
from .geometry import (BallCurvatureField, ConvexBody, ball_curvature_field,
                       hausdorff_to_unit_sphere, principal_radii,
                       tangent_plane_diagnostic)
from .speeds import SpeedFunction

SLACK_FLOOR = 1e-6  # absolute measurement-noise floor for interval/refinement checks


@dataclass
class RatioExtremes:
    min_ratio_lower: float   # min over the grid of k_lower / F
    max_ratio_upper: float   # max over the grid of k_upper / F
    k0_now: float            # alias of min_ratio_lower
    K0_now: float            # alias of max_ratio_upper
    argmin_index: int
    argmax_index: int


def ratios(body: ConvexBody, fld: BallCurvatureField, speed: SpeedFunction) -> RatioExtremes:
    F = speed.value_many(1.0 / principal_radii(body))
    if F.min() <= 0.0:
        raise DomainError("speed must be positive on the body")
    lower = fld.k_lower / F
    upper = fld.k_upper / F
    i_lo = int(np.argmin(lower))
    i_hi = int(np.argmax(upper))
    return RatioExtremes(
        min_ratio_lower=float(lower[i_lo]),
        max_ratio_upper=float(upper[i_hi]),
        k0_now=float(lower[i_lo]),
        K0_now=float(upper[i_hi]),
        argmin_index=i_lo,
        argmax_index=i_hi,
    )


def phi(series: Sequence[float], sigma: int, eta: float,
        times: Optional[Sequence[float]] = None) -> np.ndarray:
    """Comparison transform exp(2 sigma eta t) (series - 1/eta).

    For sigma = 0 the exponential factor and the constant drop out of any
    monotonicity statement, so the convention is phi = series unchanged.
    """
    s = np.asarray(series, dtype=float)
    if sigma == 0:
        return s.copy()
    if eta <= 0.0:
        raise ValueError("eta must be positive")
    t = np.arange(len(s), dtype=float) if times is None else np.asarray(times, dtype=float)
    return np.exp(2.0 * sigma * eta * t) * (s - 1.0 / eta)


def eta_default(sigma: int, speed: SpeedFunction,
                kappa_samples: Optional[np.ndarray] = None) -> float:
    """Ambient-dependent comparison rate: spherical runs need eta >= max tr(dF)
    over the relevant curvature range, hyperbolic runs may take eta = 1 for
    concave speeds."""
    if sigma == 1:
        if kappa_samples is None:
            raise ValueError("sigma=1 needs curvature samples to bound tr(dF)")
        return float(speed.grad_many(np.asarray(kappa_samples, dtype=float)).sum(axis=1).max())
    return 1.0


@dataclass
class TrendVerdict:
    series: str
    claim: str                       # "non-decreasing" | "non-increasing" | "converges-to"
    slack_used: float
    passed: bool
    worst_violation: tuple           # (t or index, amount)
    limit: Optional[float] = None
    tail_tol: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "series": self.series,
            "claim": self.claim if self.limit is None
            else f"converges-to({self.limit:g}, {self.tail_tol:g})",
            "slack_used": self.slack_used,
            "pass": self.passed,
            "worst_violation": list(self.worst_violation),
        }


def assert_trend(series: Sequence[float], claim: str, slack: float,
                 name: str = "series", times: Optional[Sequence[float]] = None,
                 limit: Optional[float] = None, tail_tol: Optional[float] = None) -> TrendVerdict:
    """Check a monotonicity or convergence claim against successive samples."""
    s = np.asarray(series, dtype=float)
    if s.size < 3:
        raise ValueError("need at least 3 samples")
    t = np.arange(s.size, dtype=float) if times is None else np.asarray(times, dtype=float)
    if claim in ("non-decreasing", "non-increasing"):
        diffs = np.diff(s)
        viol = -diffs if claim == "non-decreasing" else diffs
        i = int(np.argmax(viol))
        worst = float(viol[i])
        return TrendVerdict(series=name, claim=claim, slack_used=slack,
                            passed=bool(worst <= slack),
                            worst_violation=(float(t[i + 1]), worst))
    if claim == "converges-to":
        if limit is None or tail_tol is None:
            raise ValueError("converges-to needs limit and tail_tol")
        tail = max(1, s.size // 5)
        dev = np.abs(s[-tail:] - limit)
        i = int(np.argmax(dev))
        worst = float(dev[i])
        return TrendVerdict(series=name, claim=claim, slack_used=slack,
                            passed=bool(worst <= tail_tol + slack),
                            worst_violation=(float(t[s.size - tail + i]), worst),
                            limit=limit, tail_tol=tail_tol)
    raise ValueError(f"unknown claim {claim!r}")


# ---------------------------------------------------------------------------
# Monitor rows
# ---------------------------------------------------------------------------

@dataclass
class MonitorRow:
    t: float
    max_f: float
    min_f: float
    r_plus: float
    r_minus: float
    min_ratio_lower: Optional[float] = None
    max_ratio_upper: Optional[float] = None
    hausdorff_rescaled: Optional[float] = None
    t_hat_lo: float = 0.0
    t_hat_hi: float = 0.0
    phi: Optional[float] = None
    diag_residual: Optional[float] = None


CSV_COLUMNS = ["t", "maxF", "minF", "r_plus", "r_minus", "min_ratio_lower",
               "max_ratio_upper", "hausdorff_rescaled", "T_hat_lo", "T_hat_hi",
               "phi", "diag_residual"]


def monitor_rows(run: FlowRun, speed: SpeedFunction, fields: bool = True,
                 diagnostics: bool = True) -> list[MonitorRow]:
    """One row per snapshot.  fields=False skips the ball-curvature sweeps
    (ratio, phi, and tangent-residual columns stay empty)."""
    rows = []
    for i, body in enumerate(run.snapshots):
        row = MonitorRow(
            t=run.times[i], max_f=run.max_f[i], min_f=run.min_f[i],
            r_plus=run.r_plus[i], r_minus=run.r_minus[i],
            t_hat_lo=run.t_hat_lo[i], t_hat_hi=run.t_hat_hi[i],
        )
        if fields:
            fld = ball_curvature_field(body)
            ext = ratios(body, fld, speed)
            row.min_ratio_lower = ext.min_ratio_lower
            row.max_ratio_upper = ext.max_ratio_upper
            row.phi = ext.min_ratio_lower  # Euclidean convention (sigma = 0)
            if diagnostics and not fld.diagonal_lower(ext.argmin_index):
                try:
                    row.diag_residual = tangent_plane_diagnostic(body, fld, ext.argmin_index)
                except DiagonalWitness:  # pragma: no cover
                    pass
        rows.append(row)

    if run.termination == REACHED_MAX_F and rows:
        t_hat = run.t_hat
        p = run.in_centers[-1]
        for i, body in enumerate(run.snapshots):
            s = np.sqrt(max(2.0 * (t_hat - run.times[i]), 0.0))
            if s > 0.0:
                center_local = p - body.center_offset
                rescaled = ConvexBody(mode=body.mode, h=body.h / s, t=body.t)
                rows[i].hausdorff_rescaled = hausdorff_to_unit_sphere(
                    rescaled, center_local / s)
    return rows


def write_monitor_csv(rows: Sequence[MonitorRow], path: str) -> None:
    def fmt(x):
        return "" if x is None else repr(float(x))

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow([fmt(r.t), fmt(r.max_f), fmt(r.min_f), fmt(r.r_plus),
                        fmt(r.r_minus), fmt(r.min_ratio_lower), fmt(r.max_ratio_upper),
                        fmt(r.hausdorff_rescaled), fmt(r.t_hat_lo), fmt(r.t_hat_hi),
                        fmt(r.phi), fmt(r.diag_residual)])


# ---------------------------------------------------------------------------
# Roundness diagnostics
# ---------------------------------------------------------------------------

@dataclass
class RoundnessReport:
    times: np.ndarray
    ratio: np.ndarray              # r_plus / r_minus
    lower_rescaled: np.ndarray     # r_minus / sqrt(2 (T_hat - t))
    upper_rescaled: np.ndarray     # r_plus  / sqrt(2 (T_hat - t))
    center_drift: np.ndarray       # |p - p_t| / sqrt(2 (T_hat - t))
    hausdorff_rescaled: np.ndarray
    t_hat: float
    t_hat_width: float
    sandwich_ok: bool
    sandwich_worst: float          # worst signed violation in the squared domain


def roundness(run: FlowRun, rows: Optional[Sequence[MonitorRow]] = None) -> RoundnessReport:
    """Rescaled-roundness series for a run that terminated at the max-F stop.

    The sandwich r_minus <= sqrt(2(T_hat - t)) <= r_plus is checked in the
    squared domain with slack = the final interval width (T_hat is only known
    to half that width).
    """
    if run.termination != REACHED_MAX_F:
        raise RunTooShort(f"roundness needs a ReachedMaxF run, got {run.termination!r}")
    m = len(run.times)
    if m < 10:
        raise RunTooShort(f"need at least 10 samples, have {m}")
    t = np.asarray(run.times)
    rp = np.asarray(run.r_plus)
    rm = np.asarray(run.r_minus)
    t_hat = run.t_hat
    width = run.t_hat_width
    rem = 2.0 * (t_hat - t)
    s = np.sqrt(np.maximum(rem, 0.0))
    p = run.in_centers[-1]
    drift = np.array([np.linalg.norm(p - c) for c in run.in_centers])

    slack = width + SLACK_FLOOR
    lo_viol = (rm**2 - rem).max()
    hi_viol = (rem - rp**2).max()
    worst = float(max(lo_viol, hi_viol))

    if rows is not None and all(r.hausdorff_rescaled is not None for r in rows):
        hd = np.array([r.hausdorff_rescaled for r in rows])
    else:
        hd = np.full(m, np.nan)
        for i, body in enumerate(run.snapshots):
            if s[i] > 0.0:
                center_local = p - body.center_offset
                rescaled = ConvexBody(mode=body.mode, h=body.h / s[i], t=body.t)
                hd[i] = hausdorff_to_unit_sphere(rescaled, center_local / s[i])

    with np.errstate(divide="ignore", invalid="ignore"):
        return RoundnessReport(
            times=t, ratio=rp / rm,
            lower_rescaled=np.where(s > 0, rm / s, np.nan),
            upper_rescaled=np.where(s > 0, rp / s, np.nan),
            center_drift=np.where(s > 0, drift / s, np.nan),
            hausdorff_rescaled=hd,
            t_hat=t_hat, t_hat_width=width,
            sandwich_ok=bool(worst <= slack),
            sandwich_worst=worst,
        )


# ---------------------------------------------------------------------------
# Run-level verdicts
# ---------------------------------------------------------------------------

def run_verdicts(run: FlowRun, rows: Sequence[MonitorRow],
                 slack_floor: float = 1e-4,
                 refinement_delta_ratio_lower: float = 0.0,
                 refinement_delta_radii_ratio: float = 0.0) -> dict:
    """Trend verdicts and improvement gates for one run.

    Slacks follow the monitor model: absolute floor plus a measured N->2N
    discretisation delta supplied by the caller (0 when not measured).
    """
    t = np.asarray(run.times)
    verdicts = []
    gates: dict = {"maxF_growth": run.max_f[-1] / run.max_f[0]}

    have_fields = all(r.min_ratio_lower is not None for r in rows)
    if have_fields and len(rows) >= 3:
        lower = [r.min_ratio_lower for r in rows]
        upper = [r.max_ratio_upper for r in rows]
        verdicts.append(assert_trend(
            lower, "non-decreasing", slack_floor + refinement_delta_ratio_lower,
            name="min_ratio_lower", times=t))
        verdicts.append(assert_trend(
            upper, "non-increasing", slack_floor + refinement_delta_ratio_lower,
            name="max_ratio_upper", times=t))
        gates["delta_lower_final"] = 1.0 - lower[-1]
        gates["eps_upper_final"] = upper[-1] - 1.0

    if len(run.times) >= 3:
        verdicts.append(assert_trend(
            run.r_plus, "non-increasing", SLACK_FLOOR, name="r_plus", times=t))
        rr = np.asarray(run.r_plus) / np.asarray(run.r_minus)
        verdicts.append(assert_trend(
            rr, "non-increasing", slack_floor + refinement_delta_radii_ratio,
            name="radii_ratio", times=t))
        gates["eps_radii_ratio_final"] = float(rr[-1] - 1.0)

    if run.termination == REACHED_MAX_F and len(run.times) >= 10:
        rep = roundness(run, rows)
        verdicts.append(TrendVerdict(
            series="extinction_sandwich", claim="sandwich",
            slack_used=rep.t_hat_width + SLACK_FLOOR, passed=rep.sandwich_ok,
            worst_violation=(float(run.times[-1]), rep.sandwich_worst)))
        finite = rep.hausdorff_rescaled[np.isfinite(rep.hausdorff_rescaled)]
        if finite.size:
            gates["hausdorff_rescaled_final"] = float(finite[-1])
        gates["t_hat"] = rep.t_hat
        gates["t_hat_width"] = rep.t_hat_width

    return {"verdicts": [v.to_dict() for v in verdicts],
            "passed": all(v.passed for v in verdicts),
            "gates": gates,
            "termination": run.termination}
