"""Evolve a convex body by an outward-normal speed via its support function.

The normal velocity -F(kappa) becomes dh/dt = -f(kappa(h)) on the support
samples; stepping is classical 4-stage explicit Runge-Kutta with a
CFL-limited step.  A run records snapshots, radii, and the extinction-time
interval [t + r_minus^2/2, t + r_plus^2/2] read off the avoidance bounds.

The top spatial mode saturates the parabolic bound, so the effective RK4
stability requirement is cfl * pi^2 <= 2.785; keep cfl at or below 0.25.

Curve-mode note: in one curvature variable, degree-one homogeneity plus the
normalisation force f(kappa) = kappa, so every curve run is curve shortening
regardless of the configured speed name.  Distinct speeds only act in
axisymmetric mode.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .errors import ConvexityLost, DomainError
from .geometry import (AXISYMMETRIC, CURVE, ConvexBody, make_ellipse,
                       make_ellipsoid, make_sphere, principal_radii, radii,
                       recenter)
from .speeds import SpeedFunction, parse_speed

REACHED_MAX_F = "ReachedMaxF"
REACHED_T_END = "ReachedTEnd"
CONVEXITY_LOST = "ConvexityLost"
STEP_UNDERFLOW = "StepUnderflow"


@dataclass
class FlowConfig:
    speed: str
    body: dict
    cfl: float = 0.1
    t_end: Optional[float] = None
    stop_max_f: Optional[float] = None         # absolute threshold on max F
    stop_max_f_factor: Optional[float] = None  # or a multiple of the initial max F
    snapshot_every: int = 100
    seed: int = 0
    monitor: str = "full"                      # "full" | "radii"
    recenter: bool = True

    def __post_init__(self):
        if not 0.0 < self.cfl <= 0.5:
            raise ValueError("cfl must lie in (0, 0.5]")
        if self.snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")
        if self.monitor not in ("full", "radii"):
            raise ValueError("monitor must be 'full' or 'radii'")

    @staticmethod
    def from_json(path: str) -> "FlowConfig":
        with open(path) as fh:
            return FlowConfig(**json.load(fh))

    def to_dict(self) -> dict:
        return {
            "speed": self.speed, "body": self.body, "cfl": self.cfl,
            "t_end": self.t_end, "stop_max_f": self.stop_max_f,
            "stop_max_f_factor": self.stop_max_f_factor,
            "snapshot_every": self.snapshot_every, "seed": self.seed,
            "monitor": self.monitor, "recenter": self.recenter,
        }


def build_body(spec: dict) -> ConvexBody:
    mode = spec["mode"]
    N = int(spec["N"])
    shape = spec.get("shape", {"kind": "sphere", "radius": 1.0})
    kind = shape["kind"]
    if kind == "sphere":
        return make_sphere(mode, N, shape.get("radius", 1.0))
    if kind == "ellipse":
        if mode != CURVE:
            raise ValueError("ellipse shape is curve-mode only")
        return make_ellipse(N, shape["a"], shape["b"])
    if kind == "ellipsoid":
        if mode != AXISYMMETRIC:
            raise ValueError("ellipsoid shape is axisymmetric only")
        return make_ellipsoid(N, shape["a"], shape["c"])
    if kind == "support":
        return ConvexBody(mode=mode, h=np.array(shape["h"], dtype=float))
    raise ValueError(f"unknown shape kind {kind!r}")


def build_speed(name: str, mode: str) -> SpeedFunction:
    return parse_speed(name, 1 if mode == CURVE else 2)


# ---------------------------------------------------------------------------
# Spectral workspace (cached per grid; all stepping goes through it)
# ---------------------------------------------------------------------------

class _Workspace:
    def __init__(self, mode: str, N: int):
        self.mode = mode
        self.N = N
        if mode == CURVE:
            self.dth = 2.0 * np.pi / N
            self.nfft = N
            m = np.arange(N // 2 + 1, dtype=float)
        else:
            self.dth = np.pi / (N - 1)
            self.nfft = 2 * (N - 1)  # even periodic extension
            m = np.arange(self.nfft // 2 + 1, dtype=float)
            th = np.pi * np.arange(N) / (N - 1)
            self.cot_int = np.cos(th[1:-1]) / np.sin(th[1:-1])
        self.d1 = 1j * m
        if self.nfft % 2 == 0:
            self.d1[-1] = 0.0  # unmatched Nyquist mode has no odd derivative
        self.d2 = -(m * m)

    def second_deriv_curve(self, h: np.ndarray) -> np.ndarray:
        return np.fft.irfft(self.d2 * np.fft.rfft(h), self.nfft)

    def radii(self, h: np.ndarray) -> np.ndarray:
        """Principal radii (N, 1) or (N, 2); no positivity check."""
        if self.mode == CURVE:
            return (self.second_deriv_curve(h) + h)[:, None]
        he = np.concatenate([h, h[-2:0:-1]])
        H = np.fft.rfft(he)
        h1 = np.fft.irfft(self.d1 * H, self.nfft)[: self.N]
        h2 = np.fft.irfft(self.d2 * H, self.nfft)[: self.N]
        r1 = h2 + h
        r2 = np.empty_like(r1)
        r2[1:-1] = self.cot_int * h1[1:-1] + h[1:-1]
        r2[0] = r1[0]
        r2[-1] = r1[-1]
        return np.stack([r1, r2], axis=1)


_WORKSPACES: dict = {}


def _workspace(mode: str, N: int) -> _Workspace:
    key = (mode, N)
    ws = _WORKSPACES.get(key)
    if ws is None:
        ws = _WORKSPACES[key] = _Workspace(mode, N)
    return ws


def _speed_of_radii(r: np.ndarray, speed: SpeedFunction) -> np.ndarray:
    if r.min() <= 0.0:
        raise DomainError(
            f"curvatures left the positive cone mid-stage (min radius {r.min():.3e})")
    return speed._v(1.0 / r)


def _rk4(ws: _Workspace, h: np.ndarray, speed: SpeedFunction, dt: float,
         r0: Optional[np.ndarray] = None) -> np.ndarray:
    r = ws.radii(h) if r0 is None else r0
    k1 = -_speed_of_radii(r, speed)
    k2 = -_speed_of_radii(ws.radii(h + (0.5 * dt) * k1), speed)
    k3 = -_speed_of_radii(ws.radii(h + (0.5 * dt) * k2), speed)
    k4 = -_speed_of_radii(ws.radii(h + dt * k3), speed)
    return h + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)


def step(body: ConvexBody, speed: SpeedFunction, dt: float) -> ConvexBody:
    """One RK4 step of dh/dt = -f(kappa(h)); the result is convexity-checked."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    ws = _workspace(body.mode, body.N)
    h_new = _rk4(ws, body.h, speed, dt)
    if ws.radii(h_new).min() <= 0.0:
        raise ConvexityLost(f"step to t={body.t + dt} lost convexity")
    return ConvexBody(mode=body.mode, h=h_new, t=body.t + dt,
                      center_offset=body.center_offset)


def _dt_of(ws: _Workspace, r: np.ndarray, speed: SpeedFunction, cfl: float) -> float:
    g = speed._g(1.0 / r)
    return float(cfl * ws.dth * ws.dth * (r.min(axis=1) ** 2).min() / g.max())


def stable_dt(body: ConvexBody, speed: SpeedFunction, cfl: float) -> float:
    """cfl * dtheta^2 * min r_min^2 / max lambda_max(dF): parabolic bound for
    the support-function equation (kappa enters through -kappa^2 h'')."""
    ws = _workspace(body.mode, body.N)
    r = ws.radii(body.h)
    if r.min() <= 0.0:
        raise ConvexityLost("cannot size a step for a nonconvex body")
    return _dt_of(ws, r, speed, cfl)


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------

@dataclass
class FlowRun:
    config: FlowConfig
    times: list = dc_field(default_factory=list)
    snapshots: list = dc_field(default_factory=list)
    max_f: list = dc_field(default_factory=list)
    min_f: list = dc_field(default_factory=list)
    r_plus: list = dc_field(default_factory=list)
    r_minus: list = dc_field(default_factory=list)
    in_centers: list = dc_field(default_factory=list)   # absolute coordinates
    t_hat_lo: list = dc_field(default_factory=list)
    t_hat_hi: list = dc_field(default_factory=list)
    termination: str = ""
    steps: int = 0

    @property
    def t_hat(self) -> float:
        """Extinction-time estimate: midpoint of the final avoidance interval."""
        return 0.5 * (self.t_hat_lo[-1] + self.t_hat_hi[-1])

    @property
    def t_hat_width(self) -> float:
        return self.t_hat_hi[-1] - self.t_hat_lo[-1]


def run(config: FlowConfig, speed: Optional[SpeedFunction] = None,
        body: Optional[ConvexBody] = None) -> FlowRun:
    """Step until a termination condition, sampling every snapshot_every steps.

    The final step is bisected so a ReachedMaxF run lands on the threshold
    (relative 1e-9) instead of overshooting by one step.
    """
    body = build_body(config.body) if body is None else body
    speed = build_speed(config.speed, body.mode) if speed is None else speed
    ws = _workspace(body.mode, body.N)
    r = ws.radii(body.h)
    if r.min() <= 0.0:
        raise ConvexityLost(f"initial body is not convex (min radius {r.min():.3e})")

    run_ = FlowRun(config=config)
    f_max0 = float(_speed_of_radii(r, speed).max())
    if config.stop_max_f is not None:
        stop_f = float(config.stop_max_f)
    elif config.stop_max_f_factor is not None:
        stop_f = float(config.stop_max_f_factor) * f_max0
    else:
        stop_f = 1e3 * f_max0
    if stop_f <= f_max0:
        raise ValueError(f"stop threshold {stop_f:g} must exceed the initial max F {f_max0:g}")

    def sample(b: ConvexBody) -> ConvexBody:
        F = _speed_of_radii(ws.radii(b.h), speed)
        if config.recenter:
            b, _ = recenter(b)
            rep = radii(b)
            center_abs = b.center_offset
        else:
            rep = radii(b)
            center_abs = b.center_offset + rep.in_center
        run_.times.append(b.t)
        run_.snapshots.append(b)
        run_.max_f.append(float(F.max()))
        run_.min_f.append(float(F.min()))
        run_.r_plus.append(rep.r_plus)
        run_.r_minus.append(rep.r_minus)
        run_.in_centers.append(np.array(center_abs))
        run_.t_hat_lo.append(b.t + 0.5 * rep.r_minus**2)
        run_.t_hat_hi.append(b.t + 0.5 * rep.r_plus**2)
        return b

    body = sample(body)
    steps_since_sample = 0
    config_mode = body.mode
    h = body.h
    t = body.t
    offset = body.center_offset
    r = ws.radii(h)

    def as_body(hh, tt):
        return ConvexBody(mode=config_mode, h=hh, t=tt, center_offset=offset)

    # stable_dt drifts by ~1e-5 relative per step, so refresh it every few
    # steps with a small margin instead of every step
    dt_cached = None
    dt_age = 0
    while True:
        if dt_cached is None or dt_age >= 8:
            dt_cached = 0.995 * _dt_of(ws, r, speed, config.cfl)
            dt_age = 0
        dt = dt_cached
        dt_age += 1
        if config.t_end is not None:
            dt = min(dt, config.t_end - t)
            if dt <= 0.0:
                run_.termination = REACHED_T_END
                break
        floor = 1e-14 * max(1.0, t)
        if dt < floor:
            run_.termination = STEP_UNDERFLOW
            break

        h_new = None
        while dt >= floor:
            try:
                h_try = _rk4(ws, h, speed, dt, r0=r)
                r_try = ws.radii(h_try)
                if r_try.min() <= 0.0:
                    raise ConvexityLost("lost convexity")
                h_new, r_new = h_try, r_try
                break
            except (ConvexityLost, DomainError):
                dt *= 0.5
                dt_cached = None
        if h_new is None:
            run_.termination = CONVEXITY_LOST
            break

        fmax = float(_speed_of_radii(r_new, speed).max())
        if fmax >= stop_f:
            # bisect the final step onto the threshold
            h_best, dt_best = h_new, dt
            lo_dt, hi_dt = 0.0, dt
            for _ in range(80):
                mid = 0.5 * (lo_dt + hi_dt)
                if mid <= 0.0 or mid == lo_dt or mid == hi_dt:
                    break
                try:
                    h_try = _rk4(ws, h, speed, mid, r0=r)
                    r_try = ws.radii(h_try)
                    if r_try.min() <= 0.0:
                        raise ConvexityLost("lost convexity")
                except (ConvexityLost, DomainError):
                    hi_dt = mid
                    continue
                f_trial = float(_speed_of_radii(r_try, speed).max())
                if f_trial < stop_f:
                    lo_dt = mid
                else:
                    h_best, dt_best = h_try, mid
                    hi_dt = mid
                    if f_trial < stop_f * (1.0 + 1e-9):
                        break
            run_.steps += 1
            sample(as_body(h_best, t + dt_best))
            run_.termination = REACHED_MAX_F
            break

        h, r = h_new, r_new
        t += dt
        run_.steps += 1
        steps_since_sample += 1
        if config.t_end is not None and t >= config.t_end:
            sample(as_body(h, t))
            run_.termination = REACHED_T_END
            break
        if steps_since_sample >= config.snapshot_every:
            b = sample(as_body(h, t))
            h, t, offset = b.h, b.t, b.center_offset
            r = ws.radii(h)
            steps_since_sample = 0

    if run_.termination in (CONVEXITY_LOST, STEP_UNDERFLOW):
        if not run_.times or run_.times[-1] < t:
            try:
                sample(as_body(h, t))
            except (ConvexityLost, DomainError):
                pass
    return run_
