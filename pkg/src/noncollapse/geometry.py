"""Convex hypersurfaces represented by support-function samples.

Two modes: closed curves in the plane (periodic grid, Fourier
differentiation) and axisymmetric surfaces in 3-space (polar-angle grid
including the poles, cosine-series differentiation).  The module computes
embeddings, principal curvatures, interior/exterior ball-curvature fields,
in/circumradius, and the Hausdorff distance to a unit sphere.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np
import scipy.fft
from scipy.optimize import linprog

from .errors import (CenterOutside, ConvexityLost, DiagonalWitness,
                     PairTooClose)

CURVE = "curve"
AXISYMMETRIC = "axisymmetric"

# off-diagonal pairs closer than SEP_FACTOR grid spacings (in arclength at x)
# fall to the diagonal extension
SEP_FACTOR = 3.0


@dataclass(frozen=True)
class ConvexBody:
    """Support-function samples of a convex body at flow time t.

    center_offset is the absolute position of the support origin; it changes
    only when a body is recentered, so curvatures and radii are unaffected.
    """

    mode: str
    h: np.ndarray
    t: float = 0.0
    center_offset: np.ndarray = None

    def __post_init__(self):
        h = np.array(self.h, dtype=float)
        h.flags.writeable = False
        object.__setattr__(self, "h", h)
        if self.mode not in (CURVE, AXISYMMETRIC):
            raise ValueError(f"unknown mode {self.mode!r}")
        off = self.center_offset
        if off is None:
            off = np.zeros(self.dim)
        off = np.array(off, dtype=float)
        off.flags.writeable = False
        if off.shape != (self.dim,):
            raise ValueError("center_offset has the wrong dimension")
        object.__setattr__(self, "center_offset", off)

    @property
    def N(self) -> int:
        return self.h.size

    @property
    def dim(self) -> int:
        return 2 if self.mode == CURVE else 3

    @property
    def curvature_count(self) -> int:
        return 1 if self.mode == CURVE else 2

    @property
    def grid_spacing(self) -> float:
        return 2.0 * np.pi / self.N if self.mode == CURVE else np.pi / (self.N - 1)

    @property
    def thetas(self) -> np.ndarray:
        if self.mode == CURVE:
            return 2.0 * np.pi * np.arange(self.N) / self.N
        return np.pi * np.arange(self.N) / (self.N - 1)

    def directions(self) -> np.ndarray:
        """Outward normal directions of the grid (curve: (N,2); axisym meridian: (N,3))."""
        th = self.thetas
        if self.mode == CURVE:
            return np.stack([np.cos(th), np.sin(th)], axis=1)
        return np.stack([np.sin(th), np.zeros(self.N), np.cos(th)], axis=1)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "N": self.N,
            "t": self.t,
            "h": self.h.tolist(),
            "center_offset": self.center_offset.tolist(),
        }

    @staticmethod
    def from_dict(d: dict) -> "ConvexBody":
        return ConvexBody(mode=d["mode"], h=np.array(d["h"]), t=float(d["t"]),
                          center_offset=np.array(d.get("center_offset"))
                          if d.get("center_offset") is not None else None)


# ---------------------------------------------------------------------------
# Spectral derivatives
# ---------------------------------------------------------------------------

def curve_derivs(h: np.ndarray):
    """(h', h'') of a periodic sample by Fourier differentiation."""
    N = h.size
    H = np.fft.rfft(h)
    m = np.arange(H.size)
    d1 = 1j * m * H
    if N % 2 == 0:
        d1[-1] = 0.0  # odd derivative of the unmatched Nyquist mode
    h1 = np.fft.irfft(d1, N)
    h2 = np.fft.irfft(-(m**2) * H, N)
    return h1, h2


def cosine_coeffs(h: np.ndarray) -> np.ndarray:
    """Coefficients c with h_j = sum_m c_m cos(m theta_j) on the closed [0, pi] grid."""
    M = h.size
    c = scipy.fft.dct(h, type=1) / (M - 1)
    c[0] *= 0.5
    c[-1] *= 0.5
    return c


def cosine_eval(c: np.ndarray) -> np.ndarray:
    """Values of sum_m c_m cos(m theta_j) on the grid of the same size."""
    y = c.copy()
    y[0] *= 2.0
    y[-1] *= 2.0
    return scipy.fft.dct(y, type=1) / 2.0


def axi_derivs(h: np.ndarray):
    """(h', h'') of an even sample on the closed [0, pi] grid."""
    M = h.size
    c = cosine_coeffs(h)
    m = np.arange(M)
    h2 = cosine_eval(-(m**2) * c)
    h1 = np.zeros(M)
    s = -(m * c)[1 : M - 1]  # sin-mode M-1 vanishes on this grid
    if M > 2:
        h1[1 : M - 1] = scipy.fft.dst(s, type=1) / 2.0
    return h1, h2


def principal_radii(body: ConvexBody) -> np.ndarray:
    """(N, n) principal radii of curvature; poles take the meridian value."""
    h = body.h
    if body.mode == CURVE:
        _, h2 = curve_derivs(h)
        return (h2 + h)[:, None]
    h1, h2 = axi_derivs(h)
    r1 = h2 + h
    th = body.thetas
    r2 = np.empty_like(r1)
    r2[1:-1] = (h1[1:-1] / np.sin(th[1:-1])) * np.cos(th[1:-1]) + h[1:-1]
    r2[0] = r1[0]
    r2[-1] = r1[-1]
    return np.stack([r1, r2], axis=1)


def check_convex(body: ConvexBody) -> np.ndarray:
    r = principal_radii(body)
    if r.min() <= 0.0:
        raise ConvexityLost(f"min principal radius {r.min():.3e} <= 0 at t={body.t}")
    return r


def principal_curvatures(body: ConvexBody) -> np.ndarray:
    """(N, n) principal curvatures 1/r_i."""
    return 1.0 / check_convex(body)


# ---------------------------------------------------------------------------
# Embedding
# ---------------------------------------------------------------------------

def embed(body: ConvexBody):
    """Grid points and outward unit normals (curve: full circle; axisym:
    the meridian at azimuth 0)."""
    check_convex(body)
    th = body.thetas
    h = body.h
    if body.mode == CURVE:
        h1, _ = curve_derivs(h)
        pts = np.stack([h * np.cos(th) - h1 * np.sin(th),
                        h * np.sin(th) + h1 * np.cos(th)], axis=1)
        return pts, body.directions()
    h1, _ = axi_derivs(h)
    rho = h * np.sin(th) + h1 * np.cos(th)
    zax = h * np.cos(th) - h1 * np.sin(th)
    pts = np.stack([rho, np.zeros(body.N), zax], axis=1)
    return pts, body.directions()


def meridian_profile(body: ConvexBody):
    """(rho, z) of the axisymmetric profile and the meridian speed |X_theta| = r1."""
    h = body.h
    th = body.thetas
    h1, h2 = axi_derivs(h)
    rho = h * np.sin(th) + h1 * np.cos(th)
    zax = h * np.cos(th) - h1 * np.sin(th)
    return rho, zax, h2 + h


def support_from_points(points: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """Support values of a point cloud: max_j <p_j, z> per direction."""
    return (points @ directions.T).max(axis=0)


def area(body: ConvexBody) -> float:
    """Enclosed area of a curve-mode body, (1/2) oint (h^2 - h'^2) dtheta."""
    if body.mode != CURVE:
        raise ValueError("area is defined for curve mode")
    h1, _ = curve_derivs(body.h)
    return float(0.5 * body.grid_spacing * np.sum(body.h**2 - h1**2))


# ---------------------------------------------------------------------------
# Ball curvatures
# ---------------------------------------------------------------------------

@dataclass
class BallCurvatureField:
    """Per-gridpoint exterior (k_lower) and interior (k_upper) ball curvatures.

    Witnesses are y-grid indices; (-1, -1) marks the diagonal (the extremum is
    a principal curvature at x itself).
    """

    k_lower: np.ndarray
    k_upper: np.ndarray
    witness_lower: np.ndarray  # (N, 2) int
    witness_upper: np.ndarray
    kappa: np.ndarray          # (N, n)

    def diagonal_lower(self, i: int) -> bool:
        return self.witness_lower[i, 0] < 0

    def diagonal_upper(self, i: int) -> bool:
        return self.witness_upper[i, 0] < 0


def _revolved_points(body: ConvexBody, n_phi: int):
    rho, zax, _ = meridian_profile(body)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    X = np.empty((body.N, n_phi, 3))
    X[:, :, 0] = rho[:, None] * np.cos(phi)[None, :]
    X[:, :, 1] = rho[:, None] * np.sin(phi)[None, :]
    X[:, :, 2] = zax[:, None]
    return X, phi


def ball_curvature_pair(body: ConvexBody, x_index: int, y_index: int,
                        y_azimuth: float = 0.0) -> float:
    """k(x, y) = 2 <X_x - X_y, nu_x> / |X_x - X_y|^2 for distinct grid points."""
    pts, nus = embed(body)
    if body.mode == CURVE:
        if y_azimuth != 0.0:
            raise ValueError("curve mode has no azimuth")
        Xy = pts[y_index]
    else:
        rho, zax, _ = meridian_profile(body)
        ca, sa = np.cos(y_azimuth), np.sin(y_azimuth)
        Xy = np.array([rho[y_index] * ca, rho[y_index] * sa, zax[y_index]])
    D = pts[x_index] - Xy
    d2 = float(D @ D)
    r = principal_radii(body)
    sep = SEP_FACTOR * body.grid_spacing * r[x_index].min()
    if d2 <= sep * sep:
        raise PairTooClose(f"chord {np.sqrt(d2):.3e} below separation {sep:.3e}")
    return float(2.0 * (D @ nus[x_index]) / d2)


def ball_curvature_field(body: ConvexBody, n_phi: Optional[int] = None) -> BallCurvatureField:
    """Exterior/interior ball curvatures at every gridpoint.

    The off-diagonal search runs over the full grid (curve) or the
    (theta, phi) torus with x fixed at azimuth 0 (axisymmetric); pairs closer
    than the separation tolerance are covered by the diagonal extension,
    which contributes the principal curvatures at x.
    """
    r = check_convex(body)
    kappa = 1.0 / r
    N = body.N
    pts, nus = embed(body)

    k_lower = np.empty(N)
    k_upper = np.empty(N)
    w_lower = np.full((N, 2), -1, dtype=int)
    w_upper = np.full((N, 2), -1, dtype=int)

    if body.mode == CURVE:
        D = pts[:, None, :] - pts[None, :, :]       # X_x - X_y
        d2 = np.einsum("xyk,xyk->xy", D, D)
        num = 2.0 * np.einsum("xyk,xk->xy", D, nus)
        sep = SEP_FACTOR * body.grid_spacing * r[:, 0]
        admissible = d2 > (sep**2)[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            kmat = np.where(admissible, num / d2, np.nan)
        for x in range(N):
            row = kmat[x]
            ok = np.isfinite(row)
            kmin_diag = kappa[x].min()
            kmax_diag = kappa[x].max()
            if ok.any():
                j_lo = int(np.nanargmin(row))
                j_hi = int(np.nanargmax(row))
                lo, hi = row[j_lo], row[j_hi]
            else:
                lo, hi = np.inf, -np.inf
                j_lo = j_hi = -1
            if lo < kmin_diag:
                k_lower[x] = lo
                w_lower[x] = (j_lo, 0)
            else:
                k_lower[x] = kmin_diag
            if hi > kmax_diag:
                k_upper[x] = hi
                w_upper[x] = (j_hi, 0)
            else:
                k_upper[x] = kmax_diag
        return BallCurvatureField(k_lower, k_upper, w_lower, w_upper, kappa)

    n_phi = N if n_phi is None else n_phi
    Y, _ = _revolved_points(body, n_phi)
    sep = SEP_FACTOR * body.grid_spacing * r[:, 0]
    for x in range(N):
        D = pts[x][None, None, :] - Y
        d2 = np.einsum("ijk,ijk->ij", D, D)
        num = 2.0 * (D @ nus[x])
        admissible = d2 > sep[x] ** 2
        kmin_diag = kappa[x].min()
        kmax_diag = kappa[x].max()
        if admissible.any():
            with np.errstate(divide="ignore", invalid="ignore"):
                kmat = np.where(admissible, num / d2, np.nan)
            flat_lo = int(np.nanargmin(kmat))
            flat_hi = int(np.nanargmax(kmat))
            lo = kmat.flat[flat_lo]
            hi = kmat.flat[flat_hi]
        else:
            lo, hi = np.inf, -np.inf
            flat_lo = flat_hi = 0
        if lo < kmin_diag:
            k_lower[x] = lo
            w_lower[x] = divmod(flat_lo, n_phi)
        else:
            k_lower[x] = kmin_diag
        if hi > kmax_diag:
            k_upper[x] = hi
            w_upper[x] = divmod(flat_hi, n_phi)
        else:
            k_upper[x] = kmax_diag
    return BallCurvatureField(k_lower, k_upper, w_lower, w_upper, kappa)


def tangent_plane_diagnostic(body: ConvexBody, fld: BallCurvatureField,
                             x_index: int) -> float:
    """First-order optimality residual at the witness of k_lower(x): the
    normalised projection of nu_x - k (X_x - X_y) onto the tangent plane at y.
    O(grid spacing^2) when the discrete witness tracks a smooth off-diagonal
    minimum."""
    if fld.diagonal_lower(x_index):
        raise DiagonalWitness(f"k_lower witness at x={x_index} is the diagonal")
    pts, nus = embed(body)
    th = body.thetas
    k = fld.k_lower[x_index]
    iy, iphi = fld.witness_lower[x_index]
    if body.mode == CURVE:
        Xy = pts[iy]
        tangents = [np.array([-np.sin(th[iy]), np.cos(th[iy])])]
    else:
        rho, zax, _ = meridian_profile(body)
        n_phi = body.N
        phi = 2.0 * np.pi * iphi / n_phi
        ca, sa = np.cos(phi), np.sin(phi)
        Xy = np.array([rho[iy] * ca, rho[iy] * sa, zax[iy]])
        ct, st = np.cos(th[iy]), np.sin(th[iy])
        if st < 1e-12:  # pole: tangent plane is horizontal
            tangents = [np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])]
        else:
            tangents = [np.array([ct * ca, ct * sa, -st]),
                        np.array([-sa, ca, 0.0])]
    u = nus[x_index] - k * (pts[x_index] - Xy)
    nu = np.linalg.norm(u)
    return float(max(abs(t @ u) for t in tangents) / nu)


# ---------------------------------------------------------------------------
# Radii and Hausdorff distance
# ---------------------------------------------------------------------------

@dataclass
class RadiiReport:
    r_minus: float
    r_plus: float
    in_center: np.ndarray
    circ_center: np.ndarray


def _polish_max_min(h: np.ndarray, Z: np.ndarray, c0: np.ndarray):
    """Exact vertex polish for max_c min_j (h_j - <c, z_j>): solve the active
    set of the near-optimal c0 and keep the best feasible candidate."""
    dim = Z.shape[1]
    slack = h - Z @ c0
    best_c, best_v = c0, slack.min()
    order = np.argsort(slack)[: dim + 6]
    for idx in combinations(order, dim + 1):
        A = np.column_stack([Z[list(idx)], np.ones(dim + 1)])
        try:
            sol = np.linalg.solve(A, h[list(idx)])
        except np.linalg.LinAlgError:
            continue
        c, v = sol[:dim], sol[dim]
        val = (h - Z @ c).min()
        if val > best_v:
            best_c, best_v = c, val
    return best_c, best_v


def _in_ball_curve(h: np.ndarray, Z: np.ndarray):
    # Chebyshev-center LP: max t s.t. <c, z_j> + t <= h_j
    dim = Z.shape[1]
    res = linprog(c=[0.0] * dim + [-1.0],
                  A_ub=np.column_stack([Z, np.ones(len(h))]),
                  b_ub=h, bounds=[(None, None)] * (dim + 1), method="highs")
    if not res.success:  # pragma: no cover - bounded by construction
        raise RuntimeError(f"in-center LP failed: {res.message}")
    c0 = np.array(res.x[:dim])
    return _polish_max_min(h, Z, c0)


def _golden_max(fun, lo: float, hi: float, iters: int = 90):
    g = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - g * (b - a)
    x2 = a + g * (b - a)
    f1, f2 = fun(x1), fun(x2)
    for _ in range(iters):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + g * (b - a)
            f2 = fun(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - g * (b - a)
            f1 = fun(x1)
    return 0.5 * (a + b)


def _in_ball_axi(h: np.ndarray, u: np.ndarray):
    # center on the symmetry axis: maximise min_j (h_j - c u_j), u_j = cos(theta_j)
    span = h.max()

    def m(c):
        return (h - c * u).min()

    c0 = _golden_max(m, -span, span)
    slack = h - c0 * u
    order = np.argsort(slack)[:8]
    best_c, best_v = c0, slack.min()
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            i, j = order[a], order[b]
            if abs(u[i] - u[j]) < 1e-14:
                continue
            c = (h[i] - h[j]) / (u[i] - u[j])
            v = (h - c * u).min()
            if v > best_v:
                best_c, best_v = c, v
    # when the binding direction is nearly equatorial (u ~ 0) the optimum is a
    # flat interval; take its midpoint so symmetric bodies center exactly
    floor = best_v - 1e-10 * (1.0 + span)
    lo, hi = -span, span
    for j in range(h.size):
        bound = (h[j] - floor) / u[j] if abs(u[j]) > 1e-13 else None
        if bound is None:
            continue
        if u[j] > 0:
            hi = min(hi, bound)
        else:
            lo = max(lo, bound)
    if lo <= hi:
        c_mid = 0.5 * (lo + hi)
        v_mid = m(c_mid)
        if v_mid >= best_v - 1e-9 * (1.0 + span):
            return c_mid, max(v_mid, best_v)
    return best_c, best_v


def _circumball_curve(pts: np.ndarray):
    """Minimum enclosing circle (incremental Welzl with deterministic shuffle)."""
    import random

    P = [tuple(p) for p in pts]
    random.Random(0).shuffle(P)

    def circle_two(p, q):
        cx, cy = (p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0
        r = max(np.hypot(p[0] - cx, p[1] - cy), np.hypot(q[0] - cx, q[1] - cy))
        return (cx, cy, r)

    def circle_three(p, q, r_):
        ax, ay = p
        bx, by = q
        cx, cy = r_
        d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
        if d == 0.0:
            return None
        ux = ((ax**2 + ay**2) * (by - cy) + (bx**2 + by**2) * (cy - ay)
              + (cx**2 + cy**2) * (ay - by)) / d
        uy = ((ax**2 + ay**2) * (cx - bx) + (bx**2 + by**2) * (ax - cx)
              + (cx**2 + cy**2) * (bx - ax)) / d
        rad = max(np.hypot(ax - ux, ay - uy), np.hypot(bx - ux, by - uy),
                  np.hypot(cx - ux, cy - uy))
        return (ux, uy, rad)

    def contains(c, p, eps=1e-12):
        return c is not None and np.hypot(p[0] - c[0], p[1] - c[1]) <= c[2] * (1 + eps) + eps

    c = None
    for i, p in enumerate(P):
        if contains(c, p):
            continue
        c = (p[0], p[1], 0.0)
        for j in range(i):
            q = P[j]
            if contains(c, q):
                continue
            c = circle_two(p, q)
            for m in range(j):
                s = P[m]
                if contains(c, s):
                    continue
                c3 = circle_three(p, q, s)
                if c3 is not None:
                    c = c3
    return np.array([c[0], c[1]]), float(c[2])


def _circumball_axi(pts: np.ndarray):
    """Smallest enclosing ball of a revolved point set; center on the axis."""
    rho2 = pts[:, 0] ** 2
    zax = pts[:, 2]

    def f(c):
        return np.sqrt(rho2 + (zax - c) ** 2).max()

    lo, hi = zax.min(), zax.max()
    c0 = _golden_max(lambda c: -f(c), lo, hi)
    d = rho2 + (zax - c0) ** 2
    order = np.argsort(-d)[:8]
    best_c, best_v = c0, f(c0)
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            i, j = order[a], order[b]
            if abs(zax[i] - zax[j]) < 1e-14:
                continue
            c = (rho2[i] - rho2[j] + zax[i] ** 2 - zax[j] ** 2) / (2.0 * (zax[i] - zax[j]))
            v = f(c)
            if v < best_v:
                best_c, best_v = c, v
    return np.array([0.0, 0.0, best_c]), float(best_v)


def radii(body: ConvexBody) -> RadiiReport:
    """Inradius (support maximisation) and circumradius (minimum enclosing
    ball of the embedded points), with the touching centers."""
    check_convex(body)
    h = body.h
    if body.mode == CURVE:
        Z = body.directions()
        c_in, r_in = _in_ball_curve(h, Z)
        pts, _ = embed(body)
        c_out, r_out = _circumball_curve(pts)
    else:
        u = np.cos(body.thetas)
        cz, r_in = _in_ball_axi(h, u)
        c_in = np.array([0.0, 0.0, cz])
        pts, _ = embed(body)
        c_out, r_out = _circumball_axi(pts)
    return RadiiReport(r_minus=float(r_in), r_plus=float(r_out),
                       in_center=c_in, circ_center=c_out)


def hausdorff_to_unit_sphere(body: ConvexBody, center) -> float:
    """max over grid directions of |h(z) - <center, z> - 1| (support-function
    characterisation of the Hausdorff distance to the unit ball at center)."""
    center = np.asarray(center, dtype=float)
    if center.shape != (body.dim,):
        raise ValueError("center has the wrong dimension")
    if body.mode == CURVE:
        g = body.h - body.directions() @ center
    else:
        th = body.thetas
        phi = 2.0 * np.pi * np.arange(body.N) / body.N
        proj = (np.sin(th)[:, None]
                * (center[0] * np.cos(phi) + center[1] * np.sin(phi))[None, :]
                + (np.cos(th) * center[2])[:, None])
        g = body.h[:, None] - proj
    if g.min() <= 0.0:
        raise CenterOutside(f"support relative to center dips to {g.min():.3e}")
    return float(np.abs(g - 1.0).max())


# ---------------------------------------------------------------------------
# Transformations and constructors
# ---------------------------------------------------------------------------

def translate(body: ConvexBody, v) -> ConvexBody:
    """Move the body by v (support origin stays put).  Axisymmetric bodies
    only admit axial translations; anything else leaves the representable
    class."""
    v = np.asarray(v, dtype=float)
    if body.mode == AXISYMMETRIC and np.abs(v[:2]).max() > 0.0:
        raise ValueError("axisymmetric bodies can only be translated along the axis")
    return ConvexBody(mode=body.mode, h=body.h + body.directions() @ v, t=body.t,
                      center_offset=body.center_offset)


def scale(body: ConvexBody, s: float) -> ConvexBody:
    return ConvexBody(mode=body.mode, h=body.h * s, t=body.t,
                      center_offset=body.center_offset * s)


def recenter(body: ConvexBody) -> tuple[ConvexBody, np.ndarray]:
    """Shift the support origin to the in-center; returns (body, shift)."""
    rep = radii(body)
    c = rep.in_center
    shifted = ConvexBody(mode=body.mode, h=body.h - body.directions() @ c,
                         t=body.t, center_offset=body.center_offset + c)
    return shifted, c


def make_sphere(mode: str, N: int, radius: float = 1.0) -> ConvexBody:
    return ConvexBody(mode=mode, h=np.full(N, float(radius)))


def make_ellipse(N: int, a: float, b: float) -> ConvexBody:
    th = 2.0 * np.pi * np.arange(N) / N
    return ConvexBody(mode=CURVE, h=np.sqrt((a * np.cos(th)) ** 2 + (b * np.sin(th)) ** 2))


def make_ellipsoid(N: int, a: float, c: float) -> ConvexBody:
    """Axisymmetric ellipsoid with equatorial semi-axis a and polar semi-axis c."""
    th = np.pi * np.arange(N) / (N - 1)
    return ConvexBody(mode=AXISYMMETRIC,
                      h=np.sqrt((a * np.sin(th)) ** 2 + (c * np.cos(th)) ** 2))
