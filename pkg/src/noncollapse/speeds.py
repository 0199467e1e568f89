"""Symmetric, degree-one homogeneous speed functions on the positive cone.

Every speed is normalised so that its value at (1, ..., 1) is exactly 1.
Each built-in exposes exact closed-form first and second derivatives; the
matrix lifts (eigenvalue functions of symmetric matrices) and the
sampling-based concavity / inverse-concavity certifier live here as module
functions.

Batch entry points ``value_many`` / ``grad_many`` take an (m, n) array of
cone points and are what the flow engine calls per grid sweep.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Optional

import numpy as np

from .errors import DomainError, NotPositiveDefinite

# Relative eigenvalue gap below which divided differences switch to their
# analytic limit (correct continuous extension for symmetric functions).
GAP_TOL = 1e-7


def _cone_point(z, n: Optional[int] = None) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.ndim != 1:
        raise DomainError(f"expected a vector, got shape {z.shape}")
    if n is not None and z.size != n:
        raise DomainError(f"expected {n} entries, got {z.size}")
    if not np.all(np.isfinite(z)) or np.any(z <= 0.0):
        raise DomainError(f"point not in the positive cone: {z}")
    return z


def _cone_batch(Z, n: int) -> np.ndarray:
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2 or Z.shape[1] != n:
        raise DomainError(f"expected shape (m, {n}), got {Z.shape}")
    if np.any(Z <= 0.0) or not np.all(np.isfinite(Z)):
        raise DomainError("batch contains points outside the positive cone")
    return Z


def _elem_batch(Z: np.ndarray) -> np.ndarray:
    """Elementary symmetric polynomials e_0..e_n of each row of Z, shape (m, n+1)."""
    m, n = Z.shape
    E = np.zeros((m, n + 1))
    E[:, 0] = 1.0
    for j in range(n):
        E[:, 1:] = E[:, 1:] + Z[:, j : j + 1] * E[:, :-1]
    return E


def _elem_without(Z: np.ndarray, skip: int) -> np.ndarray:
    cols = [j for j in range(Z.shape[1]) if j != skip]
    return _elem_batch(Z[:, cols])


def _e_subset(z: np.ndarray, k: int) -> float:
    """e_k of the entries of z; 0 outside 0 <= k <= len(z)."""
    if k < 0 or k > z.size:
        return 0.0
    return _elem_batch(z[None, :])[0, k]


class SpeedFunction:
    """Base class: a normalised symmetric degree-one homogeneous speed."""

    name: str
    n: int

    def _check_normalisation(self) -> None:
        v = self.value(np.ones(self.n))
        if abs(v - 1.0) > 1e-12:
            raise AssertionError(f"{self.name}: value at ones is {v!r}, not 1")

    # -- batch interface --------------------------------------------------------
    # _v/_g assume a validated (m, n) positive array; value_many/grad_many
    # validate first.  Hot loops that have already established positivity
    # (the flow engine) may call _v/_g directly.
    def _v(self, Z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _g(self, Z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def value_many(self, Z) -> np.ndarray:
        return self._v(_cone_batch(Z, self.n))

    def grad_many(self, Z) -> np.ndarray:
        return self._g(_cone_batch(Z, self.n))

    # -- scalar interface -----------------------------------------------------
    def value(self, z) -> float:
        z = _cone_point(z, self.n)
        return float(self.value_many(z[None, :])[0])

    def grad(self, z) -> np.ndarray:
        z = _cone_point(z, self.n)
        return self.grad_many(z[None, :])[0]

    def hess(self, z) -> np.ndarray:
        raise NotImplementedError

    def trace_grad(self, z) -> float:
        """Sum of the gradient entries, i.e. tr of the matrix derivative."""
        return float(self.grad(z).sum())

    def dual_value(self, y) -> float:
        """Value of the dual speed f*(y) = 1 / f(1/y_1, ..., 1/y_n)."""
        y = _cone_point(y, self.n)
        return 1.0 / self.value(1.0 / y)

    def dual(self) -> "SpeedFunction":
        return DualSpeed(self)

    def __repr__(self) -> str:  # pragma: no cover
        return f"<{type(self).__name__} {self.name} n={self.n}>"


class ArithmeticMean(SpeedFunction):
    def __init__(self, n: int):
        self.n = int(n)
        self.name = "mean"
        self._check_normalisation()

    def _v(self, Z):
        return Z.mean(axis=1)

    def _g(self, Z):
        return np.full_like(Z, 1.0 / self.n)

    def hess(self, z):
        _cone_point(z, self.n)
        return np.zeros((self.n, self.n))


class PowerMean(SpeedFunction):
    """((1/n) sum z_i^p)^(1/p); the geometric mean for p = 0."""

    def __init__(self, n: int, p: float):
        self.n = int(n)
        self.p = float(p)
        self.name = f"power:{p:g}"
        self._check_normalisation()

    def _v(self, Z):
        if self.p == -1.0:
            return self.n / (1.0 / Z).sum(axis=1)
        if self.p == 0.0:
            return np.exp(np.log(Z).mean(axis=1))
        return (np.power(Z, self.p).mean(axis=1)) ** (1.0 / self.p)

    def _g(self, Z):
        f = self._v(Z)
        if self.p == -1.0:
            return (f[:, None] / Z) ** 2 / self.n
        if self.p == 0.0:
            return f[:, None] / (self.n * Z)
        return (np.power(Z, self.p - 1.0) / self.n) * np.power(f, 1.0 - self.p)[:, None]

    def hess(self, z):
        z = _cone_point(z, self.n)
        f = self.value(z)
        p, n = self.p, self.n
        if p == 0.0:
            H = f / (n * n * np.outer(z, z))
            H[np.diag_indices(n)] -= f / (n * z**2)
            return H
        gpow = np.power(z, p - 1.0)
        H = (p - 1.0) * (
            np.diag(np.power(z, p - 2.0)) * (f ** (1.0 - p)) / n
            - np.outer(gpow, gpow) * (f ** (1.0 - 2.0 * p)) / (n * n)
        )
        return H


class HarmonicMean(PowerMean):
    def __init__(self, n: int):
        super().__init__(n, -1.0)
        self.name = "harmonic"


class SigmaRatio(SpeedFunction):
    """Normalised ratio sigma_k / sigma_{k-1} of elementary symmetric polynomials."""

    def __init__(self, n: int, k: int):
        if not 1 <= k <= n:
            raise ValueError(f"sigma-ratio needs 1 <= k <= n, got k={k}, n={n}")
        self.n = int(n)
        self.k = int(k)
        self.c = comb(n, k - 1) / comb(n, k)
        self.name = f"sigma-ratio:{k}"
        self._check_normalisation()

    def _v(self, Z):
        if self.n == 2 and self.k == 2:
            return self.c * (Z[:, 0] * Z[:, 1]) / (Z[:, 0] + Z[:, 1])
        E = _elem_batch(Z)
        return self.c * E[:, self.k] / E[:, self.k - 1]

    def _g(self, Z):
        if self.n == 2 and self.k == 2:
            return self.c * (Z[:, ::-1] / (Z[:, 0] + Z[:, 1])[:, None]) ** 2
        k = self.k
        E = _elem_batch(Z)
        u, v = E[:, k], E[:, k - 1]
        G = np.empty_like(Z)
        for i in range(self.n):
            Ei = _elem_without(Z, i)
            ui = Ei[:, k - 1]
            vi = Ei[:, k - 2] if k >= 2 else np.zeros(Z.shape[0])
            G[:, i] = self.c * (ui * v - u * vi) / v**2
        return G

    def hess(self, z):
        z = _cone_point(z, self.n)
        n, k, c = self.n, self.k, self.c
        u, v = _e_subset(z, k), _e_subset(z, k - 1)
        ui = np.empty(n)
        vi = np.empty(n)
        for i in range(n):
            zi = np.delete(z, i)
            ui[i] = _e_subset(zi, k - 1)
            vi[i] = _e_subset(zi, k - 2)
        H = np.empty((n, n))
        for i in range(n):
            for j in range(n):
                if i == j:
                    uij = vij = 0.0
                else:
                    zij = np.delete(z, [i, j])
                    uij = _e_subset(zij, k - 2)
                    vij = _e_subset(zij, k - 3)
                H[i, j] = c * (
                    (uij * v + ui[i] * vi[j] - ui[j] * vi[i] - u * vij) / v**2
                    - 2.0 * vi[j] * (ui[i] * v - u * vi[i]) / v**3
                )
        return H


class SigmaRoot(SpeedFunction):
    """Normalised k-th root sigma_k^(1/k)."""

    def __init__(self, n: int, k: int):
        if not 1 <= k <= n:
            raise ValueError(f"sigma-root needs 1 <= k <= n, got k={k}, n={n}")
        self.n = int(n)
        self.k = int(k)
        self.c = comb(n, k) ** (-1.0 / k)
        self.name = f"sigma-root:{k}"
        self._check_normalisation()

    def _v(self, Z):
        return self.c * _elem_batch(Z)[:, self.k] ** (1.0 / self.k)

    def _g(self, Z):
        k = self.k
        u = _elem_batch(Z)[:, k]
        G = np.empty_like(Z)
        for i in range(self.n):
            G[:, i] = _elem_without(Z, i)[:, k - 1]
        return (self.c / k) * u[:, None] ** (1.0 / k - 1.0) * G

    def hess(self, z):
        z = _cone_point(z, self.n)
        n, k, c = self.n, self.k, self.c
        u = _e_subset(z, k)
        ui = np.array([_e_subset(np.delete(z, i), k - 1) for i in range(n)])
        H = np.empty((n, n))
        for i in range(n):
            for j in range(n):
                uij = 0.0 if i == j else _e_subset(np.delete(z, [i, j]), k - 2)
                H[i, j] = (c / k) * (
                    (1.0 / k - 1.0) * u ** (1.0 / k - 2.0) * ui[i] * ui[j]
                    + u ** (1.0 / k - 1.0) * uij
                )
        return H


class DualSpeed(SpeedFunction):
    """The dual f*(y) := 1 / f(1/y_1, ..., 1/y_n); derivatives by chain rule."""

    def __init__(self, base: SpeedFunction):
        self.base = base
        self.n = base.n
        self.name = f"dual({base.name})"
        self._check_normalisation()

    def _v(self, Y):
        return 1.0 / self.base._v(1.0 / Y)

    def _g(self, Y):
        Z = 1.0 / Y
        f = self.base._v(Z)
        g = self.base._g(Z)
        return g * Z**2 / f[:, None] ** 2

    def hess(self, y):
        y = _cone_point(y, self.n)
        z = 1.0 / y
        f = self.base.value(z)
        g = self.base.grad(z)
        H = self.base.hess(z)
        gz2 = g * z**2
        out = 2.0 * np.outer(gz2, gz2) / f**3 - H * np.outer(z**2, z**2) / f**2
        out[np.diag_indices(self.n)] -= 2.0 * g * z**3 / f**2
        return out

    def dual(self) -> SpeedFunction:
        return self.base


def parse_speed(spec: str, n: int) -> SpeedFunction:
    """Build a speed from its config/CLI name ("mean", "power:<p>", ...)."""
    spec = spec.strip()
    if spec == "mean":
        return ArithmeticMean(n)
    if spec == "harmonic":
        return HarmonicMean(n)
    if spec.startswith("power:"):
        return PowerMean(n, float(spec.split(":", 1)[1]))
    if spec.startswith("sigma-ratio:"):
        return SigmaRatio(n, int(spec.split(":", 1)[1]))
    if spec.startswith("sigma-root:"):
        return SigmaRoot(n, int(spec.split(":", 1)[1]))
    raise ValueError(f"unknown speed spec {spec!r}")


# ---------------------------------------------------------------------------
# Matrix lifts
# ---------------------------------------------------------------------------

def matrix_eval(f: SpeedFunction, A) -> tuple[float, np.ndarray]:
    """F(A) = f(eigenvalues of A) and its matrix derivative U diag(grad) U^T."""
    A = np.asarray(A, dtype=float)
    if A.shape != (f.n, f.n) or not np.allclose(A, A.T, atol=1e-10 * (1 + np.abs(A).max())):
        raise ValueError("A must be a symmetric n x n matrix")
    lam, U = np.linalg.eigh(A)
    if lam[0] <= 0.0:
        raise NotPositiveDefinite(f"min eigenvalue {lam[0]:.3e} <= 0")
    value = f.value(lam)
    grad = (U * f.grad(lam)) @ U.T
    return value, grad


def matrix_hess_form(f: SpeedFunction, lam, B) -> float:
    """Second-derivative quadratic form of the matrix lift at eigenvalues lam.

    B is expressed in the eigenbasis of A.  Divided differences
    (grad_p - grad_q)/(lam_p - lam_q) switch to their analytic limit
    hess_pp - hess_pq when the gap is below GAP_TOL relative.
    """
    lam = _cone_point(lam, f.n)
    B = np.asarray(B, dtype=float)
    g = f.grad(lam)
    H = f.hess(lam)
    d = np.diag(B)
    total = float(d @ H @ d)
    for p in range(f.n):
        for q in range(f.n):
            if p == q or B[p, q] == 0.0:
                continue
            gap = lam[p] - lam[q]
            if abs(gap) < GAP_TOL * (1.0 + abs(lam[p])):
                coef = H[p, p] - H[p, q]
            else:
                coef = (g[p] - g[q]) / gap
            total += coef * B[p, q] ** 2
    return total


# ---------------------------------------------------------------------------
# Certification
# ---------------------------------------------------------------------------

@dataclass
class CertReport:
    """Outcome of a sampling-based property check."""

    property: str
    samples_tested: int
    min_eigen_seen: float
    verdict: str  # "certified-on-samples" | "refuted"
    witness: Optional[list] = None
    witness_eigenvalue: Optional[float] = None

    @property
    def certified(self) -> bool:
        return self.verdict == "certified-on-samples"

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "samples_tested": self.samples_tested,
            "min_eigen_seen": self.min_eigen_seen,
            "verdict": self.verdict,
            "witness": self.witness,
            "witness_eigenvalue": self.witness_eigenvalue,
        }


def sample_cone_point(rng: np.random.Generator, n: int) -> np.ndarray:
    """Log-uniform over [1e-3, 1e3]^n, with occasional near-degenerate rays."""
    z = 10.0 ** rng.uniform(-3.0, 3.0, n)
    if n >= 2 and rng.uniform() < 0.25:
        i, j = rng.choice(n, size=2, replace=False)
        z[j] = z[i] * (1.0 + rng.uniform(-1.0, 1.0) * 1e-6)
    return z


def _psd_tol(M: np.ndarray) -> float:
    return 1e-8 * (1.0 + np.abs(M).max())


def certify(f: SpeedFunction, property: str, trials: int = 2000, seed: int = 0) -> CertReport:
    """Sample-based certification of concavity / inverse-concavity (and the
    monotonicity / homogeneity sanity properties).

    Inverse-concavity checks both the shifted-Hessian criterion
    hess + 2 diag(grad/z) >= 0 and concavity of the dual at dual points;
    either failing refutes with a witness.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if property not in ("concave", "inverse-concave", "monotone", "homogeneous"):
        raise ValueError(f"unknown property {property!r}")

    dual = f.dual() if property == "inverse-concave" else None
    worst = np.inf
    witness = None
    witness_eig = None

    for t in range(trials):
        rng = np.random.default_rng((seed, t))
        z = sample_cone_point(rng, f.n)
        if property == "concave":
            H = f.hess(z)
            margin = float(-np.linalg.eigvalsh(H)[-1])
            tol = _psd_tol(H)
        elif property == "inverse-concave":
            M = f.hess(z) + 2.0 * np.diag(f.grad(z) / z)
            m1 = float(np.linalg.eigvalsh(M)[0])
            Hd = dual.hess(1.0 / z)
            m2 = float(-np.linalg.eigvalsh(Hd)[-1])
            margin = min(m1, m2)
            tol = max(_psd_tol(M), _psd_tol(Hd))
        elif property == "monotone":
            margin = float(f.grad(z).min())
            tol = 0.0
        else:  # homogeneous
            s = 10.0 ** rng.uniform(-2.0, 2.0)
            fz = f.value(z)
            margin = -abs(f.value(s * z) - s * fz) / (s * fz)
            tol = 1e-9
        if margin < worst:
            worst = margin
            if margin < -tol:
                witness = z.tolist()
                witness_eig = margin

    verdict = "certified-on-samples" if witness is None else "refuted"
    return CertReport(
        property=property,
        samples_tested=trials,
        min_eigen_seen=float(worst),
        verdict=verdict,
        witness=witness,
        witness_eigenvalue=witness_eig,
    )
