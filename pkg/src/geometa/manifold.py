"""Geometry of the product manifold O(d) x O(d) x SPD(d).

The two orthogonal factors use the embedded (Frobenius) metric with a QR
retraction. The SPD factor uses the affine-invariant metric
``<xi, eta>_B = tr(B^-1 xi B^-1 eta)`` with the second-order retraction
``B + t xi + t^2/2 xi B^-1 xi``, which never leaves the cone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from .errors import ManifoldError

ORTH_TOL = 1e-8
SYM_TOL = 1e-10
SQRT_EIG_FLOOR = 1e-12


def sym(g: np.ndarray) -> np.ndarray:
    return 0.5 * (g + g.T)


def skew(g: np.ndarray) -> np.ndarray:
    return 0.5 * (g - g.T)


def orth_error(m: np.ndarray) -> float:
    """Frobenius distance of ``m.T @ m`` from the identity."""
    return float(np.linalg.norm(m.T @ m - np.eye(m.shape[0])))


def check_orthogonal(m: np.ndarray, tol: float = ORTH_TOL) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ManifoldError(f"expected a square matrix, got shape {m.shape}")
    err = orth_error(m)
    if not err <= tol:
        raise ManifoldError(f"matrix is not orthogonal: ||M^T M - I|| = {err:.3e}")
    return m


def check_spd(m: np.ndarray, tol: float = SYM_TOL) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ManifoldError(f"expected a square matrix, got shape {m.shape}")
    asym = float(np.linalg.norm(m - m.T))
    if not asym <= tol:
        raise ManifoldError(f"matrix is not symmetric: ||M - M^T|| = {asym:.3e}")
    try:
        np.linalg.cholesky(sym(m))
    except np.linalg.LinAlgError:
        raise ManifoldError("matrix is not positive definite") from None
    return m


@dataclass(frozen=True, eq=False)
class ProductPoint:
    """A feasible triple (U, V, B): two rotations and a Mahalanobis metric."""

    u: np.ndarray
    v: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        u = check_orthogonal(self.u)
        v = check_orthogonal(self.v)
        b = check_spd(self.b)
        if not (u.shape == v.shape == b.shape):
            raise ManifoldError(f"shape mismatch: {u.shape}, {v.shape}, {b.shape}")
        for name, arr in (("u", u), ("v", v), ("b", b)):
            arr = np.array(arr, dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def dim(self) -> int:
        return self.u.shape[0]

    @classmethod
    def identity(cls, d: int) -> "ProductPoint":
        eye = np.eye(d)
        return cls(eye, eye, eye)


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A tangent vector (xi_U, xi_V, xi_B) at some ProductPoint."""

    xi_u: np.ndarray
    xi_v: np.ndarray
    xi_b: np.ndarray

    def __add__(self, other: "TangentVector") -> "TangentVector":
        return TangentVector(self.xi_u + other.xi_u, self.xi_v + other.xi_v, self.xi_b + other.xi_b)

    def __sub__(self, other: "TangentVector") -> "TangentVector":
        return self + (-other)

    def __neg__(self) -> "TangentVector":
        return TangentVector(-self.xi_u, -self.xi_v, -self.xi_b)

    def __mul__(self, a: float) -> "TangentVector":
        return TangentVector(a * self.xi_u, a * self.xi_v, a * self.xi_b)

    __rmul__ = __mul__

    @classmethod
    def zeros(cls, d: int) -> "TangentVector":
        return cls(np.zeros((d, d)), np.zeros((d, d)), np.zeros((d, d)))


def project_tangent_orth(u: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Orthogonal projection of ``g`` onto the tangent space of O(d) at ``u``."""
    return g - u @ sym(u.T @ g)


def retract_orth(u: np.ndarray, xi: np.ndarray, step: float) -> np.ndarray:
    """QR retraction with the sign convention diag(R) > 0."""
    if step == 0:
        return np.array(u, dtype=np.float64)
    q, r = np.linalg.qr(u + step * xi)
    diag = np.diagonal(r)
    if np.any(np.abs(diag) <= np.finfo(float).eps * max(1.0, np.abs(diag).max())):
        raise ManifoldError("rank-deficient QR in retraction; step too large")
    return q * np.sign(diag)


def riem_grad_spd(b: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Convert a Euclidean gradient to the affine-invariant Riemannian one."""
    return sym(b @ sym(g) @ b)


def retract_spd(b: np.ndarray, xi: np.ndarray, step: float) -> np.ndarray:
    if step == 0:
        return np.array(b, dtype=np.float64)
    sxi = step * xi
    out = sym(b + sxi + 0.5 * sxi @ np.linalg.solve(b, sxi))
    try:
        np.linalg.cholesky(out)
    except np.linalg.LinAlgError:
        raise ManifoldError("SPD retraction left the cone; step too large") from None
    return out


def _spd_inner(b: np.ndarray, xi: np.ndarray, eta: np.ndarray) -> float:
    bi_xi = np.linalg.solve(b, xi)
    bi_eta = np.linalg.solve(b, eta)
    # tr(A C) with A = B^-1 xi, C = B^-1 eta
    return float(np.sum(bi_xi * bi_eta.T))


def inner(p: ProductPoint, t1: TangentVector, t2: TangentVector) -> float:
    """Product metric: Frobenius on the rotations, affine-invariant on B."""
    return (
        float(np.sum(t1.xi_u * t2.xi_u))
        + float(np.sum(t1.xi_v * t2.xi_v))
        + _spd_inner(p.b, t1.xi_b, t2.xi_b)
    )


def norm(p: ProductPoint, t: TangentVector) -> float:
    return float(np.sqrt(max(inner(p, t, t), 0.0)))


def transport(p_from: ProductPoint, p_to: ProductPoint, t: TangentVector) -> TangentVector:
    """Projection-based vector transport to the tangent space at ``p_to``."""
    return TangentVector(
        project_tangent_orth(p_to.u, t.xi_u),
        project_tangent_orth(p_to.v, t.xi_v),
        sym(t.xi_b),
    )


def retract(p: ProductPoint, t: TangentVector, step: float) -> ProductPoint:
    return ProductPoint(
        retract_orth(p.u, t.xi_u, step),
        retract_orth(p.v, t.xi_v, step),
        retract_spd(p.b, t.xi_b, step),
    )


def sqrt_spd(b: np.ndarray) -> np.ndarray:
    """Symmetric square root via eigendecomposition.

    Eigenvalues below ``1e-12`` are clamped before the square root.
    """
    try:
        w, q = sla.eigh(sym(np.asarray(b, dtype=np.float64)))
    except sla.LinAlgError as exc:
        raise ManifoldError(f"eigendecomposition failed: {exc}") from None
    w = np.sqrt(np.maximum(w, SQRT_EIG_FLOOR))
    return sym((q * w) @ q.T)


def is_tangent(p: ProductPoint, t: TangentVector, tol: float = 1e-10) -> bool:
    """Check the tangency invariants of ``t`` at ``p``."""
    a = p.u.T @ t.xi_u
    c = p.v.T @ t.xi_v
    return (
        np.linalg.norm(a + a.T) <= tol * max(1.0, np.linalg.norm(a))
        and np.linalg.norm(c + c.T) <= tol * max(1.0, np.linalg.norm(c))
        and np.linalg.norm(t.xi_b - t.xi_b.T) <= tol * max(1.0, np.linalg.norm(t.xi_b))
    )
