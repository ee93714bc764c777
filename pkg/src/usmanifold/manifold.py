"""Geometry of the manifold U_s of unitary and symmetric matrices.

Points carry a Takagi factor ``q`` (``u = q q^T``); tangent vectors at a point
are stored as real symmetric matrices ``r`` with ambient form
``1j * q @ r @ q.T``. The metric is the ambient one, ``<X, Y> = Re tr(X^H Y)``.
"""
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (CayleySingular, DegenerateRetraction, DimensionError,
                     NotSymmetric, NotUnitarySymmetric)
from .linalg import (as_cmatrix, as_real_sym, eig_real_sym, fro,
                     principal_sqrt_unitary_sym, read_cmatrix, svd,
                     unitary_symmetric_eig, write_cmatrix)
from .policy import get_policy

__all__ = [
    "UsPoint", "TangentDirection", "GeodesicFrame", "takagi", "retract",
    "project_tangent", "geodesic_frame", "geodesic_point", "cayley",
    "cayley_inv", "real_orth_decomp", "random_point", "load_point",
    "save_point",
]


@dataclass(frozen=True)
class UsPoint:
    """A point of U_s(n) with its cached Takagi factor."""
    u: np.ndarray
    q: np.ndarray

    @property
    def n(self):
        return self.u.shape[0]

    @classmethod
    def from_factor(cls, q):
        q = np.asarray(q, dtype=complex)
        u = q @ q.T
        return cls(u=0.5 * (u + u.T), q=q)

    @classmethod
    def from_matrix(cls, u):
        """Build a point from a unitary symmetric matrix, factoring it."""
        u = as_cmatrix(u)
        n = u.shape[0]
        tol = get_policy().input_tol * n
        if u.shape != (n, n) or fro(u @ u.conj().T - np.eye(n)) > tol or fro(u - u.T) > tol:
            raise NotUnitarySymmetric("matrix is not unitary and symmetric")
        q, _ = takagi(u)
        return cls.from_factor(q)

    def residuals(self):
        """(unitarity, symmetry, Takagi) residuals in Frobenius norm."""
        n = self.n
        eye = np.eye(n)
        return (fro(self.u @ self.u.conj().T - eye),
                fro(self.u - self.u.T),
                fro(self.u - self.q @ self.q.T) + fro(self.q @ self.q.conj().T - eye))

    def is_valid(self, tol=None):
        tol = get_policy().unitary_tol if tol is None else tol
        return max(self.residuals()) <= tol * self.n


@dataclass(frozen=True)
class TangentDirection:
    """Tangent vector ``1j * q r q^T`` at ``base``."""
    base: UsPoint
    r: np.ndarray

    @property
    def ambient(self):
        q = self.base.q
        return 1j * (q @ self.r @ q.T)

    def norm(self):
        # q is unitary, so the ambient norm equals ||r||_F
        return fro(self.r)


@dataclass(frozen=True)
class GeodesicFrame:
    """``u(phi) = q_r diag(exp(j phi)) q_r^T``; phi = mu * thetas traces the geodesic."""
    q_r: np.ndarray
    thetas: np.ndarray

    @property
    def n(self):
        return self.q_r.shape[0]

    def point(self, phases):
        return geodesic_point(self, phases)

    def at(self, mu):
        return geodesic_point(self, mu * self.thetas)


def _check_symmetric(a, tol=None):
    tol = get_policy().input_tol if tol is None else tol
    if a.shape[0] != a.shape[1]:
        raise NotSymmetric(f"matrix of shape {a.shape} is not square")
    if fro(a - a.T) > tol * max(1.0, fro(a)):
        raise NotSymmetric("matrix is not symmetric")


def _middle_factor(f, g, zero):
    w = f.conj().T @ g.conj()
    if zero.any():
        # null-space blocks of f and g are unrelated bases; any unitary works there
        w[zero, :] = 0
        w[:, zero] = 0
        w[np.ix_(zero, zero)] = np.eye(int(zero.sum()))
    return w


def takagi(a):
    """Takagi factorization ``a = q diag(sigma) q^T`` of a complex symmetric matrix.

    Built from the SVD ``a = F S G^H`` as ``q = F (F^H G^*)^{1/2}``. The
    middle factor is unitary symmetric and block diagonal over groups of
    equal singular values, so the principal square root handles repeated
    singular values too. If the reconstruction residual is too large the
    middle factor is projected onto its singular-value block structure and
    the root recomputed.

    Returns
    -------
    q : ndarray, shape (n, n)
        Unitary factor.
    sigma : ndarray, shape (n,)
        Singular values of ``a``, descending.
    """
    a = as_cmatrix(a)
    _check_symmetric(a)
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    res = svd(a)
    f, s, g = res.u, res.s, res.v
    smax = s[0] if n else 0.0
    zero = s <= get_policy().degenerate_retraction_tol * smax if smax > 0 else np.ones(n, bool)
    w = _middle_factor(f, g, zero)

    def build(w):
        try:
            root = principal_sqrt_unitary_sym(0.5 * (w + w.T))
        except NotUnitarySymmetric:
            return None
        return f @ root

    scale = max(1.0, fro(a))
    tol = get_policy().input_tol * scale
    q = build(w)
    if q is None or fro(a - (q * s) @ q.T) > tol:
        # keep only couplings inside groups of equal singular values
        groups = np.abs(s[:, None] - s[None, :]) <= 1e-8 * max(smax, 1e-300)
        q = build(np.where(groups, w, 0))
        if q is None:
            raise NotSymmetric("Takagi factorization failed; input not symmetric enough")
    return q, s


def retract(a, strict=False):
    """Closest unitary symmetric matrix to a symmetric ``a`` (Frobenius norm).

    Returns ``q q^T`` for the Takagi factor of ``a``. When the smallest
    singular value is below ``1e-12 * s_max`` the minimizer is not unique:
    a :class:`DegenerateRetraction` warning is issued (or raised, with the
    point attached, when ``strict`` is true).
    """
    a = as_cmatrix(a)
    q, s = takagi(a)
    pt = UsPoint.from_factor(q)
    if s.size and s[-1] < get_policy().degenerate_retraction_tol * max(s[0], 1e-300):
        err = DegenerateRetraction("retraction target is rank deficient; "
                                   "closest point is not unique", point=pt)
        if strict:
            raise err
        warnings.warn(err, stacklevel=2)
    return pt


def project_tangent(base, j_ambient):
    """Orthogonal projection of an ambient matrix onto the tangent space at ``base``.

    ``r = Imag(q^H (J + J^T) q^* / 2)``.
    """
    j_ambient = np.asarray(j_ambient, dtype=complex)
    if j_ambient.shape != base.u.shape:
        raise DimensionError(f"gradient shape {j_ambient.shape} does not match "
                             f"point shape {base.u.shape}")
    q = base.q
    r = np.imag(q.conj().T @ (j_ambient + j_ambient.T) @ q.conj())
    # averaging with the transpose makes r symmetric bit-for-bit
    return TangentDirection(base=base, r=0.25 * (r + r.T))


def geodesic_frame(base, direction):
    if direction.base is not base and direction.base.u.shape != base.u.shape:
        raise DimensionError("direction is not attached to this base point")
    eig = eig_real_sym(direction.r)
    return GeodesicFrame(q_r=base.q @ eig.vectors, thetas=eig.values)


def geodesic_point(frame, phases):
    """Point ``q_r diag(exp(j phases)) q_r^T``, with Takagi factor updated by half phases."""
    phases = np.asarray(phases, dtype=float)
    q = frame.q_r * np.exp(0.5j * phases)
    return UsPoint.from_factor(q)


def cayley(b):
    """Cayley map ``(I + jB)^{-1} (I - jB)`` of a real symmetric ``b``.

    Evaluated through the eigendecomposition ``b = V diag(lam) V^T`` so no
    inverse is formed; the Takagi factor is ``V diag(exp(-j arctan lam))``.
    """
    eig = eig_real_sym(b)
    q = eig.vectors * np.exp(-1j * np.arctan(eig.values))
    return UsPoint.from_factor(q)


def cayley_inv(u):
    """Inverse Cayley map; returns the real symmetric ``b`` with ``cayley(b) = u``."""
    v, theta = real_orth_decomp(u)
    gap = np.abs(np.exp(1j * theta) + 1)
    if gap.size and gap.min() <= get_policy().cayley_tol:
        raise CayleySingular("matrix has an eigenvalue at -1")
    # exp(j theta) = (1 - j lam) / (1 + j lam)  <=>  lam = -tan(theta / 2)
    lam = -np.tan(theta / 2)
    return as_real_sym((v * lam) @ v.T)


def real_orth_decomp(u):
    """Decompose ``u = v diag(exp(j theta)) v^T`` with ``v`` real orthogonal.

    Accepts a :class:`UsPoint` or a unitary symmetric matrix; eigenvalues at
    -1 are allowed. Phases lie in (-pi, pi].
    """
    mat = u.u if isinstance(u, UsPoint) else as_cmatrix(u)
    return unitary_symmetric_eig(mat)


def random_point(n, seed):
    """Deterministic random point ``retract(H + H^T)``, H i.i.d. CN(0, 1).

    Uses the counter-based Philox generator.
    """
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.Generator(np.random.Philox(seed))
    h = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    return retract(h + h.T)


def save_point(path, point):
    write_cmatrix(path, point.u)


def load_point(path):
    return UsPoint.from_matrix(read_cmatrix(path))
