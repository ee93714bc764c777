"""Dense complex linear algebra used throughout the package.

Matrices are plain :class:`numpy.ndarray` objects (``complex128`` for general
matrices, ``float64`` for real symmetric ones). Real symmetric matrices follow
a lower-triangle convention: only the lower triangle is read and the result
is mirrored, so symmetry holds bit-for-bit.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import lapack

from .errors import FormatError, InvalidInput, NotUnitarySymmetric
from .policy import get_policy

__all__ = [
    "SvdResult", "SymEig", "as_cmatrix", "as_real_sym", "svd", "eig_real_sym",
    "unitary_symmetric_eig", "principal_sqrt_unitary_sym",
    "orthonormal_basis", "orthonormal_complement", "read_cmatrix",
    "write_cmatrix", "fro", "inner",
]


@dataclass(frozen=True)
class SvdResult:
    """``a = u @ diag(s) @ v.conj().T`` with ``s`` nonincreasing."""
    u: np.ndarray
    s: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class SymEig:
    """``r = vectors @ diag(values) @ vectors.T``, values descending."""
    vectors: np.ndarray
    values: np.ndarray


def fro(a):
    return float(np.linalg.norm(a))


def inner(x, y):
    """Real inner product ``Re tr(x^H y)`` on complex matrices."""
    return float(np.real(np.vdot(x, y)))


def _check_finite(a, what="matrix"):
    if not np.all(np.isfinite(a)):
        raise InvalidInput(f"{what} has non-finite entries")


def as_cmatrix(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise InvalidInput(f"expected a 2-D matrix, got shape {a.shape}")
    _check_finite(a)
    return a


def as_real_sym(r):
    """Mirror the lower triangle of ``r`` into an exactly symmetric matrix."""
    r = np.asarray(r, dtype=float)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise InvalidInput(f"expected a square real matrix, got shape {r.shape}")
    _check_finite(r)
    out = r.copy()
    upper = _upper_indices(r.shape[0])
    out[upper] = r.T[upper]
    return out


@lru_cache(maxsize=64)
def _upper_indices(n):
    return np.triu_indices(n, 1)


def _fix_phases(u):
    # largest-magnitude entry of each column made real positive; argmax picks
    # the lowest row index on ties
    idx = np.argmax(np.abs(u), axis=0)
    pivots = u[idx, np.arange(u.shape[1])]
    mags = np.abs(pivots)
    phase = np.ones_like(pivots)
    nz = mags > 0
    phase[nz] = pivots[nz] / mags[nz]
    return np.conj(phase)


def svd(a):
    """Thin SVD with a deterministic phase convention.

    Each left singular vector is rotated so that its largest-magnitude entry
    is real and positive; the right vectors receive the same rotation.
    """
    a = as_cmatrix(a)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    c = _fix_phases(u)
    return SvdResult(u=u * c, s=s, v=vh.conj().T * c)


def eig_real_sym(r):
    """Eigendecomposition of a real symmetric matrix, values descending.

    Only the lower triangle of ``r`` is read. Each eigenvector has its
    largest-magnitude entry made positive.
    """
    r = np.asarray(r, dtype=float)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise InvalidInput(f"expected a square real matrix, got shape {r.shape}")
    n = r.shape[0]
    if n == 0:
        return SymEig(vectors=np.zeros((0, 0)), values=np.zeros(0))
    # the transpose of a C-ordered array is Fortran-ordered: LAPACK's upper
    # triangle of r.T is our lower triangle of r
    w, v, info = lapack.dsyevd(r.T, compute_v=1, lower=0)
    if info != 0 or not np.isfinite(w).all():
        _check_finite(np.tril(r))
        raise np.linalg.LinAlgError(f"dsyevd failed (info={info})")
    w = w[::-1]
    v = v[:, ::-1]
    cols = np.arange(n)
    signs = np.sign(v[np.argmax(np.abs(v), axis=0), cols])
    signs[signs == 0] = 1.0
    return SymEig(vectors=v * signs, values=w)


def wrap_angle(theta):
    """Map angles into (-pi, pi]."""
    theta = np.angle(np.exp(1j * np.asarray(theta, dtype=float)))
    return np.where(theta <= -np.pi, np.pi, theta)


def unitary_symmetric_eig(w):
    """Real-orthogonal eigendecomposition ``w = V diag(exp(j theta)) V^T``.

    ``w = W_r + j W_i`` with commuting real symmetric parts. ``W_r`` is
    diagonalized first; inside every cluster of (nearly) equal eigenvalues the
    restriction of ``W_i`` is diagonalized to split the cluster.

    Returns
    -------
    v : ndarray of float, shape (n, n)
        Real orthogonal matrix.
    theta : ndarray of float, shape (n,)
        Eigenphases in (-pi, pi].
    """
    w = np.asarray(w, dtype=complex)
    n = w.shape[0]
    wr = 0.5 * (w.real + w.real.T)
    wi = 0.5 * (w.imag + w.imag.T)
    evals, v = np.linalg.eigh(wr)
    scale = max(np.max(np.abs(evals)) if n else 0.0, 1e-300)
    thr = get_policy().cluster_tol * scale

    start = 0
    for k in range(1, n + 1):
        if k == n or evals[k] - evals[k - 1] > thr:
            if k - start > 1:
                vc = v[:, start:k]
                block = vc.T @ wi @ vc
                _, y = np.linalg.eigh(0.5 * (block + block.T))
                v[:, start:k] = vc @ y
            start = k

    d = np.einsum("ij,ik,kj->j", v, w, v)
    return v, wrap_angle(np.angle(d))


def principal_sqrt_unitary_sym(w):
    """Principal square root of a unitary symmetric matrix.

    The result ``s`` is unitary, symmetric, satisfies ``s @ s = w`` and has
    eigenphases in (-pi/2, pi/2]. An eigenvalue at -1 maps to ``+j``.

    Raises
    ------
    NotUnitarySymmetric
        If ``w`` is not unitary and symmetric within the input tolerance.
    """
    w = as_cmatrix(w)
    n = w.shape[0]
    if w.shape != (n, n):
        raise NotUnitarySymmetric("matrix is not square")
    tol = get_policy().input_tol * n
    if fro(w @ w.conj().T - np.eye(n)) > tol or fro(w - w.T) > tol:
        raise NotUnitarySymmetric("input is not unitary and symmetric")
    v, theta = unitary_symmetric_eig(w)
    s = (v * np.exp(0.5j * theta)) @ v.T
    return 0.5 * (s + s.T)


def orthonormal_basis(z, tol=None):
    """Orthonormal basis for the numerical column space of ``z``.

    Singular values above ``tol * s_max`` are kept; the column count equals
    the numerical rank (zero columns for a zero matrix).
    """
    z = as_cmatrix(z)
    if tol is None:
        tol = get_policy().rank_tol
    res = svd(z)
    if res.s.size == 0 or res.s[0] == 0:
        return np.zeros((z.shape[0], 0), dtype=complex)
    k = int(np.sum(res.s > tol * res.s[0]))
    return res.u[:, :k]


def orthonormal_complement(q):
    """Orthonormal basis of the orthogonal complement of span(q)."""
    q = as_cmatrix(q)
    m, r = q.shape
    if r == m:
        return np.zeros((m, 0), dtype=complex)
    full, _ = np.linalg.qr(np.hstack([q, np.eye(m, dtype=complex)]), mode="complete")
    # first r columns of the complete QR span span(q) when q is semi-unitary
    return full[:, r:m]


def _fmt(x):
    return format(float(x), ".17g")


def write_cmatrix(path, a):
    """Write ``a`` in the ``.cmx`` text format (bit-exact for finite doubles)."""
    a = as_cmatrix(a)
    rows, cols = a.shape
    lines = [f"{rows} {cols}"]
    for row in a:
        lines.append(" ".join(f"{_fmt(x.real)},{_fmt(x.imag)}" for x in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_cmatrix(path):
    """Read a ``.cmx`` file.

    Raises
    ------
    FormatError
        On malformed header, wrong token counts or unparsable numbers; the
        message carries the 1-based line number.
    """
    with open(path) as fh:
        raw = fh.read().splitlines()

    lineno = 0
    header = None
    while lineno < len(raw):
        text = raw[lineno].strip()
        lineno += 1
        if not text or text.startswith("#"):
            continue
        header = text
        break
    if header is None:
        raise FormatError("missing header", line=lineno or 1)
    parts = header.split()
    try:
        rows, cols = (int(p) for p in parts)
    except ValueError:
        raise FormatError(f"bad header {header!r}", line=lineno) from None
    if rows < 1 or cols < 1:
        raise FormatError(f"bad dimensions {rows}x{cols}", line=lineno)

    out = np.empty((rows, cols), dtype=complex)
    for i in range(rows):
        if lineno >= len(raw):
            raise FormatError(f"expected {rows} rows, got {i}", line=lineno + 1)
        tokens = raw[lineno].split()
        lineno += 1
        if len(tokens) != cols:
            raise FormatError(f"expected {cols} tokens, got {len(tokens)}", line=lineno)
        for j, tok in enumerate(tokens):
            re_im = tok.split(",")
            if len(re_im) != 2:
                raise FormatError(f"bad token {tok!r}", line=lineno)
            try:
                re, im = float(re_im[0]), float(re_im[1])
            except ValueError:
                raise FormatError(f"bad number in {tok!r}", line=lineno) from None
            if not (np.isfinite(re) and np.isfinite(im)):
                raise FormatError(f"non-finite value {tok!r}", line=lineno)
            out[i, j] = complex(re, im)
    for extra in raw[lineno:]:
        if extra.strip():
            raise FormatError("trailing data after matrix", line=lineno + 1)
        lineno += 1
    return out
