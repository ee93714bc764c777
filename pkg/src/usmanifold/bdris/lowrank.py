"""Low-rank reduction of the surface matrix and the baselines built on it.

With ``Z = [F^H | G^T]`` and ``U_Z`` an orthonormal basis of its column
space, only ``U_Z^H Theta U_Z^*`` reaches the receiver, so the problem can be
solved over U_s(r), ``r = rank(Z) <= N_t + N_r``, and lifted back.
"""
import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateBaseline, DegenerateRetraction, InvalidInput, NotSymmetric
from ..linalg import as_cmatrix, fro, orthonormal_basis, orthonormal_complement
from ..manifold import UsPoint, retract
from .channels import MimoChannel

__all__ = ["LowRankReduction", "low_rank_reduce", "compress", "lift",
           "complete_full_rank", "expand", "low_cost_baseline"]


@dataclass(frozen=True)
class LowRankReduction:
    u_z: np.ndarray
    f_tilde: np.ndarray
    g_tilde: np.ndarray
    r: int
    channel: MimoChannel

    @property
    def m(self):
        return self.u_z.shape[0]


def low_rank_reduce(ch, tol=1e-10):
    """Reduce a channel to the column space of ``[F^H | G^T]``.

    When ``M <= N_t + N_r`` the identity reduction (``r = M``) is returned.
    """
    m = ch.m
    if m <= ch.n_t + ch.n_r:
        u_z = np.eye(m, dtype=complex)
    else:
        z = np.hstack([ch.f.conj().T, ch.g.T])
        u_z = orthonormal_basis(z, tol)
    f_t = ch.f @ u_z
    g_t = ch.g @ u_z.conj()
    reduced = MimoChannel(h_d=ch.h_d, f=f_t, g=g_t, snr_linear=ch.snr_linear, meta=ch.meta)
    return LowRankReduction(u_z=u_z, f_tilde=f_t, g_tilde=g_t, r=u_z.shape[1], channel=reduced)


def compress(theta, red):
    """``U_Z^H Theta U_Z^*``, the part of a full matrix seen by the channel."""
    theta = np.asarray(getattr(theta, "u", theta), dtype=complex)
    return red.u_z.conj().T @ theta @ red.u_z.conj()


def lift(theta_tilde, red):
    """Low-rank symmetric ``U_Z Theta~ U_Z^T`` with spectral norm <= 1 for contractive input."""
    theta_tilde = as_cmatrix(getattr(theta_tilde, "u", theta_tilde))
    if theta_tilde.shape != (red.r, red.r):
        raise InvalidInput(f"expected a {red.r}x{red.r} matrix")
    if fro(theta_tilde - theta_tilde.T) > 1e-8 * max(1.0, fro(theta_tilde)):
        raise NotSymmetric("reduced matrix is not symmetric")
    out = red.u_z @ theta_tilde @ red.u_z.T
    return 0.5 * (out + out.T)


def complete_full_rank(q):
    """Complete a semi-unitary ``q`` (M x r) to ``q q^T + Q_perp Q_perp^T`` in U_s(M)."""
    q = as_cmatrix(q)
    m, r = q.shape
    if r > m or fro(q.conj().T @ q - np.eye(r)) > 1e-8 * max(1, r):
        raise InvalidInput("q must have orthonormal columns")
    q_perp = orthonormal_complement(q)
    return UsPoint.from_factor(np.hstack([q, q_perp]))


def expand(point_tilde, red):
    """Full-rank U_s(M) point equivalent to a reduced solution."""
    return complete_full_rank(red.u_z @ point_tilde.q)


def low_cost_baseline(ch):
    """``retract(A + A^T)`` with the matched filter ``A = F^H H_d G``.

    Raises
    ------
    DegenerateBaseline
        If the direct link is (numerically) absent.
    """
    if fro(ch.h_d) < 1e-12:
        raise DegenerateBaseline("low-cost design needs an unblocked direct link")
    a = ch.f.conj().T @ ch.h_d @ ch.g
    with warnings.catch_warnings():
        # rank(A + A^T) <= N_t + N_r < M is the normal case here
        warnings.simplefilter("ignore", DegenerateRetraction)
        return retract(a + a.T)
