"""BD-RIS objectives: sum channel gain, achievable rate and MSE.

All three work on the SNR-scaled channel ``sqrt(P / sigma^2) H_eq``, so the
noise is unit variance. Gradients are exact with respect to
``<X, Y> = Re tr(X^H Y)``.

For the phase updates, the point ``q_r diag(exp(j phi)) q_r^T`` gives the
channel ``H(phi) = S + exp(j phi_m) f_m g_m^H`` where ``f_m`` is column m of
``F q_r``, ``g_m`` column m of ``G q_r^*`` and ``S`` collects every other
term.
"""
import numpy as np

from ..linalg import wrap_angle
from ..optim import CostFunction
from . import _sweeps
from .channels import MimoChannel

__all__ = ["ChannelCost", "SumGainCost", "RateCost", "MseCost",
           "sumgain_cost", "rate_cost", "mse_cost", "mse_matrix"]

LN2 = np.log(2.0)


class _PhaseState:
    __slots__ = ("fq", "gq", "h", "memo")

    def __init__(self, fq, gq, h):
        self.fq, self.gq, self.h = fq, gq, h
        # per-phase data reused across the evaluations of one scalar search
        self.memo = None

    def split(self, m, phi_m):
        f = self.fq[:, m]
        g = self.gq[:, m]
        s = self.h - np.exp(1j * phi_m) * np.outer(f, g.conj())
        return s, f, g


class ChannelCost(CostFunction):
    """Shared machinery for costs of the form ``phi(H_eq(Theta))``."""

    def __init__(self, ch: MimoChannel):
        self.channel = ch
        scale = np.sqrt(ch.snr_linear)
        self.hd = scale * ch.h_d
        self.f = scale * ch.f
        self.g = ch.g

    def heq(self, theta):
        theta = np.asarray(getattr(theta, "u", theta), dtype=complex)
        return self.hd + self.f @ theta @ self.g.conj().T

    def value(self, theta):
        return self.value_from_h(self.heq(theta))

    def euclid_grad(self, theta):
        return self.f.conj().T @ self.grad_core(self.heq(theta)) @ self.g

    def value_from_h(self, h):
        raise NotImplementedError

    def grad_core(self, h):
        """Matrix ``D`` such that the gradient is ``F^H D G``."""
        raise NotImplementedError

    def phase_context(self, frame, phases):
        fq = self.f @ frame.q_r
        gq = self.g @ frame.q_r.conj()
        h = self.hd + (fq * np.exp(1j * np.asarray(phases))) @ gq.conj().T
        return _PhaseState(fq, gq, h)

    _kernel = None
    # set False to force the per-phase Python path
    compiled_sweeps = True

    def phase_sweep(self, frame, phases, context):
        if self._kernel is None or not self.compiled_sweeps:
            return NotImplemented
        self._kernel(context.fq, context.gq, context.h, phases)
        return None

    def phase_value(self, m, phi, frame, phases, context):
        s, f, g = context.split(m, phases[m])
        return self.value_from_h(s + np.exp(1j * phi) * np.outer(f, g.conj()))

    def phase_commit(self, m, phi, frame, phases, context):
        f = context.fq[:, m]
        g = context.gq[:, m]
        delta = np.exp(1j * phi) - np.exp(1j * phases[m])
        context.h = context.h + delta * np.outer(f, g.conj())


class SumGainCost(ChannelCost):
    """``||H_eq||_F^2``, maximized. Phase update ``-angle(g^H S^H f)``."""
    sense = "maximize"
    _kernel = staticmethod(_sweeps.sumgain_sweep)

    def value_from_h(self, h):
        return float(np.real(np.vdot(h, h)))

    def grad_core(self, h):
        return 2 * h

    def phase_update(self, m, frame, phases, context):
        s, f, g = context.split(m, phases[m])
        c = np.vdot(g, s.conj().T @ f)
        if c == 0:
            return float(phases[m])
        return float(wrap_angle(-np.angle(c)))


def mse_matrix(h):
    """``E = I + H H^H`` for an already SNR-scaled channel."""
    return np.eye(h.shape[0]) + h @ h.conj().T


class RateCost(ChannelCost):
    """``log2 det(I + H H^H)`` in bits, maximized.

    Phase update ``angle(f^H A^{-1} S g)`` with
    ``A = I + S S^H + ||g||^2 f f^H``.
    """
    sense = "maximize"

    def value_from_h(self, h):
        _, logdet = np.linalg.slogdet(mse_matrix(h))
        return float(logdet / LN2)

    def grad_core(self, h):
        return (2 / LN2) * np.linalg.solve(mse_matrix(h), h)

    def phase_update(self, m, frame, phases, context):
        s, f, g = context.split(m, phases[m])
        a = np.eye(s.shape[0]) + s @ s.conj().T + np.vdot(g, g).real * np.outer(f, f.conj())
        c = np.vdot(f, np.linalg.solve(a, s @ g))
        if c == 0:
            return float(phases[m])
        return float(wrap_angle(np.angle(c)))


class MseCost(ChannelCost):
    """``tr(E^{-1})`` with the LMMSE receiver, minimized.

    No closed-form phase update; the optimizer falls back to a scalar search.
    Along one phase, ``E(phi) = A + e f w^H + conj(e) w f^H`` with
    ``A = I + S S^H + ||g||^2 f f^H`` and ``w = S g``, so each search
    precomputes ``A`` and ``w`` once.
    """
    sense = "minimize"

    def phase_value(self, m, phi, frame, phases, context):
        key = (m, float(phases[m]))
        if context.memo is None or context.memo[0] != key:
            s, f, g = context.split(m, phases[m])
            a = mse_matrix(s) + np.vdot(g, g).real * np.outer(f, f.conj())
            context.memo = (key, a, np.ascontiguousarray(f), s @ g)
        _, a, f, w = context.memo
        return _sweeps.mse_slice_value(a, f, w, float(phi))

    def phase_commit(self, m, phi, frame, phases, context):
        super().phase_commit(m, phi, frame, phases, context)
        context.memo = None

    def value_from_h(self, h):
        return float(np.real(np.trace(np.linalg.inv(mse_matrix(h)))))

    def grad_core(self, h):
        e_inv = np.linalg.inv(mse_matrix(h))
        return -2 * e_inv @ e_inv @ h


def sumgain_cost(ch):
    return SumGainCost(ch)


def rate_cost(ch):
    return RateCost(ch)


def mse_cost(ch):
    return MseCost(ch)
