"""Riemannian ascent on U_s with line-search (LS) and phase-optimization (PO) steps.

Both methods share the same iteration skeleton: Euclidean gradient, tangent
projection, eigendecomposition of the projected direction and a move along
the resulting geodesic frame ``q_r diag(exp(j phi)) q_r^T``. LS uses
``phi = mu * thetas`` for one scalar ``mu``; PO optimizes each phase in turn,
starting from ``phi = 0`` (the current point), so every update is monotone.

A unitary-group optimizer followed by a retraction onto U_s is included as a
baseline.
"""
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .linalg import fro, inner
from .manifold import (UsPoint, geodesic_frame, geodesic_point,
                       project_tangent, retract)

__all__ = [
    "CostFunction", "OptimConfig", "OptimReport", "riemannian_grad",
    "optimize_ls", "optimize_po", "optimize_unitary_then_project",
    "scalar_phase_search",
]

GOLDEN = (math.sqrt(5) - 1) / 2
STATIONARY_TOL = 1e-12


def _as_matrix(theta):
    return theta.u if isinstance(theta, UsPoint) else np.asarray(theta, dtype=complex)


class CostFunction:
    """Behavioral contract for objectives on U_s.

    Subclasses implement :meth:`value` and :meth:`euclid_grad`; both accept a
    :class:`UsPoint` or a plain square matrix (the unitary baseline evaluates
    costs off the manifold). ``euclid_grad`` is the exact gradient with
    respect to the real inner product ``Re tr(X^H Y)``.

    The phase hooks let PO exploit problem structure. ``phase_context``
    builds per-frame state, ``phase_update`` returns the closed-form optimal
    m-th phase (in the cost's own sense) or ``None`` to request a scalar
    search, ``phase_value`` evaluates the cost with the m-th phase replaced,
    and ``phase_commit`` records an accepted phase in the context.
    """
    sense = "maximize"

    def value(self, theta):
        raise NotImplementedError

    def euclid_grad(self, theta):
        raise NotImplementedError

    def phase_context(self, frame, phases):
        return None

    def phase_update(self, m, frame, phases, context):
        return None

    def phase_value(self, m, phi, frame, phases, context):
        trial = np.array(phases, dtype=float)
        trial[m] = phi
        return self.value(geodesic_point(frame, trial))

    def phase_commit(self, m, phi, frame, phases, context):
        pass

    def phase_sweep(self, frame, phases, context):
        """Optional fast path for one full closed-form sweep.

        Must update ``phases`` in place exactly as the per-phase loop would;
        returning ``NotImplemented`` selects the generic loop.
        """
        return NotImplemented


@dataclass
class OptimConfig:
    eps: float = 1e-3
    max_iters: int = 500
    max_inner_phase_sweeps: int = 1
    # largest phase rotation (radians) of the first line-search trial
    ls_mu_max: float = 2.0
    ls_shrink: float = 0.5
    ls_armijo_c: float = 1e-4
    ls_max_trials: int = 30
    seed: int = 0
    # None defers to the cost function's own sense
    sense: str = None
    # compare |F_k - F_{k-1}| against eps * |F_{k-1}| instead of eps
    relative_eps: bool = False
    # "armijo" (default) or "bisection" on the derivative along the geodesic
    ls_mode: str = "armijo"

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not 0 < self.ls_shrink < 1:
            raise ValueError("ls_shrink must lie in (0, 1)")
        if not self.ls_mu_max > 0:
            raise ValueError("ls_mu_max must be positive")
        if self.max_iters < 0 or self.max_inner_phase_sweeps < 1 or self.ls_max_trials < 1:
            raise ValueError("iteration counts must be positive")
        if self.sense not in (None, "maximize", "minimize"):
            raise ValueError(f"unknown sense {self.sense!r}")
        if self.ls_mode not in ("armijo", "bisection"):
            raise ValueError(f"unknown ls_mode {self.ls_mode!r}")


@dataclass
class OptimReport:
    iterations: int = 0
    cost_trace: list = field(default_factory=list)
    grad_norm_trace: list = field(default_factory=list)
    elapsed_trace: list = field(default_factory=list)
    wall_time_s: float = 0.0
    converged: bool = False
    stop_reason: str = "max_iters"
    initial_cost: float = float("nan")
    final_cost: float = float("nan")
    final_grad_norm: float = float("nan")

    def per_iteration_times(self):
        t = np.diff(np.concatenate([[0.0], self.elapsed_trace]))
        return t


def _sign(cost, cfg):
    sense = cfg.sense or getattr(cost, "sense", "maximize")
    return 1.0 if sense == "maximize" else -1.0


def riemannian_grad(cost, u, sense=None):
    """Tangent projection of the Euclidean gradient; negated for minimization."""
    sense = sense or getattr(cost, "sense", "maximize")
    j = cost.euclid_grad(u)
    if sense == "minimize":
        j = -j
    return project_tangent(u, j)


def _converged(f_new, f_old, cfg):
    tol = cfg.eps * abs(f_old) if cfg.relative_eps else cfg.eps
    return abs(f_new - f_old) < tol


def scalar_phase_search(fun, current, grid=64, width=1e-10):
    """Maximize a 2*pi-periodic scalar function.

    Coarse grid over [0, 2*pi) followed by golden-section refinement on the
    bracket around the best grid point. The current phase is kept unless a
    strictly better value is found.

    Returns
    -------
    (phi, value)
    """
    step = 2 * np.pi / grid
    pts = np.arange(grid) * step
    vals = np.array([fun(p) for p in pts])
    k = int(np.argmax(vals))
    best_phi, best_val = pts[k], vals[k]

    a, b = pts[k] - step, pts[k] + step
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > width:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fun(d)
    for phi, val in ((c, fc), (d, fd)):
        if val > best_val:
            best_phi, best_val = phi, val

    cur_val = fun(current)
    if cur_val >= best_val:
        return current, cur_val
    return float(np.mod(best_phi, 2 * np.pi)), best_val


def _start(cost, u0):
    report = OptimReport()
    report.initial_cost = float(cost.value(u0))
    return report, report.initial_cost


def _finish(report, cost, u, f, sign, t0):
    report.final_cost = float(f)
    j = sign * cost.euclid_grad(u)
    report.final_grad_norm = project_tangent(u, j).norm() if isinstance(u, UsPoint) else float("nan")
    report.wall_time_s = time.perf_counter() - t0
    return report


def _record(report, f, gn, t0):
    report.iterations += 1
    report.cost_trace.append(float(f))
    report.grad_norm_trace.append(float(gn))
    report.elapsed_trace.append(time.perf_counter() - t0)


def optimize_po(cost, u0, cfg=None):
    """Riemannian ascent with per-phase block-coordinate updates.

    Each iteration projects the gradient, builds the geodesic frame and then
    sweeps the phases ``m = 0..n-1`` (from zero, i.e. the current point),
    setting each to its closed-form optimum when the cost provides one and
    to a grid + golden-section search otherwise. The Takagi factor is
    updated with half phases. Stops when ``|F_k - F_{k-1}| < eps``.

    Returns
    -------
    (UsPoint, OptimReport)
    """
    cfg = cfg or OptimConfig()
    sign = _sign(cost, cfg)
    t0 = time.perf_counter()
    # closed-form updates follow the cost's own sense; an override searches
    native = cfg.sense is None or cfg.sense == getattr(cost, "sense", "maximize")
    report, f = _start(cost, u0)
    u = u0
    for _ in range(cfg.max_iters):
        d = project_tangent(u, sign * cost.euclid_grad(u))
        gn = d.norm()
        if gn < STATIONARY_TOL:
            _record(report, f, gn, t0)
            report.converged, report.stop_reason = True, "threshold"
            break
        frame = geodesic_frame(u, d)
        phases = np.zeros(frame.n)
        ctx = cost.phase_context(frame, phases)
        for _sweep in range(cfg.max_inner_phase_sweeps):
            if native and cost.phase_sweep(frame, phases, ctx) is not NotImplemented:
                continue
            for m in range(frame.n):
                phi = cost.phase_update(m, frame, phases, ctx) if native else None
                if phi is None:
                    phi, _ = scalar_phase_search(
                        lambda p: sign * cost.phase_value(m, p, frame, phases, ctx),
                        phases[m])
                cost.phase_commit(m, phi, frame, phases, ctx)
                phases[m] = phi
        u_new = geodesic_point(frame, phases)
        f_new = float(cost.value(u_new))
        done = _converged(f_new, f, cfg)
        u, f = u_new, f_new
        _record(report, f, gn, t0)
        if done:
            report.converged, report.stop_reason = True, "threshold"
            break
    return u, _finish(report, cost, u, f, sign, t0)


def _bisection_step(cost, frame, f, sign, cfg, mu0):
    """Root of the derivative along the geodesic; None if no improvement found."""
    def slope(mu):
        pt = frame.at(mu)
        du = (frame.q_r * (1j * frame.thetas * np.exp(1j * mu * frame.thetas))) @ frame.q_r.T
        return inner(sign * cost.euclid_grad(pt), du)

    lo, hi = 0.0, mu0
    trials = 0
    while slope(hi) > 0 and trials < cfg.ls_max_trials:
        lo, hi = hi, 2 * hi
        trials += 1
    for _ in range(cfg.ls_max_trials):
        mid = 0.5 * (lo + hi)
        if slope(mid) > 0:
            lo = mid
        else:
            hi = mid
    mu = 0.5 * (lo + hi)
    cand = frame.at(mu)
    fc = float(cost.value(cand))
    if sign * (fc - f) > 0:
        return cand, fc
    return None


def optimize_ls(cost, u0, cfg=None):
    """Riemannian ascent along geodesics with a common step size.

    The step is chosen by Armijo backtracking,
    ``f(U(mu)) >= f(U) + c * mu * ||grad||^2``, starting from
    ``ls_mu_max / max|theta|`` so that the largest phase turns by
    ``ls_mu_max`` radians whatever the scale of the cost. With
    ``cfg.ls_mode == "bisection"`` the step is a root of the derivative
    along the geodesic, falling back to Armijo when that does not improve
    the cost.

    Returns
    -------
    (UsPoint, OptimReport)
    """
    cfg = cfg or OptimConfig()
    sign = _sign(cost, cfg)
    t0 = time.perf_counter()
    report, f = _start(cost, u0)
    u = u0
    for _ in range(cfg.max_iters):
        d = project_tangent(u, sign * cost.euclid_grad(u))
        gn = d.norm()
        if gn < STATIONARY_TOL:
            _record(report, f, gn, t0)
            report.converged, report.stop_reason = True, "threshold"
            break
        frame = geodesic_frame(u, d)
        mu0 = cfg.ls_mu_max / np.max(np.abs(frame.thetas))

        step = None
        if cfg.ls_mode == "bisection":
            step = _bisection_step(cost, frame, f, sign, cfg, mu0)
        if step is None:
            mu = mu0
            for _ in range(cfg.ls_max_trials):
                cand = frame.at(mu)
                fc = float(cost.value(cand))
                if sign * (fc - f) >= cfg.ls_armijo_c * mu * gn ** 2:
                    step = cand, fc
                    break
                mu *= cfg.ls_shrink
        if step is None:
            _record(report, f, gn, t0)
            report.stop_reason = "stalled_line_search"
            break
        u_new, f_new = step
        done = _converged(f_new, f, cfg)
        u, f = u_new, f_new
        _record(report, f, gn, t0)
        if done:
            report.converged, report.stop_reason = True, "threshold"
            break
    return u, _finish(report, cost, u, f, sign, t0)


def _skew(x):
    return 0.5 * (x - x.conj().T)


def optimize_unitary_then_project(cost, u0, cfg=None):
    """Baseline: gradient ascent on the unitary group, then retraction onto U_s.

    Iterates ``U <- U expm(mu * S)`` with ``S = skew(U^H J)`` and an Armijo
    step, ignoring symmetry. The result is ``retract(U + U^T)``.

    Returns
    -------
    (UsPoint, OptimReport)
        The report's trace holds costs of the unitary iterates; its
        ``final_cost`` is the cost of the projected point.
    """
    cfg = cfg or OptimConfig()
    sign = _sign(cost, cfg)
    t0 = time.perf_counter()
    u = np.array(_as_matrix(u0), dtype=complex)
    report, f = _start(cost, u)
    for _ in range(cfg.max_iters):
        s = _skew(u.conj().T @ (sign * cost.euclid_grad(u)))
        gn = fro(s)
        if gn < STATIONARY_TOL:
            _record(report, f, gn, t0)
            report.converged, report.stop_reason = True, "threshold"
            break
        # s = j * h with h Hermitian, so expm(mu s) = W diag(exp(j mu w)) W^H
        w, vecs = np.linalg.eigh(-1j * s)
        mu = cfg.ls_mu_max / np.max(np.abs(w))
        step = None
        for _ in range(cfg.ls_max_trials):
            cand = u @ ((vecs * np.exp(1j * mu * w)) @ vecs.conj().T)
            fc = float(cost.value(cand))
            if sign * (fc - f) >= cfg.ls_armijo_c * mu * gn ** 2:
                step = cand, fc
                break
            mu *= cfg.ls_shrink
        if step is None:
            _record(report, f, gn, t0)
            report.stop_reason = "stalled_line_search"
            break
        u_new, f_new = step
        done = _converged(f_new, f, cfg)
        u, f = u_new, f_new
        _record(report, f, gn, t0)
        if done:
            report.converged, report.stop_reason = True, "threshold"
            break
    point = retract(u + u.T)
    report.final_cost = float(cost.value(point))
    report.final_grad_norm = project_tangent(point, sign * cost.euclid_grad(point)).norm()
    report.wall_time_s = time.perf_counter() - t0
    return point, report
