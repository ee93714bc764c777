"""Seeded invariant suites with independent oracles.

Each suite draws its instances from a counter-based generator, compares the
library against an oracle that shares as little code with it as possible
(dense matrix exponential, brute-force grids, random sampling, finite
differences) and returns a :class:`CheckResult` holding the worst observed
error next to its limit. The suites back both ``usmanifold verify`` and the
acceptance tests.
"""
import time
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize_scalar

from .bdris.channels import MimoChannel, Scenario, gen_channels
from .bdris.costs import mse_cost, rate_cost, sumgain_cost
from .bdris.lowrank import complete_full_rank, compress, lift, low_rank_reduce
from .errors import DegenerateRetraction
from .linalg import fro, inner
from .manifold import (TangentDirection, UsPoint, cayley, cayley_inv,
                       geodesic_frame, geodesic_point, project_tangent,
                       random_point, retract)
from .optim import OptimConfig, optimize_po

__all__ = [
    "CheckResult", "manifold_invariants", "tangent_space", "geodesic_expm",
    "cayley_checks", "gradient_checks", "phase_update_checks",
    "lowrank_checks", "saturation_check", "SUITES", "run_suites",
]


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float
    limit: float
    cases: int
    elapsed_s: float
    note: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        text = (f"{status} {self.name}: worst={self.worst:.3e} limit={self.limit:.1e} "
                f"cases={self.cases} time={self.elapsed_s:.2f}s")
        return f"{text} ({self.note})" if self.note else text


def _rng(seed):
    return np.random.Generator(np.random.Philox(seed))


def _cn(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _rsym(rng, n):
    a = rng.standard_normal((n, n))
    return (a + a.T) / 2


class _Worst:
    """Tracks the largest ``error / limit`` ratio seen."""

    def __init__(self):
        self.ratio = 0.0
        self.error = 0.0
        self.limit = 1.0
        self.cases = 0

    def add(self, error, limit):
        self.cases += 1
        r = error / limit if limit > 0 else (np.inf if error > 0 else 0.0)
        if not np.isfinite(error):
            r = np.inf
        if r >= self.ratio:
            self.ratio, self.error, self.limit = r, float(error), float(limit)

    def result(self, name, t0, note=""):
        return CheckResult(name, self.ratio <= 1.0, self.error, self.limit, self.cases,
                           time.perf_counter() - t0, note)


def _point_residuals(pt):
    n = pt.n
    eye = np.eye(n)
    unit = fro(pt.u @ pt.u.conj().T - eye)
    sym = fro(pt.u - pt.u.T)
    tak = fro(pt.u - pt.q @ pt.q.T) + fro(pt.q @ pt.q.conj().T - eye)
    return max(unit, sym, tak)


_SIZES = (1, 2, 3, 4, 5, 8, 12, 16, 24, 32, 48, 64)


def manifold_invariants(n_ops=500, seed=0, max_n=64):
    """Every constructor of points yields a valid point (residuals <= 1e-9 n)."""
    t0 = time.perf_counter()
    rng = _rng(seed)
    sizes = [n for n in _SIZES if n <= max_n]
    worst = _Worst()
    for k in range(n_ops):
        n = sizes[k % len(sizes)]
        kind = (k // len(sizes)) % 4
        if kind == 0:
            h = _cn(rng, (n, n))
            pt = retract(h + h.T)
        elif kind == 1:
            base = random_point(n, seed + k)
            frame = geodesic_frame(base, TangentDirection(base, _rsym(rng, n)))
            pt = geodesic_point(frame, rng.uniform(0, 2) * frame.thetas)
        elif kind == 2:
            pt = cayley(rng.uniform(0.1, 10) * _rsym(rng, n))
        else:
            n_rx = n_tx = max(1, min(2, (n - 1) // 2))
            ch = MimoChannel(h_d=_cn(rng, (n_rx, n_tx)), f=_cn(rng, (n_rx, n)),
                             g=_cn(rng, (n_tx, n)))
            red = low_rank_reduce(ch)
            small = random_point(red.r, seed + k)
            # lift followed by a full-rank completion of the lifted factor
            lifted = lift(small.u, red)
            q = red.u_z @ small.q
            if fro(q @ q.T - lifted) > 1e-9 * n:
                worst.add(np.inf, 1.0)
            pt = complete_full_rank(q)
        worst.add(_point_residuals(pt), 1e-9 * n)
    return worst.result("manifold invariants", t0)


def tangent_space(n_pairs=200, n_dirs=50, seed=1, max_n=12):
    """Both tangent characterizations agree; projection is idempotent and orthogonal."""
    t0 = time.perf_counter()
    rng = _rng(seed)
    worst = _Worst()
    for k in range(n_pairs):
        n = 1 + k % max_n
        u = random_point(n, seed * 1000 + k)
        r = _rsym(rng, n)
        r /= max(fro(r), 1e-300)
        b = 1j * u.q @ r @ u.q.T
        worst.add(fro(u.u.conj().T @ b + b.conj().T @ u.u), 1e-9 * n)
        worst.add(fro(b - b.T), 1e-9 * n)
        worst.add(fro(project_tangent(u, b).ambient - b), 1e-8)
        j = _cn(rng, (n, n))
        j_perp = j - project_tangent(u, j).ambient
        if k < n_dirs:
            for _ in range(n_dirs):
                bp = TangentDirection(u, _rsym(rng, n)).ambient
                worst.add(abs(inner(j_perp, bp)), 1e-8 * fro(j) * fro(bp))
    # real dimension of the tangent space is n(n+1)/2
    for n in range(1, 7):
        u = random_point(n, seed + n)
        cols = []
        for i in range(n):
            for l in range(i + 1):
                e = np.zeros((n, n))
                e[i, l] = e[l, i] = 1.0
                b = 1j * u.q @ e @ u.q.T
                cols.append(np.concatenate([b.real.ravel(), b.imag.ravel()]))
        rank = np.linalg.matrix_rank(np.array(cols).T)
        worst.add(float(rank != n * (n + 1) // 2), 0.5)
    return worst.result("tangent space", t0)


def geodesic_expm(n_cases=100, seed=2, max_n=16):
    """Geodesic points against ``u expm(j mu conj(q) r q^T)`` (scaling-and-squaring)."""
    t0 = time.perf_counter()
    rng = _rng(seed)
    worst = _Worst()
    for k in range(n_cases):
        n = 1 + k % max_n
        base = random_point(n, seed * 1000 + k)
        r = _rsym(rng, n)
        mu = rng.uniform(0, 2)
        frame = geodesic_frame(base, TangentDirection(base, r))
        got = geodesic_point(frame, mu * frame.thetas)
        want = base.u @ expm(1j * mu * (base.q.conj() @ r @ base.q.T))
        worst.add(fro(got.u - want), 1e-8)
        # two successive steps along the same geodesic
        mu2 = rng.uniform(0, 1)
        mid = geodesic_point(frame, mu * frame.thetas)
        second = geodesic_frame(mid, TangentDirection(mid, np.diag(frame.thetas)))
        both = geodesic_point(second, mu2 * second.thetas)
        once = geodesic_point(frame, (mu + mu2) * frame.thetas)
        worst.add(fro(both.u - once.u), 1e-8 * n)
    return worst.result("geodesic vs expm", t0)


def cayley_checks(n_cases=100, seed=3, max_n=8, t=1e-6):
    """Round trip ``cayley_inv(cayley(b)) = b``; derivative at 0 is ``-2j b'``."""
    t0 = time.perf_counter()
    rng = _rng(seed)
    worst = _Worst()
    deriv = _Worst()
    for k in range(n_cases):
        n = 1 + k % max_n
        b = _rsym(rng, n)
        worst.add(fro(cayley_inv(cayley(b)) - b), 1e-9)
        bd = _rsym(rng, n)
        eye = np.eye(n)
        fd_c = (cayley(t * bd).u - eye) / t
        fd_e = (expm(1j * t * bd) - eye) / t
        deriv.add(fro(fd_c + 2j * bd), 1e-4 * fro(bd))
        deriv.add(fro(fd_e - 1j * bd), 1e-4 * fro(bd))
    if deriv.ratio > worst.ratio:
        worst = deriv
    note = f"round trip and derivative factor -2 vs +1 at t={t:g}"
    return worst.result("cayley", t0, note)


_GRAD_COSTS = {"sumgain": sumgain_cost, "rate": rate_cost, "mse": mse_cost}


def gradient_checks(n_cases=20, seed=4, m=8, t=1e-6, costs=("sumgain", "rate", "mse")):
    """Central differences along geodesics against ``<grad, B>``, relative error."""
    t0 = time.perf_counter()
    rng = _rng(seed)
    worst = _Worst()
    for name in costs:
        for k in range(n_cases):
            ch = gen_channels(Scenario(m=m), seed * 1000 + k)
            cost = _GRAD_COSTS[name](ch)
            u = random_point(m, seed * 2000 + k)
            r = _rsym(rng, m)
            r /= fro(r)
            d = TangentDirection(u, r)
            slope = inner(cost.euclid_grad(u), d.ambient)
            frame = geodesic_frame(u, d)
            fd = (cost.value(geodesic_point(frame, t * frame.thetas))
                  - cost.value(geodesic_point(frame, -t * frame.thetas))) / (2 * t)
            worst.add(abs(fd - slope), 1e-4 * abs(slope))
    return worst.result("gradients", t0, ",".join(costs))


def _slice_fun(cost, frame, phases, m):
    def fun(phi):
        trial = np.array(phases, dtype=float)
        trial[m] = phi
        return cost.value(geodesic_point(frame, trial))
    return fun


def _circ(a, b):
    d = np.mod(a - b, 2 * np.pi)
    return min(d, 2 * np.pi - d)


def _local_maxima(vals):
    return int(np.sum((vals > np.roll(vals, 1)) & (vals >= np.roll(vals, -1))))


def phase_update_checks(n_cases=50, seed=5, grid=4096):
    """Closed-form phases against a brute-force grid and a bounded refinement.

    The grid evaluates the full cost at the rebuilt point, independently of
    the channel split used by the closed forms. Also counts local maxima on
    each slice (a unique maximizer per phase).
    """
    t0 = time.perf_counter()
    rng = _rng(seed)
    worst = _Worst()
    multi = 0
    cell = 2 * np.pi / grid
    pts = np.arange(grid) * cell
    for name, factory in (("sumgain", sumgain_cost), ("rate", rate_cost)):
        for k in range(n_cases):
            ch = gen_channels(Scenario(m=16), seed * 1000 + k)
            if name == "rate":
                ch = low_rank_reduce(ch).channel
            cost = factory(ch)
            n = ch.m
            u = random_point(n, seed * 2000 + k)
            frame = geodesic_frame(u, TangentDirection(u, _rsym(rng, n)))
            phases = rng.uniform(-np.pi, np.pi, n)
            m = int(rng.integers(n))
            ctx = cost.phase_context(frame, phases)
            phi = cost.phase_update(m, frame, phases, ctx)
            fun = _slice_fun(cost, frame, phases, m)
            vals = np.array([fun(p) for p in pts])
            best = int(np.argmax(vals))
            worst.add(_circ(phi, pts[best]), cell)
            ref = minimize_scalar(lambda p: -fun(p), bounds=(pts[best] - cell, pts[best] + cell),
                                  method="bounded", options={"xatol": 1e-12})
            v_ref = max(-ref.fun, vals[best])
            worst.add(abs(fun(phi) - v_ref), 1e-8 * max(1.0, abs(v_ref)))
            multi += _local_maxima(vals) != 1
    res = worst.result("phase updates", t0, f"slices with several local maxima: {multi}")
    res.passed = res.passed and multi == 0
    return res


def lowrank_checks(n_pairs=100, seed=6):
    """Channel equality after compress/lift and spectral contraction of the lift."""
    t0 = time.perf_counter()
    worst = _Worst()
    ms = (8, 16, 32)
    for k in range(n_pairs):
        m = ms[k % len(ms)]
        ch = gen_channels(Scenario(m=m), seed * 1000 + k)
        theta = random_point(m, seed * 2000 + k).u
        red = low_rank_reduce(ch)
        lr = lift(compress(theta, red), red)
        full = ch.f @ theta @ ch.g.conj().T
        worst.add(fro(full - ch.f @ lr @ ch.g.conj().T), 1e-9 * fro(full))
        worst.add(max(np.linalg.norm(lr, 2) - 1.0, 0.0), 1e-12)
    return worst.result("low-rank equality and contraction", t0)


def _sample_bs2(rng, count):
    """Symmetric 2x2 contractions; half on the spectral-norm sphere."""
    a = _cn(rng, (count, 2, 2))
    a = (a + a.transpose(0, 2, 1)) / 2
    norms = np.linalg.norm(a, 2, axis=(1, 2))
    radius = np.where(np.arange(count) % 2 == 0, 1.0, rng.uniform(0, 1, count) ** 0.25)
    return a * (radius / norms)[:, None, None]


def saturation_check(n_instances=5, n_samples=100_000, seed=7, m=6):
    """PO over U_s(2) beats the best of many symmetric contractions in B_s(2)."""
    t0 = time.perf_counter()
    rng = _rng(seed)
    worst = _Worst()
    for k in range(n_instances):
        ch = MimoChannel(h_d=_cn(rng, (1, 1)), f=_cn(rng, (1, m)), g=_cn(rng, (1, m)))
        red = low_rank_reduce(ch)
        cost = sumgain_cost(red.channel)
        best_po = -np.inf
        for start in range(4):
            _, rep = optimize_po(cost, random_point(red.r, seed * 100 + 10 * k + start),
                                 OptimConfig(eps=1e-14, max_iters=5000))
            best_po = max(best_po, rep.final_cost)
        samples = _sample_bs2(rng, n_samples)
        ft, gt = red.f_tilde, red.g_tilde
        h = ch.h_d[None] + np.einsum("ij,sjk,lk->sil", ft, samples, gt.conj())
        best_sample = float(np.max(np.sum(np.abs(h) ** 2, axis=(1, 2))))
        worst.add(max(best_sample - best_po, 0.0), 1e-9)
    return worst.result("U_s(2) saturation", t0, f"{n_samples} samples per instance")


SUITES = {
    "manifold": manifold_invariants,
    "tangent": tangent_space,
    "geodesic": geodesic_expm,
    "cayley": cayley_checks,
    "gradients": gradient_checks,
    "phase": phase_update_checks,
    "lowrank": lowrank_checks,
    "saturation": saturation_check,
}


def run_suites(names=None):
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateRetraction)
        for name in names or SUITES:
            out.append(SUITES[name]())
    return out
