"""Compiled closed-form phase sweeps.

Each kernel performs the same sequence of per-phase updates as the
``phase_update``/``phase_commit`` pair of the matching cost, updating the
running channel ``h`` and ``phases`` in place.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def _angle(x):
    a = np.arctan2(x.imag, x.real)
    if a <= -np.pi:
        a = np.pi
    return a


@njit(cache=True)
def sumgain_sweep(fq, gq, h, phases):
    nr, n = fq.shape
    nt = gq.shape[0]
    for m in range(n):
        e_old = np.exp(1j * phases[m])
        fhg = 0j
        ff = 0.0
        gg = 0.0
        for i in range(nr):
            fi = fq[i, m]
            ff += fi.real * fi.real + fi.imag * fi.imag
            acc = 0j
            for k in range(nt):
                acc += h[i, k] * gq[k, m]
            fhg += np.conj(fi) * acc
        for k in range(nt):
            gk = gq[k, m]
            gg += gk.real * gk.real + gk.imag * gk.imag
        # f^H S g with S = h - e_old f g^H; the optimum is -angle(conj(.))
        x = fhg - e_old * ff * gg
        if x == 0:
            continue
        new = _angle(x)
        delta = np.exp(1j * new) - e_old
        for i in range(nr):
            for k in range(nt):
                h[i, k] += delta * fq[i, m] * np.conj(gq[k, m])
        phases[m] = new


@njit(cache=True)
def rate_sweep(fq, gq, h, phases):
    nr, n = fq.shape
    nt = gq.shape[0]
    s = np.empty((nr, nt), dtype=np.complex128)
    a = np.empty((nr, nr), dtype=np.complex128)
    sg = np.empty(nr, dtype=np.complex128)
    for m in range(n):
        e_old = np.exp(1j * phases[m])
        f = fq[:, m]
        g = gq[:, m]
        gg = 0.0
        for k in range(nt):
            gg += g[k].real * g[k].real + g[k].imag * g[k].imag
        for i in range(nr):
            for k in range(nt):
                s[i, k] = h[i, k] - e_old * f[i] * np.conj(g[k])
        for i in range(nr):
            acc = 0j
            for k in range(nt):
                acc += s[i, k] * g[k]
            sg[i] = acc
            for j in range(nr):
                v = 0j
                for k in range(nt):
                    v += s[i, k] * np.conj(s[j, k])
                a[i, j] = v + gg * f[i] * np.conj(f[j])
            a[i, i] += 1.0
        y = np.linalg.solve(a, sg)
        x = 0j
        for i in range(nr):
            x += np.conj(f[i]) * y[i]
        if x == 0:
            continue
        new = _angle(x)
        delta = np.exp(1j * new) - e_old
        for i in range(nr):
            for k in range(nt):
                h[i, k] += delta * f[i] * np.conj(g[k])
        phases[m] = new


@njit(cache=True)
def mse_slice_value(a0, f, w, phi):
    """``tr(E^{-1})`` for ``E = a0 + e f w^H + conj(e) w f^H``, ``e = exp(j phi)``."""
    e = np.exp(1j * phi)
    n = a0.shape[0]
    mat = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        for k in range(n):
            mat[i, k] = a0[i, k] + e * f[i] * np.conj(w[k]) + np.conj(e) * w[i] * np.conj(f[k])
    inv = np.linalg.inv(mat)
    acc = 0.0
    for i in range(n):
        acc += inv[i, i].real
    return acc
