import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from usmanifold import cayley, cayley_inv, project_tangent, random_point, retract
from usmanifold.bdris import (MimoChannel, complete_full_rank, lift, low_rank_reduce,
                              rate_cost)
from usmanifold.linalg import fro, read_cmatrix, wrap_angle, write_cmatrix

sizes = st.integers(1, 12)
seeds = st.integers(0, 2**32 - 1)
finite = st.floats(-1e6, 1e6, allow_nan=False)


def cn(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def rsym(rng, n):
    a = rng.standard_normal((n, n))
    return (a + a.T) / 2


@settings(max_examples=60, deadline=None)
@given(sizes, seeds)
def test_retraction_lands_on_manifold(n, seed):
    rng = np.random.default_rng(seed)
    a = cn(rng, (n, n))
    u = retract(a + a.T).u
    assert fro(u @ u.conj().T - np.eye(n)) <= 1e-9 * n
    assert fro(u - u.T) <= 1e-9 * n


@settings(max_examples=60, deadline=None)
@given(sizes, seeds)
def test_projection_is_idempotent(n, seed):
    rng = np.random.default_rng(seed)
    u = random_point(n, seed)
    d = project_tangent(u, cn(rng, (n, n)))
    again = project_tangent(u, d.ambient)
    assert fro(again.r - d.r) <= 1e-10 * max(1.0, fro(d.r))


@settings(max_examples=60, deadline=None)
@given(sizes, seeds)
def test_projection_residual_is_orthogonal(n, seed):
    rng = np.random.default_rng(seed)
    u = random_point(n, seed)
    j = cn(rng, (n, n))
    d = project_tangent(u, j)
    other = project_tangent(u, cn(rng, (n, n))).ambient
    assert abs(np.real(np.vdot(j - d.ambient, other))) <= 1e-10 * fro(j) * max(1, fro(other))


@settings(max_examples=60, deadline=None)
@given(sizes, seeds, st.floats(0.01, 5.0))
def test_cayley_round_trip(n, seed, scale):
    b = scale * rsym(np.random.default_rng(seed), n)
    back = cayley_inv(cayley(b))
    assert fro(back - b) <= 1e-8 * (1 + fro(b)) ** 2


@settings(max_examples=40, deadline=None)
@given(r=st.integers(1, 6), c=st.integers(1, 6),
       values=st.lists(finite, min_size=72, max_size=72))
def test_cmx_round_trip(tmp_path_factory, r, c, values):
    v = np.array(values[: 2 * r * c]).reshape(2, r, c)
    a = v[0] + 1j * v[1]
    p = tmp_path_factory.mktemp("cmx") / "a.cmx"
    write_cmatrix(p, a)
    np.testing.assert_array_equal(read_cmatrix(p), a)


@given(st.floats(-1e3, 1e3, allow_nan=False))
def test_wrap_angle_range_and_equivalence(x):
    w = float(wrap_angle(x))
    assert -np.pi < w <= np.pi
    assert abs(np.exp(1j * w) - np.exp(1j * x)) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(5, 14), seeds)
def test_lift_preserves_channel_and_contracts(m, seed):
    rng = np.random.default_rng(seed)
    ch = MimoChannel(h_d=cn(rng, (2, 2)), f=cn(rng, (2, m)), g=cn(rng, (2, m)))
    red = low_rank_reduce(ch)
    theta = random_point(m, seed).u
    lifted = lift(red.u_z.conj().T @ theta @ red.u_z.conj(), red)
    a = ch.f @ theta @ ch.g.conj().T
    assert fro(a - ch.f @ lifted @ ch.g.conj().T) <= 1e-9 * fro(a)
    assert np.linalg.norm(lifted, 2) <= 1 + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(5, 14), seeds)
def test_completion_keeps_reduced_rate(m, seed):
    rng = np.random.default_rng(seed)
    ch = MimoChannel(h_d=cn(rng, (2, 2)), f=cn(rng, (2, m)), g=cn(rng, (2, m)))
    red = low_rank_reduce(ch)
    small = random_point(red.r, seed)
    full = complete_full_rank(red.u_z @ small.q)
    want = rate_cost(red.channel).value(small)
    assert abs(rate_cost(ch).value(full) - want) <= 1e-9 * max(1.0, want)
