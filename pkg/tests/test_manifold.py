import warnings

import numpy as np
import pytest
from scipy.linalg import expm

from usmanifold import (CayleySingular, DegenerateRetraction, DimensionError,
                        NotSymmetric, NotUnitarySymmetric, TangentDirection,
                        UsPoint, cayley, cayley_inv, geodesic_frame,
                        geodesic_point, load_point, project_tangent,
                        random_point, real_orth_decomp, retract, save_point,
                        takagi)
from usmanifold.linalg import fro


def cn(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def rsym(rng, n):
    a = rng.standard_normal((n, n))
    return (a + a.T) / 2


def unitary(rng, n):
    q, _ = np.linalg.qr(cn(rng, (n, n)))
    return q


def assert_valid(pt, tol=1e-9):
    n = pt.n
    assert fro(pt.u @ pt.u.conj().T - np.eye(n)) <= tol * n
    assert fro(pt.u - pt.u.T) <= tol * n
    assert fro(pt.u - pt.q @ pt.q.T) <= tol * n
    assert fro(pt.q @ pt.q.conj().T - np.eye(n)) <= tol * n


# takagi

def test_takagi_diagonal():
    q, s = takagi(np.diag([2.0, 1.0]))
    np.testing.assert_allclose(s, [2, 1])
    np.testing.assert_allclose(q, np.eye(2), atol=1e-15)


def test_takagi_repeated_singular_values():
    a = np.array([[0, 1], [1, 0]], dtype=complex)
    q, s = takagi(a)
    np.testing.assert_allclose(s, [1, 1])
    assert fro(q @ q.T - a) <= 1e-8
    assert fro(q @ q.conj().T - np.eye(2)) <= 2e-9


def test_takagi_forward_constructed():
    q0 = unitary(np.random.default_rng(1), 3)
    a = q0 @ np.diag([3.0, 2.0, 1.0]) @ q0.T
    q, s = takagi(a)
    np.testing.assert_allclose(s, [3, 2, 1], atol=1e-12)
    assert fro(a - (q * s) @ q.T) <= 1e-9


def test_takagi_clustered_and_zero_singular_values():
    rng = np.random.default_rng(2)
    q0 = unitary(rng, 6)
    a = q0 @ np.diag([2.0, 2.0, 2.0, 1.0, 0.0, 0.0]) @ q0.T
    q, s = takagi(a)
    assert fro(a - (q * s) @ q.T) <= 1e-8 * fro(a)
    assert fro(q @ q.conj().T - np.eye(6)) <= 6e-9


def test_takagi_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        takagi(np.array([[1, 2], [0, 1]], dtype=complex))


# retract

def test_retract_positive_diagonal_is_identity():
    np.testing.assert_allclose(retract(np.diag([3.0, 0.5])).u, np.eye(2), atol=1e-15)


def test_retract_scaling_invariance():
    u = random_point(5, 3)
    assert fro(retract(2 * u.u).u - u.u) <= 1e-12


def test_retract_beats_random_samples():
    rng = np.random.default_rng(4)
    h = cn(rng, (2, 2))
    a = h + h.T
    best = fro(a - retract(a).u)
    # random points of U_s(2): V diag(e^{j t}) V^T with V random real orthogonal
    ang = rng.uniform(0, 2 * np.pi, 100_000)
    ph = rng.uniform(-np.pi, np.pi, (100_000, 2))
    c, s = np.cos(ang), np.sin(ang)
    v = np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)
    samples = np.einsum("sij,sj,skj->sik", v, np.exp(1j * ph), v)
    dists = np.linalg.norm(a[None] - samples, axis=(1, 2))
    assert best <= dists.min() + 1e-12


def test_retract_degenerate_warns_and_strict_raises():
    a = np.diag([1.0, 0.0]).astype(complex)
    with pytest.warns(DegenerateRetraction):
        pt = retract(a)
    assert_valid(pt)
    with pytest.raises(DegenerateRetraction) as exc:
        retract(a, strict=True)
    assert exc.value.point is not None


def test_retract_equals_polar_factor():
    rng = np.random.default_rng(5)
    h = cn(rng, (6, 6))
    a = h + h.T
    f, _, gh = np.linalg.svd(a)
    assert fro(retract(a).u - f @ gh) <= 1e-12


# tangent projection

def test_project_real_symmetric_at_identity():
    u = UsPoint.from_factor(np.eye(3))
    assert fro(project_tangent(u, rsym(np.random.default_rng(6), 3)).r) == 0


def test_project_imaginary_entry():
    u = UsPoint.from_factor(np.eye(2))
    r = project_tangent(u, 1j * np.diag([1.0, 0.0])).r
    np.testing.assert_allclose(r, [[1, 0], [0, 0]], atol=1e-15)


def test_project_off_diagonal_matches_least_squares():
    u = UsPoint.from_factor(np.eye(2))
    j = np.array([[0, 1j], [0, 0]])
    r = project_tangent(u, j).r
    np.testing.assert_allclose(r, [[0, 0.5], [0.5, 0]], atol=1e-15)
    # dense least squares over the 3-dimensional tangent basis j * E_kl
    basis = []
    for a, b in ((0, 0), (1, 1), (0, 1)):
        e = np.zeros((2, 2))
        e[a, b] = e[b, a] = 1
        basis.append(np.concatenate([(1j * e).real.ravel(), (1j * e).imag.ravel()]))
    coef, *_ = np.linalg.lstsq(np.array(basis).T,
                               np.concatenate([j.real.ravel(), j.imag.ravel()]), rcond=None)
    np.testing.assert_allclose(coef, [r[0, 0], r[1, 1], r[0, 1]], atol=1e-14)


def test_project_output_exactly_symmetric():
    rng = np.random.default_rng(7)
    u = random_point(9, 1)
    r = project_tangent(u, cn(rng, (9, 9))).r
    np.testing.assert_array_equal(r, r.T)


def test_project_dimension_mismatch():
    with pytest.raises(DimensionError):
        project_tangent(random_point(3, 0), np.eye(4))


# geodesics

def test_frame_at_identity():
    u = UsPoint.from_factor(np.eye(2))
    fr = geodesic_frame(u, TangentDirection(u, np.diag([np.pi, 0.0])))
    np.testing.assert_allclose(fr.q_r, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(fr.thetas, [np.pi, 0])
    np.testing.assert_allclose(fr.at(1.0).u, np.diag([-1, 1]), atol=1e-15)


def test_zero_direction_reproduces_base():
    u = random_point(4, 2)
    fr = geodesic_frame(u, TangentDirection(u, np.zeros((4, 4))))
    np.testing.assert_array_equal(fr.thetas, 0)
    for mu in (0.0, 0.7, 5.0):
        assert fro(fr.at(mu).u - u.u) <= 1e-12


def test_frame_point_zero_is_base():
    rng = np.random.default_rng(8)
    u = random_point(7, 3)
    fr = geodesic_frame(u, TangentDirection(u, rsym(rng, 7)))
    assert fro(fr.point(np.zeros(7)).u - u.u) <= 1e-9 * 7
    assert fro(fr.q_r @ fr.q_r.conj().T - np.eye(7)) <= 1e-9 * 7


def test_geodesic_against_expm():
    rng = np.random.default_rng(9)
    u = random_point(6, 4)
    r = rsym(rng, 6)
    fr = geodesic_frame(u, TangentDirection(u, r))
    pt = geodesic_point(fr, 0.37 * fr.thetas)
    assert_valid(pt)
    want = u.u @ expm(1j * 0.37 * (u.q.conj() @ r @ u.q.T))
    assert fro(pt.u - want) <= 1e-8


def test_geodesic_half_phase_factor():
    rng = np.random.default_rng(10)
    u = random_point(5, 5)
    fr = geodesic_frame(u, TangentDirection(u, rsym(rng, 5)))
    phases = rng.uniform(-3, 3, 5)
    pt = geodesic_point(fr, phases)
    np.testing.assert_allclose(pt.q, fr.q_r * np.exp(0.5j * phases), atol=1e-15)


def test_geodesic_velocity_is_tangent():
    rng = np.random.default_rng(11)
    u = random_point(5, 6)
    r = rsym(rng, 5)
    fr = geodesic_frame(u, TangentDirection(u, r))
    t = 1e-7
    vel = (fr.at(t).u - fr.at(-t).u) / (2 * t)
    assert fro(vel - TangentDirection(u, r).ambient) <= 1e-6 * fro(r)


# cayley

def test_cayley_zero_and_scalar():
    np.testing.assert_allclose(cayley(np.zeros((3, 3))).u, np.eye(3), atol=1e-15)
    np.testing.assert_allclose(cayley(np.array([[1.0]])).u, [[-1j]], atol=1e-15)


def test_cayley_matches_rational_formula():
    b = rsym(np.random.default_rng(12), 4)
    eye = np.eye(4)
    want = np.linalg.solve(eye + 1j * b, eye - 1j * b)
    assert fro(cayley(b).u - want) <= 1e-12


def test_cayley_inverse_examples():
    np.testing.assert_allclose(cayley_inv(UsPoint.from_factor(np.eye(2))), 0, atol=1e-15)
    np.testing.assert_allclose(cayley_inv(np.array([[-1j]])), [[1.0]], atol=1e-14)
    with pytest.raises(CayleySingular):
        cayley_inv(np.array([[-1.0 + 0j]]))


def test_cayley_round_trip():
    b = rsym(np.random.default_rng(13), 4)
    assert fro(cayley_inv(cayley(b)) - b) <= 1e-9


# real-orthogonal decomposition

def test_real_orth_examples():
    v, th = real_orth_decomp(np.eye(3, dtype=complex))
    assert fro(v @ np.diag(np.exp(1j * th)) @ v.T - np.eye(3)) <= 1e-15
    np.testing.assert_allclose(th, 0, atol=1e-15)
    v, th = real_orth_decomp(np.diag([-1.0, 1.0]).astype(complex))
    np.testing.assert_allclose(np.sort(th), [0, np.pi], atol=1e-15)
    assert fro((v * np.exp(1j * th)) @ v.T - np.diag([-1, 1])) <= 1e-15


def test_real_orth_of_cayley_point():
    u = cayley(rsym(np.random.default_rng(14), 6))
    v, th = real_orth_decomp(u)
    assert np.isrealobj(v)
    assert fro(v.T @ v - np.eye(6)) <= 1e-12
    assert fro(u.u - (v * np.exp(1j * th)) @ v.T) <= 1e-8 * 6
    q = v * np.exp(0.5j * th)
    assert fro(q @ q.T - u.u) <= 1e-8 * 6
    assert np.all(th > -np.pi) and np.all(th <= np.pi)


def test_real_orth_repeated_eigenvalues_including_minus_one():
    rng = np.random.default_rng(15)
    v0, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    th0 = np.array([np.pi, np.pi, 0.3, 0.3, -0.3, 1.0])
    u = (v0 * np.exp(1j * th0)) @ v0.T
    v, th = real_orth_decomp(u)
    assert fro(u - (v * np.exp(1j * th)) @ v.T) <= 1e-10
    np.testing.assert_allclose(np.sort(th), np.sort(th0), atol=1e-10)


# random points and persistence

def test_random_point_examples():
    p = random_point(1, 5)
    assert abs(abs(p.u[0, 0]) - 1) <= 1e-15
    np.testing.assert_array_equal(random_point(8, 3).u, random_point(8, 3).u)
    assert_valid(random_point(8, 3))
    with pytest.raises(ValueError):
        random_point(0, 1)


def test_from_matrix_validates():
    with pytest.raises(NotUnitarySymmetric):
        UsPoint.from_matrix(np.array([[0, 1], [-1, 0]], dtype=complex))
    u = random_point(5, 9)
    p = UsPoint.from_matrix(u.u)
    assert fro(p.q @ p.q.T - u.u) <= 1e-9 * 5


def test_save_load_point(tmp_path):
    u = random_point(6, 11)
    save_point(tmp_path / "u.cmx", u)
    v = load_point(tmp_path / "u.cmx")
    assert fro(v.u - u.u) <= 1e-12
    assert_valid(v)


def test_no_spurious_warnings_on_generic_input():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        random_point(12, 1)
