# %% [markdown]
# # Geometry of unitary symmetric matrices
#
# Every unitary symmetric matrix factors as ``U = Q Q^T`` with ``Q`` unitary.
# This walk-through builds points, moves along geodesics and compares the
# geodesic with the Cayley map.

# %%
import numpy as np

from usmanifold import (TangentDirection, cayley, cayley_inv, geodesic_frame,
                        project_tangent, random_point, real_orth_decomp, retract)
from usmanifold.linalg import fro

rng = np.random.default_rng(0)
u = random_point(6, seed=1)
print("unitarity residual", fro(u.u @ u.u.conj().T - np.eye(6)))
print("symmetry residual ", fro(u.u - u.u.T))

# %% [markdown]
# ## Retraction
# The closest unitary symmetric matrix to a complex symmetric ``A`` is its
# polar factor, computed here from the Takagi factorization.

# %%
a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
p = retract(a + a.T)
print("distance to retraction", fro(a + a.T - p.u))

# %% [markdown]
# ## Tangent vectors and geodesics
# Tangent vectors at ``U`` are ``j Q R Q^T`` with ``R`` real symmetric.
# Projecting an arbitrary matrix keeps only that part.

# %%
d = project_tangent(u, rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
frame = geodesic_frame(u, d)
for mu in (0.0, 0.1, 0.5, 1.0):
    pt = frame.at(mu)
    print(f"mu={mu:3.1f}  distance from start {fro(pt.u - u.u):.4f}  "
          f"unitarity {fro(pt.u @ pt.u.conj().T - np.eye(6)):.1e}")

# %% [markdown]
# ## Cayley map
# ``cayley(B) = (I + jB)^{-1}(I - jB)`` also lands on the manifold, but its
# velocity at the origin is ``-2j B'`` while the geodesic's is ``+j B'``.

# %%
b = rng.standard_normal((4, 4))
b = (b + b.T) / 2
c = cayley(b)
print("round trip error", fro(cayley_inv(c) - b))
t = 1e-6
vel = (cayley(t * b).u - np.eye(4)) / t
print("velocity / (-2j B)", np.round(np.real(np.vdot(-2j * b, vel)) / fro(2 * b) ** 2, 6))

# %% [markdown]
# ## Real orthogonal form
# ``U = V diag(exp(j theta)) V^T`` with ``V`` real orthogonal.

# %%
v, th = real_orth_decomp(c)
print("V real orthogonal:", fro(v.T @ v - np.eye(4)) < 1e-12)
print("phases", np.round(th, 4))
