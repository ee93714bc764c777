# %% [markdown]
# # Low-rank reduction
#
# Only ``U_Z^H Theta U_Z^*`` reaches the receiver, where ``U_Z`` spans the
# columns of ``[F^H | G^T]``. With two antennas at each end the problem shrinks
# from U_s(M) to U_s(4) whatever the surface size.

# %%
import numpy as np

from usmanifold import OptimConfig, optimize_po, random_point
from usmanifold.bdris import (Scenario, compress, expand, gen_channels, h_eq, lift,
                              low_rank_reduce, sumgain_cost)
from usmanifold.linalg import fro

ch = gen_channels(Scenario(m=48), seed=5)
red = low_rank_reduce(ch)
print("M =", ch.m, " reduced size r =", red.r)

# %% [markdown]
# Any full matrix can be replaced by its lifted compression without changing
# the channel, and the lift is a contraction.

# %%
theta = random_point(48, seed=6).u
lr = lift(compress(theta, red), red)
a = ch.f @ theta @ ch.g.conj().T
print("channel mismatch", fro(a - ch.f @ lr @ ch.g.conj().T) / fro(a))
print("spectral norm of lift", np.linalg.norm(lr, 2))

# %% [markdown]
# Optimize over U_s(r), then complete to a full-rank point of U_s(M).

# %%
cfg = OptimConfig(eps=1e-10, relative_eps=True)
small, rep_low = optimize_po(sumgain_cost(red.channel), random_point(red.r, seed=7), cfg)
full = expand(small, red)
_, rep_full = optimize_po(sumgain_cost(ch), random_point(48, seed=7), cfg)
print(f"reduced optimum {rep_low.final_cost:.6g} ({rep_low.wall_time_s * 1e3:.1f} ms)")
print(f"full optimum    {rep_full.final_cost:.6g} ({rep_full.wall_time_s * 1e3:.1f} ms)")
print("expanded point gives", sumgain_cost(ch).value(full))
print("unitarity of expansion", fro(full.u @ full.u.conj().T - np.eye(48)))
