# %% [markdown]
# # Per-iteration cost
#
# Full-rank iterations work on M x M matrices (eigendecomposition, products),
# while the reduced problem stays r x r, so its iteration time barely moves
# with M.

# %%
from usmanifold.experiments import bench

rows = bench([16, 32, 64], "sumgain", ("po-full", "po-low"), trials=3, iters=25, repeats=3)
med = {(m, v): t for m, v, t, _ in rows}
for m, v, t, n in rows:
    print(f"M={m:<3d} {v:<8s} {t * 1e3:7.3f} ms per iteration ({n} samples)")

# %%
for v in ("po-full", "po-low"):
    print(f"{v}: M=64 / M=16 = {med[(64, v)] / med[(16, v)]:.2f}")
