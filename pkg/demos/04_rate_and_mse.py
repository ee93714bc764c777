# %% [markdown]
# # Rate and MSE designs against the baselines
#
# Small Monte Carlo sweep over surface sizes. ``unitary-proj`` ignores the
# symmetry constraint during optimization and projects at the end;
# ``low-cost`` is the retracted matched filter (direct link needed).

# %%
from usmanifold.bdris import Scenario
from usmanifold.experiments import sweep

TRIALS = 5

rows, _ = sweep("rate", [16, 32], TRIALS, seed=0, base=Scenario().blocked(),
                variants=["po-low", "ls-low", "unitary-proj"])
print("blocked direct link, rate in bits")
for m, v, mean, std, iters, t in rows:
    print(f"  M={m:<3d} {v:<14s} {mean:8.3f} +- {std:.3f}  ({iters:.0f} it, {t:.2f} s)")

# %%
rows, _ = sweep("rate", [16], TRIALS, seed=0, variants=["po-low", "low-cost"])
print("direct link present")
for m, v, mean, std, *_ in rows:
    print(f"  M={m:<3d} {v:<14s} {mean:8.3f} +- {std:.3f}")

# %% [markdown]
# The MSE design against the max-rate design scored by MSE.

# %%
import math

rows, _ = sweep("mse", [16], TRIALS, seed=0, variants=["po-low", "mse-of-max-rate"])
means = {v: mean for _, v, mean, *_ in rows}
for v, mean in means.items():
    print(f"  {v:<16s} MSE {mean:.4e}")
print(f"  gap {10 * math.log10(means['mse-of-max-rate'] / means['po-low']):.2f} dB")
