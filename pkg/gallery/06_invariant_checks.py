# %% [markdown]
# # Invariant checks
#
# The verify suites re-derive structural facts by brute force: coset counts,
# nearest-point neighbor lists, label injectivity, and the shrinking gap
# between two ways of computing the side excess as the lattice is refined.

# %%
from mdlvq.verify import deviation_trend, run_suite

rep = run_suite("properties", max_ns=45)
print(f"{sum(r.passed for r in rep.results)}/{len(rep.results)} checks pass")
for line in rep.lines()[:8]:
    print(line)

# %%
for p in deviation_trend():
    print(f"scale {p.n}: relative deviation {float(p.ratio):.4g}, labeling cell {p.cell_size}")

# %%
for line in run_suite("cld2", M=3).lines():
    print(line)
