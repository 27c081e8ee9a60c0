# %% [markdown]
# # Labeling function for two descriptions
#
# Each base point gets a pair of labels, one from each coarse sublattice.
# The pair is found by a min-cost assignment over one period of the
# product sublattice; the labeling then extends to the whole lattice by shifts.

# %%
import numpy as np

from mdlvq import build_system, make_lattice, solve_labeling
from mdlvq.labeling import EdgeStructure, extreme_optima, neighbor_list
from mdlvq.rings import GaussianInt

Z2 = make_lattice("Zn", 2)
system = build_system(Z2, GaussianInt(2, 1), GaussianInt(3, 0))
print("N1, N2, N_s =", system.N1, system.N2, system.N_s)

es = EdgeStructure(system)
print("cell sizes:", len(es.V0), len(es.P1), len(es.P2))
print("side-1 neighbors of (2, 1):", sorted(map(tuple, neighbor_list(system, 1, (2, 1)).tolist())))

# %% [markdown]
# Weights (9, 5) favour description 1.  The optimal cost is exact.

# %%
lab = solve_labeling(system, 9, 5)
print("total cost", lab.cost)
print("side excess per point", [str(x) for x in lab.side_excess()])
for p, a, b in list(zip(lab.points.tolist(), lab.lam1.tolist(), lab.lam2.tolist()))[:6]:
    print(p, "->", a, b)

# %% [markdown]
# Labels follow shifts of the product sublattice.

# %%
t = np.array(system.product.basis[0])
a1, a2 = lab.label(lab.points[:1] + t)
print(a1 - lab.lam1[:1], a2 - lab.lam2[:1], "shift", t)

# %% [markdown]
# With equal weights there are several optima of equal cost that split the
# excess differently between the two sides.

# %%
lo, hi = extreme_optima(system, 1, 1)
print(lo.cost, [str(x) for x in lo.side_excess()])
print(hi.cost, [str(x) for x in hi.side_excess()])
