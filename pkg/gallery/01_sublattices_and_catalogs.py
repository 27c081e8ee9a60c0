# %% [markdown]
# # Similar sublattices and cleanliness
#
# A similar sublattice is a rotated and scaled copy of the base lattice.
# It is clean when no base point sits on a Voronoi boundary of the copy,
# so every base point has a unique nearest sublattice point.

# %%
from mdlvq import make_lattice, similar_sublattice, is_clean
from mdlvq.rings import EisensteinInt, GaussianInt
from mdlvq.sublattice import catalog_rows, clean_index_catalog, exhaustive_clean_search_D4

Z2 = make_lattice("Zn", 2)
for xi in (GaussianInt(2, 1), GaussianInt(1, 1), GaussianInt(3, 0), GaussianInt(2, 0)):
    s = similar_sublattice(Z2, xi)
    print(f"xi = {xi!s:6}  index {s.index:3}  scale^2 {s.similarity.scale_sq}  clean {is_clean(Z2, s)}")

# %% [markdown]
# In Z^2 the index is the Gaussian norm and only odd indices are clean.

# %%
for r in catalog_rows("Zn", 2, 30):
    print(r.N, r.xi, "clean" if r.clean else "-")

# %% [markdown]
# The hexagonal lattice A2 uses Eisenstein multipliers.

# %%
A2 = make_lattice("A2", 2)
print(is_clean(A2, similar_sublattice(A2, EisensteinInt(3, 1))))
print("A2 clean indices:", clean_index_catalog("A2", 2, 100))

# %% [markdown]
# For D4 the index is M^2.  An exhaustive search over quaternion frames
# shows there is no clean similar sublattice at M = 3.

# %%
print("D4 clean M:", [int(n**0.5) for n in clean_index_catalog("D4", 4, 30)])
for M in (3, 5):
    res = exhaustive_clean_search_D4(M)
    print(f"M={M}: {res.n_sublattices} similar sublattices, clean exists: {res.exists_clean}")
