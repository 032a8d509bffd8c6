# %% [markdown]
# # The O(d) x O(d) x SPD(d) toolkit
#
# A tour of the geometric primitives the optimizer is built on: tangent
# projections, retractions, the affine-invariant metric on SPD matrices and
# the matrix square root used to map embeddings into the latent space.

# %%
import numpy as np

from geometa import manifold as mf
from geometa.synthetic import random_rotation

rng = np.random.default_rng(1)
d = 5
u = random_rotation(rng, d)

# %% [markdown]
# ## Tangent vectors at a rotation
# A tangent vector xi at u satisfies u^T xi + xi^T u = 0. Projection removes
# the symmetric (normal) part.

# %%
g = rng.standard_normal((d, d))
xi = mf.project_tangent_orth(u, g)
a = u.T @ xi
print("||u^T xi + (u^T xi)^T|| =", np.linalg.norm(a + a.T))

# %% [markdown]
# ## QR retraction
# Moving along xi and re-orthonormalizing. The gap to the straight line
# u + t xi shrinks like t^2.

# %%
for t in (1e-1, 1e-2, 1e-3):
    r = mf.retract_orth(u, xi, t)
    print(f"t={t:g}  orth error={mf.orth_error(r):.1e}  gap={np.linalg.norm(r - (u + t * xi)):.2e}")

# %% [markdown]
# ## SPD factor
# The retraction B + t xi + t^2/2 xi B^-1 xi equals B/2 + (B + t xi) B^-1 (B + t xi)/2,
# a sum of a positive definite and a positive semidefinite matrix, so even a
# huge step stays in the cone.

# %%
b = np.eye(d)
xi_b = -10 * np.eye(d)
for t in (0.05, 0.5, 5.0):
    out = mf.retract_spd(b, xi_b, t)
    print(f"t={t:g}  min eigenvalue={np.linalg.eigvalsh(out).min():.4f}")

# %% [markdown]
# ## Matrix square root
# The latent representation of a word is B^{1/2} U x. The square root comes
# from a symmetric eigendecomposition.

# %%
b = np.array([[4.0, 1.0], [1.0, 3.0]])
s = mf.sqrt_spd(b)
print(s)
print("||S S - B|| =", np.linalg.norm(s @ s - b))
