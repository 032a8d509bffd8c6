# %% [markdown]
# # Recovering a hidden rotation
#
# Two "embedding sources" describe the same 100 words, but the second one is
# the first one rotated by an unknown orthogonal matrix. Plain averaging of
# the two would mix unrelated dimensions. We learn U, V (rotations) and B
# (a Mahalanobis metric) so that the bilinear score (U x_i)^T B (V z_j) is
# high for i == j and low otherwise, then check that each word finds itself.

# %%
import numpy as np

from geometa.objective import gram_from_matrices, loss, pair_scores
from geometa.optimizer import SolverConfig, init_identity, solve
from geometa.synthetic import random_rotation

rng = np.random.default_rng(0)
d, n = 10, 100
x = rng.standard_normal((d, n))
x /= np.linalg.norm(x, axis=0)
q = random_rotation(rng, d)
z = q @ x

# %% [markdown]
# Everything the solver needs is in three d x d second-moment matrices, so
# one pass over the data is enough no matter how many words there are.

# %%
cache = gram_from_matrices(x, z)
cfg = SolverConfig(reg_c=1.0)
print("loss at identity :", round(loss(init_identity(d), cache, cfg.reg_c), 4))

point, trace = solve(cache, cfg)
print("loss after solve :", round(trace.records[-1].loss, 4))
print("iterations       :", trace.n_steps, f"({trace.termination})")

# %% [markdown]
# Nearest-neighbour retrieval in the learned latent space: for every word i in
# the first source, which word of the second source scores highest?

# %%
def retrieval(scores):
    return float(np.mean(scores.argmax(axis=1) == np.arange(scores.shape[0])))


print("retrieval, identity maps :", retrieval(pair_scores(init_identity(d), x, z)))
print("retrieval, learned maps  :", retrieval(pair_scores(point, x, z)))

# %% [markdown]
# The optimum is reached through W = U^T B V ~ (X X^T)^{-1} Q^T. Starting from
# the identity keeps U and V inside the rotation group (determinant +1), so when
# det(Q) = -1 the solver settles in a slightly higher-loss optimum. Retrieval
# is still near perfect, as the run above shows.

# %%
print("det(Q) =", round(float(np.linalg.det(q)), 6))
losses = trace.losses
print("loss trace is non-increasing:", bool(np.all(np.diff(losses) <= 0)))
