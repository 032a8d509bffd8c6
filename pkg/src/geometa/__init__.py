"""Geometry-aware word meta-embeddings.

Two embedding sources are rotated into a shared latent space (orthogonal U, V)
and rescaled by a learned Mahalanobis metric B, then averaged or concatenated.
"""

from .embio import (
    AlignedPair,
    EmbeddingTable,
    PreprocessOptions,
    intersect_vocab,
    load_embeddings,
    preprocess,
    save_embeddings,
)
from .errors import (
    DataError,
    DatasetError,
    DimensionMismatchError,
    EmbeddingFormatError,
    EmptyIntersectionError,
    GeoMetaError,
    LineSearchError,
    ManifoldError,
    SolverError,
)
from .evaluation import (
    AnalogyDataset,
    EvalReport,
    SimilarityDataset,
    answer_analogy,
    eval_analogy,
    eval_similarity,
    spearman,
)
from .manifold import ProductPoint, TangentVector, sqrt_spd
from .meta import LatentMap, MetaMode, build_meta, make_latent_map
from .objective import GramCache, build_gram_cache, euclidean_grads, loss, riemannian_grad
from .optimizer import SolverConfig, SolveTrace, init_identity, solve
from .params import load_params, save_params

__version__ = "0.1.0"
