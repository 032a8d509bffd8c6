"""Meta-embeddings: plain and geometry-aware averaging and concatenation."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .embio import AlignedPair, EmbeddingTable
from .errors import DimensionMismatchError
from .manifold import ProductPoint, sqrt_spd


class MetaMode(str, enum.Enum):
    AVG = "avg"
    CONC = "conc"
    GEO_AVG = "geo-avg"
    GEO_CONC = "geo-conc"

    @property
    def is_geometric(self) -> bool:
        return self in (MetaMode.GEO_AVG, MetaMode.GEO_CONC)


@dataclass(frozen=True, eq=False)
class LatentMap:
    """Maps each source into the learned latent space: ``s @ u_map`` and ``s @ v_map``.

    ``s`` is the symmetric square root of the metric B.
    """

    s: np.ndarray
    u_map: np.ndarray
    v_map: np.ndarray

    @property
    def dim(self) -> int:
        return self.s.shape[0]

    def project_x(self, x: np.ndarray) -> np.ndarray:
        return self.s @ (self.u_map @ x)

    def project_z(self, z: np.ndarray) -> np.ndarray:
        return self.s @ (self.v_map @ z)


def make_latent_map(p: ProductPoint) -> LatentMap:
    return LatentMap(sqrt_spd(p.b), np.array(p.u), np.array(p.v))


def build_meta(
    pair: AlignedPair,
    latent: LatentMap | None = None,
    mode: MetaMode | str = MetaMode.GEO_AVG,
    renorm: bool = False,
) -> EmbeddingTable:
    """Combine the two sources of ``pair`` into one table over the shared words.

    AVG and CONC ignore ``latent``. GEO_AVG and GEO_CONC first map each
    source through ``latent``. Averaged outputs keep dimension d, concatenated
    ones have 2d. With ``renorm`` every output vector is scaled to unit norm.
    """
    mode = MetaMode(mode)
    x = pair.x_table.vectors
    z = pair.z_table.vectors
    if mode.is_geometric:
        if latent is None:
            raise ValueError(f"mode {mode.value} requires a latent map")
        if latent.dim != pair.dim:
            raise DimensionMismatchError(
                f"latent map has d={latent.dim}, embeddings have d={pair.dim}"
            )
        x = latent.project_x(x)
        z = latent.project_z(z)

    if mode in (MetaMode.AVG, MetaMode.GEO_AVG):
        out = (x + z) / 2
    else:
        out = np.vstack([x, z])

    if renorm:
        norms = np.linalg.norm(out, axis=0)
        out = out / np.where(norms > 0, norms, 1.0)
    return EmbeddingTable(pair.words, out)
