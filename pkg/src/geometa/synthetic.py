"""Synthetic embedding sources and benchmarks with a known ground truth.

A hidden "true" table G (d x n) is drawn first. Source X is G plus noise,
source Z is a random rotation of G plus independent noise, so aligning the
sources amounts to undoing that rotation. Benchmarks are scored against G.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embio import EmbeddingTable, save_embeddings
from .evaluation import ANA_SCORED_SUFFIX, ANA_SUFFIX, SIM_SUFFIX, AnalogyDataset, SimilarityDataset


@dataclass(frozen=True)
class SyntheticWorld:
    truth: EmbeddingTable
    x: EmbeddingTable
    z: EmbeddingTable
    rotation: np.ndarray
    similarity: SimilarityDataset
    analogy: AnalogyDataset
    analogy_scored: AnalogyDataset


def random_rotation(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-distributed orthogonal matrix."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def make_world(
    n_words: int = 1000,
    dim: int = 20,
    noise: float = 0.6,
    n_pairs: int = 200,
    n_analogies: int = 100,
    extra_words: int = 0,
    seed: int = 0,
) -> SyntheticWorld:
    """Build two noisy, rotated views of one hidden embedding table.

    ``extra_words`` words are added to each source only, so the vocabulary
    intersection is smaller than either source. Analogy quadruples are planted
    exactly in the hidden table (``g_d = g_b - g_a + g_c``).
    """
    rng = np.random.default_rng(seed)
    words = [f"w{i:05d}" for i in range(n_words)]
    g = rng.standard_normal((dim, n_words))

    n_ana = min(n_analogies, n_words // 4)
    quads = rng.permutation(n_words)[: 4 * n_ana].reshape(n_ana, 4)
    g /= np.linalg.norm(g, axis=0)
    for a, b, c, d in quads:
        g[:, d] = g[:, b] - g[:, a] + g[:, c]

    rot = random_rotation(rng, dim)
    scale = noise / np.sqrt(dim)
    xv = g + scale * rng.standard_normal(g.shape)
    zv = rot @ g + scale * rng.standard_normal(g.shape)

    x_words = list(words) + [f"x_only{i}" for i in range(extra_words)]
    z_words = list(words) + [f"z_only{i}" for i in range(extra_words)]
    xv = np.hstack([xv, rng.standard_normal((dim, extra_words))])
    zv = np.hstack([zv, rng.standard_normal((dim, extra_words))])

    unit = g / np.linalg.norm(g, axis=0)
    idx = rng.integers(0, n_words, size=(n_pairs, 2))
    idx = idx[idx[:, 0] != idx[:, 1]]
    sim_rows = tuple(
        (words[i], words[j], round(float(5 + 5 * unit[:, i] @ unit[:, j]), 4)) for i, j in idx
    )

    ana_rows = tuple((words[a], words[b], words[c], words[d]) for a, b, c, d in quads)
    # scored variant: half the rows keep the planted answer, half get a random word
    scored_rows, gold = [], []
    for k, (a, b, c, d) in enumerate(quads):
        dd = d if k % 2 == 0 else int(rng.integers(0, n_words))
        target = g[:, b] - g[:, a] + g[:, c]
        cos = float(target @ g[:, dd] / (np.linalg.norm(target) * np.linalg.norm(g[:, dd])))
        scored_rows.append((words[a], words[b], words[c], words[dd]))
        gold.append(round(cos, 4))

    return SyntheticWorld(
        truth=EmbeddingTable(tuple(words), g),
        x=EmbeddingTable(tuple(x_words), xv),
        z=EmbeddingTable(tuple(z_words), zv),
        rotation=rot,
        similarity=SimilarityDataset("synsim", sim_rows),
        analogy=AnalogyDataset("synana", ana_rows),
        analogy_scored=AnalogyDataset("synsem", tuple(scored_rows), tuple(gold)),
    )


def write_world(world: SyntheticWorld, directory: str | os.PathLike) -> dict[str, Path]:
    """Write sources and benchmark files; returns their paths by role."""
    directory = Path(directory)
    data = directory / "datasets"
    data.mkdir(parents=True, exist_ok=True)
    paths = {"x": directory / "source_x.txt", "z": directory / "source_z.txt", "datasets": data}
    save_embeddings(world.x, paths["x"])
    save_embeddings(world.z, paths["z"])

    with open(data / f"{world.similarity.name}{SIM_SUFFIX}", "w", encoding="utf-8") as fh:
        for a, b, s in world.similarity.rows:
            fh.write(f"{a}\t{b}\t{s}\n")
    with open(data / f"{world.analogy.name}{ANA_SUFFIX}", "w", encoding="utf-8") as fh:
        for row in world.analogy.rows:
            fh.write("\t".join(row) + "\n")
    with open(data / f"{world.analogy_scored.name}{ANA_SCORED_SUFFIX}", "w", encoding="utf-8") as fh:
        for row, s in zip(world.analogy_scored.rows, world.analogy_scored.gold):
            fh.write("\t".join(row) + f"\t{s}\n")
    return paths
