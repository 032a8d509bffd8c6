"""Word-similarity and word-analogy benchmarks.

Dataset files are tab-separated:

* ``*.sim.tsv``        ``word1  word2  score``
* ``*.ana.tsv``        ``a  b  c  answer``
* ``*.anascored.tsv``  ``a  b  c  d  gold_score``

Blank lines and lines starting with ``#`` are ignored. Tokens are used as is,
no case folding. Items touching an out-of-vocabulary word are skipped and
counted in the report.

The scored-analogy variant is a simplified stand-in for SemEval-2012 Task 2:
each row is scored by ``cos(b - a + c, d)`` and the scores are rank-correlated
with the gold column. It is not the official MaxDiff protocol.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

from .embio import EmbeddingTable
from .errors import DatasetError

SIM_SUFFIX = ".sim.tsv"
ANA_SUFFIX = ".ana.tsv"
ANA_SCORED_SUFFIX = ".anascored.tsv"

_QUERY_BATCH = 256


@dataclass(frozen=True)
class SimilarityDataset:
    name: str
    rows: tuple[tuple[str, str, float], ...]


@dataclass(frozen=True)
class AnalogyDataset:
    name: str
    rows: tuple[tuple[str, str, str, str], ...]
    gold: tuple[float, ...] | None = None

    @property
    def scored(self) -> bool:
        return self.gold is not None


@dataclass(frozen=True)
class EvalReport:
    dataset: str
    metric: str
    score: float
    n_total: int
    n_used: int

    @property
    def n_skipped(self) -> int:
        return self.n_total - self.n_used

    @property
    def coverage(self) -> float:
        return self.n_used / self.n_total if self.n_total else 0.0

    def as_row(self) -> dict:
        row = asdict(self)
        row["coverage"] = self.coverage
        return row


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman rank correlation, ties receiving their average rank."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("spearman needs two 1-D sequences of equal length")
    if xs.size < 2:
        raise ValueError("spearman needs at least two observations")
    rx = rankdata(xs) - (xs.size + 1) / 2
    ry = rankdata(ys) - (ys.size + 1) / 2
    sx = np.sqrt(np.dot(rx, rx))
    sy = np.sqrt(np.dot(ry, ry))
    if sx == 0 or sy == 0:
        raise ValueError("spearman is undefined for a constant sequence")
    return float(np.clip(np.dot(rx, ry) / (sx * sy), -1.0, 1.0))


def _rank_corr(name: str, model: list[float], gold: list[float]) -> float:
    try:
        return spearman(model, gold)
    except ValueError as exc:
        raise DatasetError(f"{name}: {exc}") from None


def _cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def _unit_columns(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=0)
    return vectors / np.where(norms > 0, norms, 1.0)


def eval_similarity(t: EmbeddingTable, ds: SimilarityDataset) -> EvalReport:
    model, human = [], []
    for w1, w2, score in ds.rows:
        if w1 in t and w2 in t:
            model.append(_cosine(t.vector(w1), t.vector(w2)))
            human.append(score)
    if len(model) < 2:
        raise DatasetError(f"{ds.name}: fewer than 2 in-vocabulary pairs")
    return EvalReport(ds.name, "spearman", _rank_corr(ds.name, model, human), len(ds.rows), len(model))


def answer_analogy(t: EmbeddingTable, a: str, b: str, c: str) -> str:
    """3CosAdd: the word closest in cosine to ``b - a + c``, query words excluded.

    Ties go to the word that comes first in the vocabulary.
    """
    for w in (a, b, c):
        if w not in t:
            raise KeyError(f"out-of-vocabulary query word {w!r}")
    if len(t) <= len({a, b, c}):
        raise DatasetError("vocabulary has no candidate besides the query words")
    vecs = t.vectors
    target = vecs[:, t.index[b]] - vecs[:, t.index[a]] + vecs[:, t.index[c]]
    unit = _unit_columns(vecs)
    scores = unit.T @ target
    for w in (a, b, c):
        scores[t.index[w]] = -np.inf
    return t.words[int(np.argmax(scores))]


def eval_analogy(t: EmbeddingTable, ds: AnalogyDataset, scored: bool | None = None) -> EvalReport:
    """Accuracy of 3CosAdd answers, or Spearman against gold scores when ``scored``."""
    scored = ds.scored if scored is None else scored
    if scored and ds.gold is None:
        raise DatasetError(f"{ds.name}: scored evaluation needs gold scores")
    idx = t.index
    used = [i for i, row in enumerate(ds.rows) if all(w in idx for w in (row if scored else row[:3]))]
    if not used:
        raise DatasetError(f"{ds.name}: no in-vocabulary questions")

    if scored:
        model = []
        for i in used:
            a, b, c, d = ds.rows[i]
            model.append(_cosine(t.vector(b) - t.vector(a) + t.vector(c), t.vector(d)))
        gold = [ds.gold[i] for i in used]
        return EvalReport(ds.name, "spearman", _rank_corr(ds.name, model, gold), len(ds.rows), len(used))

    if len(t) <= 3:
        raise DatasetError("vocabulary too small for analogy search")
    # Row targets use raw vectors, matching answer_analogy exactly.
    vecs = t.vectors
    unit = _unit_columns(vecs)
    correct = 0
    for lo in range(0, len(used), _QUERY_BATCH):
        batch = used[lo:lo + _QUERY_BATCH]
        q = [(idx[ds.rows[i][0]], idx[ds.rows[i][1]], idx[ds.rows[i][2]]) for i in batch]
        ia, ib, ic = (np.array(col) for col in zip(*q))
        target = vecs[:, ib] - vecs[:, ia] + vecs[:, ic]
        scores = target.T @ unit
        rows = np.arange(len(batch))
        for col in (ia, ib, ic):
            scores[rows, col] = -np.inf
        best = scores.argmax(axis=1)
        for i, j in zip(batch, best):
            correct += t.words[j] == ds.rows[i][3]
    return EvalReport(ds.name, "accuracy", correct / len(used), len(ds.rows), len(used))


def _read_tsv(path: Path, ncols: int) -> list[list[str]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != ncols or not all(f.strip() for f in fields):
                raise DatasetError(f"{path}:{lineno}: expected {ncols} tab-separated fields")
            rows.append([f.strip() for f in fields])
    return rows


def _dataset_name(path: Path, suffix: str) -> str:
    return path.name[: -len(suffix)]


def _float(value: str, path: Path) -> float:
    try:
        return float(value)
    except ValueError:
        raise DatasetError(f"{path}: bad score {value!r}") from None


def load_similarity_dataset(path: str | os.PathLike) -> SimilarityDataset:
    path = Path(path)
    rows = tuple((a, b, _float(s, path)) for a, b, s in _read_tsv(path, 3))
    name = _dataset_name(path, SIM_SUFFIX) if path.name.endswith(SIM_SUFFIX) else path.stem
    return SimilarityDataset(name, rows)


def load_analogy_dataset(path: str | os.PathLike, scored: bool = False) -> AnalogyDataset:
    path = Path(path)
    if scored:
        raw = _read_tsv(path, 5)
        rows = tuple((a, b, c, d) for a, b, c, d, _ in raw)
        gold = tuple(_float(r[4], path) for r in raw)
        suffix = ANA_SCORED_SUFFIX
    else:
        rows = tuple(tuple(r) for r in _read_tsv(path, 4))
        gold = None
        suffix = ANA_SUFFIX
    name = _dataset_name(path, suffix) if path.name.endswith(suffix) else path.stem
    return AnalogyDataset(name, rows, gold)


def discover_datasets(directory: str | os.PathLike) -> list[SimilarityDataset | AnalogyDataset]:
    """Load every benchmark file in ``directory``, sorted by file name."""
    directory = Path(directory)
    if not directory.is_dir():
        raise DatasetError(f"{directory}: not a directory")
    found = []
    for path in sorted(directory.iterdir()):
        if path.name.endswith(SIM_SUFFIX):
            found.append(load_similarity_dataset(path))
        elif path.name.endswith(ANA_SCORED_SUFFIX):
            found.append(load_analogy_dataset(path, scored=True))
        elif path.name.endswith(ANA_SUFFIX):
            found.append(load_analogy_dataset(path))
    if not found:
        raise DatasetError(f"{directory}: no *{SIM_SUFFIX}, *{ANA_SUFFIX} or *{ANA_SCORED_SUFFIX} files")
    return found


def evaluate(t: EmbeddingTable, ds: SimilarityDataset | AnalogyDataset) -> EvalReport:
    if isinstance(ds, SimilarityDataset):
        return eval_similarity(t, ds)
    return eval_analogy(t, ds)
