"""Reading, writing, cleaning and intersecting word2vec text-format embeddings.

Tables are stored column-major: ``vectors[:, i]`` is the embedding of
``words[i]``, so a table with ``n`` words in ``d`` dimensions holds a
``(d, n)`` matrix.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, EmbeddingFormatError, EmptyIntersectionError

__all__ = [
    "EmbeddingTable",
    "PreprocessOptions",
    "AlignedPair",
    "load_embeddings",
    "save_embeddings",
    "intersect_vocab",
    "preprocess",
]

_CHUNK = 50_000


@dataclass(frozen=True, eq=False)
class EmbeddingTable:
    """An ordered vocabulary with one column vector per word."""

    words: tuple[str, ...]
    vectors: np.ndarray

    def __post_init__(self):
        words = tuple(self.words)
        vectors = np.array(self.vectors, dtype=np.float64, copy=True)
        if vectors.ndim != 2:
            raise EmbeddingFormatError(f"vectors must be 2-D (d, n), got shape {vectors.shape}")
        d, n = vectors.shape
        if n < 1 or d < 1:
            raise EmbeddingFormatError(f"empty table: d={d}, n={n}")
        if len(words) != n:
            raise EmbeddingFormatError(f"{len(words)} words for {n} vectors")
        if len(set(words)) != n:
            raise EmbeddingFormatError("duplicate tokens in table")
        for w in words:
            if not w or any(ch.isspace() for ch in w):
                raise EmbeddingFormatError(f"invalid token {w!r}")
        if not np.all(np.isfinite(vectors)):
            raise EmbeddingFormatError("non-finite entries in vectors")
        vectors.setflags(write=False)
        object.__setattr__(self, "words", words)
        object.__setattr__(self, "vectors", vectors)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def __len__(self) -> int:
        return len(self.words)

    @cached_property
    def index(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.words)}

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def vector(self, word: str) -> np.ndarray:
        return self.vectors[:, self.index[word]]

    def subset(self, words: Sequence[str]) -> "EmbeddingTable":
        """Table restricted to ``words``, in the given order."""
        idx = [self.index[w] for w in words]
        return EmbeddingTable(tuple(words), self.vectors[:, idx])

    def equals(self, other: "EmbeddingTable", atol: float = 0.0) -> bool:
        return (
            self.words == other.words
            and self.vectors.shape == other.vectors.shape
            and bool(np.all(np.abs(self.vectors - other.vectors) <= atol))
        )


@dataclass(frozen=True)
class PreprocessOptions:
    unit_normalize: bool = True
    mean_center: bool = False


@dataclass(frozen=True, eq=False)
class AlignedPair:
    """Two tables over the same vocabulary, in the same word order."""

    words: tuple[str, ...]
    x_table: EmbeddingTable
    z_table: EmbeddingTable

    def __post_init__(self):
        words = tuple(self.words)
        if self.x_table.words != words or self.z_table.words != words:
            raise DimensionMismatchError("aligned tables must share the same ordered vocabulary")
        if self.x_table.dim != self.z_table.dim:
            raise DimensionMismatchError(
                f"dimension mismatch: {self.x_table.dim} vs {self.z_table.dim}"
            )
        object.__setattr__(self, "words", words)

    @property
    def dim(self) -> int:
        return self.x_table.dim

    def __len__(self) -> int:
        return len(self.words)


def _split(line: str) -> list[str]:
    return [f for f in line.rstrip("\r\n").split(" ") if f]


def _parse_header(fields: list[str]) -> tuple[int, int] | None:
    if len(fields) != 2:
        return None
    try:
        return int(fields[0]), int(fields[1])
    except ValueError:
        return None


def load_embeddings(path: str | os.PathLike, max_words: int | None = None) -> EmbeddingTable:
    """Read a word2vec text file.

    The optional first line ``"n d"`` is checked against the content. Repeated
    tokens keep their first vector; the number dropped is reported through
    :mod:`warnings`. ``max_words`` caps the number of distinct words read.
    """
    if max_words is not None and max_words < 1:
        raise ValueError("max_words must be a positive integer")

    words: list[str] = []
    seen: set[str] = set()
    rows: list[list[str]] = []
    blocks: list[np.ndarray] = []
    header = None
    dim = None
    duplicates = 0
    truncated = False

    def flush():
        if rows:
            try:
                blocks.append(np.array(rows, dtype=np.float64))
            except ValueError as exc:
                raise EmbeddingFormatError(f"{path}: unparseable float ({exc})") from None
            rows.clear()

    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = _split(line)
            if not fields:
                continue
            if lineno == 1:
                header = _parse_header(fields)
                if header is not None:
                    if header[0] < 0 or header[1] < 1:
                        raise EmbeddingFormatError(f"{path}: bad header {line.strip()!r}")
                    dim = header[1]
                    continue
            token, values = fields[0], fields[1:]
            if dim is None:
                dim = len(values)
                if dim == 0:
                    raise EmbeddingFormatError(f"{path}:{lineno}: token without vector")
            if len(values) != dim:
                raise EmbeddingFormatError(
                    f"{path}:{lineno}: expected {dim} values, found {len(values)}"
                )
            if token in seen:
                duplicates += 1
                continue
            if max_words is not None and len(words) >= max_words:
                truncated = True
                break
            seen.add(token)
            words.append(token)
            rows.append(values)
            if len(rows) >= _CHUNK:
                flush()
    flush()

    if not words:
        raise EmbeddingFormatError(f"{path}: no embeddings found")
    if header is not None and not truncated and header[0] != len(words) + duplicates:
        raise EmbeddingFormatError(
            f"{path}: header announces {header[0]} words, file has {len(words) + duplicates}"
        )
    if duplicates:
        warnings.warn(f"{path}: {duplicates} duplicate token(s) ignored (kept first)", stacklevel=2)
    return EmbeddingTable(tuple(words), np.vstack(blocks).T)


def save_embeddings(t: EmbeddingTable, path: str | os.PathLike, with_header: bool = True) -> None:
    """Write ``t`` in word2vec text format with 9 significant digits."""
    if not os.fspath(path):
        raise OSError("empty output path")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if with_header:
            fh.write(f"{len(t)} {t.dim}\n")
        cols = t.vectors.T
        for word, vec in zip(t.words, cols):
            fh.write(word)
            fh.write(" ")
            fh.write(" ".join(f"{v:.9g}" for v in vec))
            fh.write("\n")


def intersect_vocab(a: EmbeddingTable, b: EmbeddingTable) -> AlignedPair:
    """Restrict both tables to their shared words, ordered as in ``a``."""
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")
    shared = tuple(w for w in a.words if w in b.index)
    if not shared:
        raise EmptyIntersectionError("empty intersection")
    return AlignedPair(shared, a.subset(shared), b.subset(shared))


def preprocess(t: EmbeddingTable, opts: PreprocessOptions) -> EmbeddingTable:
    """Optionally mean-center (per dimension), then scale columns to unit norm."""
    vecs = np.array(t.vectors)
    if opts.mean_center:
        vecs -= vecs.mean(axis=1, keepdims=True)
    if opts.unit_normalize:
        norms = np.linalg.norm(vecs, axis=0)
        zero = norms == 0
        if zero.any():
            warnings.warn(f"{int(zero.sum())} zero vector(s) left unnormalized", stacklevel=2)
        vecs[:, ~zero] /= norms[~zero]
    return EmbeddingTable(t.words, vecs)

