import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from geometa.embio import EmbeddingTable
from geometa.errors import DatasetError
from geometa.evaluation import (
    AnalogyDataset,
    SimilarityDataset,
    answer_analogy,
    discover_datasets,
    eval_analogy,
    eval_similarity,
    load_analogy_dataset,
    load_similarity_dataset,
    spearman,
)


def brute_force_analogy(words, vectors, a, b, c):
    """Independent 3CosAdd: plain Python loop over every candidate."""
    idx = {w: i for i, w in enumerate(words)}
    target = [vectors[k][idx[b]] - vectors[k][idx[a]] + vectors[k][idx[c]] for k in range(len(vectors))]
    tnorm = math.sqrt(sum(t * t for t in target))
    best, best_score = None, -math.inf
    for j, w in enumerate(words):
        if w in (a, b, c):
            continue
        col = [vectors[k][j] for k in range(len(vectors))]
        cnorm = math.sqrt(sum(v * v for v in col))
        score = sum(t * v for t, v in zip(target, col)) / (tnorm * cnorm) if tnorm and cnorm else 0.0
        if score > best_score:
            best, best_score = w, score
    return best


@pytest.fixture
def parallelogram():
    return EmbeddingTable(("p", "q", "r", "s"), np.array([[1.0, 1.0, 3.0, 3.0], [0.0, 1.0, 0.0, 1.0]]))


def test_spearman_examples():
    assert spearman([1, 2, 3], [10, 20, 30]) == pytest.approx(1.0, abs=1e-12)
    assert spearman([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0, abs=1e-12)
    # ranks [1,2,3] vs [1.5,1.5,3]: centred (-1,0,1).(-.5,-.5,1) / (sqrt2 * sqrt1.5) = 1.5/sqrt3
    assert spearman([1, 2, 3], [1, 1, 2]) == pytest.approx(1.5 / math.sqrt(3), abs=1e-12)
    assert spearman([1, 2, 3], [1, 1, 2]) == pytest.approx(0.8660254, abs=1e-7)


def test_spearman_errors():
    with pytest.raises(ValueError):
        spearman([1, 1, 1], [1, 2, 3])
    with pytest.raises(ValueError):
        spearman([1], [2])
    with pytest.raises(ValueError):
        spearman([1, 2], [1, 2, 3])


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(3, 40))
def test_spearman_matches_scipy_and_is_rank_invariant(seed, n):
    rng = np.random.default_rng(seed)
    xs = rng.integers(0, 6, n).astype(float) + rng.standard_normal(n) * rng.integers(0, 2)
    ys = rng.standard_normal(n)
    if np.ptp(xs) == 0:
        return
    rho = spearman(xs, ys)
    assert rho == pytest.approx(stats.spearmanr(xs, ys)[0], abs=1e-12)
    assert spearman(np.exp(xs), ys ** 3) == pytest.approx(rho, abs=1e-12)


def test_similarity_order_agreement():
    t = EmbeddingTable(("a", "b", "c", "d"), np.array([[1.0, 1.0, 0.0, -1.0], [0.0, 0.1, 1.0, 0.2]]))
    ds = SimilarityDataset("toy", (("a", "b", 9.0), ("a", "c", 5.0), ("a", "d", 1.0)))
    rep = eval_similarity(t, ds)
    assert rep.score == pytest.approx(1.0)
    assert (rep.n_total, rep.n_used, rep.coverage) == (3, 3, 1.0)


def test_similarity_oov_counting():
    t = EmbeddingTable(("a", "b", "c"), np.array([[1.0, 1.0, 0.0], [0.0, 0.5, 1.0]]))
    ds = SimilarityDataset("toy", (("a", "b", 2.0), ("a", "zzz", 5.0), ("b", "c", 1.0)))
    rep = eval_similarity(t, ds)
    assert rep.n_used == 2 and rep.n_skipped == 1
    assert rep.coverage == pytest.approx(2 / 3)
    with pytest.raises(DatasetError):
        eval_similarity(t, SimilarityDataset("x", (("a", "b", 1.0), ("q", "r", 2.0))))


def test_similarity_scale_invariant(rng):
    words = tuple(f"w{i}" for i in range(20))
    vecs = rng.standard_normal((5, 20))
    pairs = tuple((words[i], words[j], float(rng.uniform(0, 10))) for i, j in rng.integers(0, 20, (15, 2)))
    ds = SimilarityDataset("s", pairs)
    a = eval_similarity(EmbeddingTable(words, vecs), ds).score
    b = eval_similarity(EmbeddingTable(words, 7.5 * vecs), ds).score
    assert a == pytest.approx(b, abs=1e-12)


def test_analogy_parallelogram(parallelogram):
    assert answer_analogy(parallelogram, "p", "q", "r") == "s"
    rep = eval_analogy(parallelogram, AnalogyDataset("pg", (("p", "q", "r", "s"),)))
    assert rep.score == 1.0 and rep.metric == "accuracy"


def test_analogy_a_equals_b(rng):
    words = tuple(f"w{i}" for i in range(30))
    t = EmbeddingTable(words, rng.standard_normal((4, 30)))
    got = answer_analogy(t, "w3", "w3", "w7")
    unit = t.vectors / np.linalg.norm(t.vectors, axis=0)
    sims = unit.T @ unit[:, 7]
    sims[[3, 7]] = -np.inf
    assert got == words[int(np.argmax(sims))]


def test_analogy_brute_force(rng):
    words = tuple(f"w{i}" for i in range(50))
    vecs = rng.standard_normal((6, 50))
    t = EmbeddingTable(words, vecs)
    vl = vecs.tolist()
    for a, b, c in rng.integers(0, 50, (20, 3)):
        qa, qb, qc = words[a], words[b], words[c]
        got = answer_analogy(t, qa, qb, qc)
        assert got == brute_force_analogy(words, vl, qa, qb, qc)
        assert got not in (qa, qb, qc)


def test_analogy_tie_lowest_index():
    # w2 and w3 are identical candidates; the earlier one wins.
    t = EmbeddingTable(("a", "b", "w2", "w3", "c"), np.array([[1.0, 0.0, 1.0, 1.0, 0.0], [0.0, 1.0, 1.0, 1.0, 0.0]]))
    assert answer_analogy(t, "c", "a", "b") == "w2"


def test_analogy_oov(parallelogram):
    with pytest.raises(KeyError):
        answer_analogy(parallelogram, "p", "q", "nope")


def test_eval_analogy_accuracy_matches_oracle(rng):
    words = tuple(f"w{i}" for i in range(40))
    vecs = rng.standard_normal((5, 40))
    t = EmbeddingTable(words, vecs)
    vl = vecs.tolist()
    rows = []
    for a, b, c in rng.integers(0, 40, (10, 3)):
        oracle = brute_force_analogy(words, vl, words[a], words[b], words[c])
        expected = oracle if rng.random() < 0.6 else words[int(rng.integers(0, 40))]
        rows.append((words[a], words[b], words[c], expected))
    rows.append(("w0", "w1", "oov", "w2"))
    rep = eval_analogy(t, AnalogyDataset("ana", tuple(rows)))
    hits = sum(brute_force_analogy(words, vl, a, b, c) == e for a, b, c, e in rows[:10])
    assert rep.score == pytest.approx(hits / 10)
    assert (rep.n_total, rep.n_used) == (11, 10)


def test_eval_analogy_scored(parallelogram):
    rows = (("p", "q", "r", "s"), ("p", "q", "r", "p"), ("p", "r", "q", "s"), ("p", "q", "r", "oov"))
    gold = (10.0, 1.0, 5.0, 3.0)
    rep = eval_analogy(parallelogram, AnalogyDataset("sem", rows, gold))
    assert rep.metric == "spearman"
    assert rep.n_used == 3
    t = parallelogram
    model = [
        np.dot(t.vector(b) - t.vector(a) + t.vector(c), t.vector(d))
        / (np.linalg.norm(t.vector(b) - t.vector(a) + t.vector(c)) * np.linalg.norm(t.vector(d)))
        for a, b, c, d in rows[:3]
    ]
    assert rep.score == pytest.approx(stats.spearmanr(model, gold[:3])[0], abs=1e-12)


def test_eval_analogy_no_questions(parallelogram):
    with pytest.raises(DatasetError):
        eval_analogy(parallelogram, AnalogyDataset("x", (("x", "y", "z", "w"),)))


def test_dataset_files(tmp_path):
    (tmp_path / "rg.sim.tsv").write_text("# comment\na\tb\t3.5\n\nc\td\t1\n")
    (tmp_path / "gl.ana.tsv").write_text("a\tb\tc\td\n")
    (tmp_path / "sem.anascored.tsv").write_text("a\tb\tc\td\t0.5\n")
    (tmp_path / "notes.txt").write_text("ignored")
    found = discover_datasets(tmp_path)
    assert [d.name for d in found] == ["gl", "rg", "sem"]
    sim = load_similarity_dataset(tmp_path / "rg.sim.tsv")
    assert sim.rows == (("a", "b", 3.5), ("c", "d", 1.0))
    scored = load_analogy_dataset(tmp_path / "sem.anascored.tsv", scored=True)
    assert scored.gold == (0.5,) and scored.scored


def test_dataset_file_errors(tmp_path):
    (tmp_path / "bad.sim.tsv").write_text("a\tb\n")
    with pytest.raises(DatasetError):
        load_similarity_dataset(tmp_path / "bad.sim.tsv")
    (tmp_path / "bad2.sim.tsv").write_text("a\tb\tx\n")
    with pytest.raises(DatasetError):
        load_similarity_dataset(tmp_path / "bad2.sim.tsv")
    empty = tmp_path / "empty"
    empty.mkdir()
    with pytest.raises(DatasetError):
        discover_datasets(empty)
