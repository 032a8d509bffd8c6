import json
import subprocess
import sys

import numpy as np
import pytest

from geometa import cli
from geometa.embio import EmbeddingTable, intersect_vocab, load_embeddings, save_embeddings
from geometa.errors import DataError
from geometa.evaluation import discover_datasets, evaluate
from geometa.manifold import ProductPoint
from geometa.params import format_params, load_params, parse_params, save_params
from geometa.synthetic import make_world, write_world

from conftest import random_point


@pytest.fixture
def tiny(tmp_path):
    """Two 5-word, d=2 sources sharing three words."""
    x = tmp_path / "x.txt"
    z = tmp_path / "z.txt"
    x.write_text("5 2\na 1 0\nb 0 1\nc 1 1\nd 2 1\ne 1 3\n")
    z.write_text("f 0 1\nc 1 -1\na 0 1\nb -1 0\ng 3 3\n")
    return x, z


@pytest.fixture(scope="module")
def world_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("world")
    return write_world(make_world(n_words=300, dim=8, extra_words=20, n_pairs=80, n_analogies=40, seed=4), root)


def run(*argv):
    return cli.main([str(a) for a in argv])


def test_params_round_trip(tmp_path, rng):
    p = random_point(rng, 6)
    path = tmp_path / "p.txt"
    save_params(path, p, {"reg_c": 0.5})
    q, header = load_params(path)
    assert header["d"] == 6 and header["reg_c"] == 0.5
    for a, b in ((p.u, q.u), (p.v, q.v), (p.b, q.b)):
        assert np.max(np.abs(a - b)) <= 1e-12


def test_params_rejects_garbage(rng):
    good = format_params(ProductPoint.identity(2), {})
    with pytest.raises(DataError):
        parse_params("hello\n")
    with pytest.raises(DataError):
        parse_params(good.replace("\nV\n", "\nQ\n"))
    with pytest.raises(DataError, match="infeasible"):
        parse_params(good.replace("\nB\n1 0", "\nB\n-1 0"))


def test_train_smoke(tiny, tmp_path, capsys):
    x, z = tiny
    out = tmp_path / "params.txt"
    assert run("train", x, z, "--out", out) == 0
    p, header = load_params(out)
    assert header["d"] == 2 and header["n_words"] == 3
    assert "shared vocabulary: 3 words" in capsys.readouterr().out


def test_train_zero_iters_gives_identity(tiny, tmp_path):
    x, z = tiny
    out = tmp_path / "params.txt"
    assert run("train", x, z, "--out", out, "--max-iters", 0) == 0
    p, header = load_params(out)
    for m in (p.u, p.v, p.b):
        np.testing.assert_array_equal(m, np.eye(2))
    assert header["termination"] == "max iterations"


def test_train_deterministic(tiny, tmp_path):
    x, z = tiny
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert run("train", x, z, "--out", a, "--seed", 7) == 0
    assert run("train", x, z, "--out", b, "--seed", 7) == 0
    assert a.read_bytes() == b.read_bytes()


def test_train_trace(tiny, tmp_path):
    x, z = tiny
    trace = tmp_path / "trace.jsonl"
    assert run("train", x, z, "--out", tmp_path / "p.txt", "--trace", trace) == 0
    rows = [json.loads(line) for line in trace.read_text().splitlines()]
    losses = [r["loss"] for r in rows]
    assert losses == sorted(losses, reverse=True)


def test_train_empty_intersection(tmp_path):
    x = tmp_path / "x.txt"
    z = tmp_path / "z.txt"
    x.write_text("a 1 0\n")
    z.write_text("b 0 1\n")
    out = tmp_path / "p.txt"
    assert run("train", x, z, "--out", out) == cli.EXIT_DATA
    assert not out.exists()


def test_usage_errors(tiny, tmp_path):
    x, z = tiny
    assert run("train", x) == cli.EXIT_USAGE
    assert run("transform", "p", x, z, "--out", "o", "--mode", "median") == cli.EXIT_USAGE
    assert run("train", x, z, "--out", tmp_path / "p", "--max-words", 0) == cli.EXIT_USAGE
    assert run("train", x, z, "--out", tmp_path / "p", "--reg-c", -1) == cli.EXIT_USAGE
    assert run("bogus") == cli.EXIT_USAGE
    assert list(tmp_path.glob("p*")) == []


def test_missing_input_is_data_error(tmp_path):
    assert run("train", tmp_path / "nope.txt", tmp_path / "nope2.txt", "--out", tmp_path / "p") == cli.EXIT_DATA


def test_solver_failure_exit_code(tiny, tmp_path, monkeypatch):
    from geometa.errors import LineSearchError

    def boom(*a, **k):
        raise LineSearchError("no descent")

    monkeypatch.setattr(cli, "solve", boom)
    x, z = tiny
    out = tmp_path / "p.txt"
    assert run("train", x, z, "--out", out) == cli.EXIT_SOLVER
    assert not out.exists()


def test_transform_identity_geo_equals_plain(tiny, tmp_path):
    x, z = tiny
    params = tmp_path / "params.txt"
    run("train", x, z, "--out", params, "--max-iters", 0)
    outs = {}
    for mode in ("avg", "geo-avg", "conc", "geo-conc"):
        outs[mode] = tmp_path / f"{mode}.txt"
        assert run("transform", params, x, z, "--mode", mode, "--out", outs[mode]) == 0
    assert outs["avg"].read_bytes() == outs["geo-avg"].read_bytes()
    assert outs["conc"].read_bytes() == outs["geo-conc"].read_bytes()
    assert outs["conc"].read_text().splitlines()[0] == "3 4"


def test_transform_vocab_matches_training_intersection(world_files, tmp_path):
    params = tmp_path / "params.txt"
    assert run("train", world_files["x"], world_files["z"], "--out", params, "--max-iters", 20) == 0
    out = tmp_path / "meta.txt"
    assert run("transform", params, world_files["x"], world_files["z"], "--mode", "geo-conc", "--out", out) == 0
    meta = load_embeddings(out)
    pair = intersect_vocab(load_embeddings(world_files["x"]), load_embeddings(world_files["z"]))
    assert meta.words == pair.words
    _, header = load_params(params)
    assert header["n_words"] == len(meta)


def test_transform_dimension_mismatch(tiny, tmp_path):
    x, z = tiny
    params = tmp_path / "params.txt"
    save_params(params, ProductPoint.identity(3), {})
    out = tmp_path / "meta.txt"
    assert run("transform", params, x, z, "--out", out) == cli.EXIT_DATA
    assert not out.exists()


def test_eval_one_dataset(tmp_path):
    t = EmbeddingTable(("a", "b", "c"), np.array([[1.0, 1.0, 0.0], [0.0, 0.5, 1.0]]))
    emb = tmp_path / "emb.txt"
    save_embeddings(t, emb)
    data = tmp_path / "data"
    data.mkdir()
    (data / "toy.sim.tsv").write_text("a\tb\t3\nb\tc\t2\na\tc\t1\n")
    out = tmp_path / "report.tsv"
    assert run("eval", emb, data, "--out", out) == 0
    lines = out.read_text().splitlines()
    assert lines[0].split("\t") == list(cli.REPORT_COLUMNS)
    assert len(lines) == 2 and lines[1].startswith("toy\tspearman\t1.000000")


def test_eval_empty_dir(tmp_path):
    emb = tmp_path / "emb.txt"
    save_embeddings(EmbeddingTable(("a",), np.ones((2, 1))), emb)
    (tmp_path / "data").mkdir()
    out = tmp_path / "r.tsv"
    assert run("eval", emb, tmp_path / "data", "--out", out) == cli.EXIT_DATA
    assert not out.exists()


def test_eval_skips_uncoverable_dataset(tmp_path, capsys):
    emb = tmp_path / "emb.txt"
    save_embeddings(EmbeddingTable(("a", "b", "c"), np.array([[1.0, 1.0, 0.0], [0.0, 0.5, 1.0]])), emb)
    data = tmp_path / "data"
    data.mkdir()
    (data / "const.sim.tsv").write_text("a\tb\t1\nb\tc\t1\n")
    (data / "miss.sim.tsv").write_text("x\ty\t1\n")
    (data / "ok.sim.tsv").write_text("a\tb\t1\nb\tc\t2\na\tc\t3\n")
    out = tmp_path / "r.tsv"
    assert run("eval", emb, data, "--out", out) == 0
    err = capsys.readouterr().err
    assert "skipped miss" in err and "skipped const" in err
    assert [l.split("\t")[0] for l in out.read_text().splitlines()[1:]] == ["ok"]


def test_eval_matches_library(world_files, tmp_path):
    params = tmp_path / "params.txt"
    meta = tmp_path / "meta.txt"
    report = tmp_path / "r.tsv"
    x, z, data = world_files["x"], world_files["z"], world_files["datasets"]
    assert run("train", x, z, "--out", params, "--max-iters", 30) == 0
    assert run("transform", params, x, z, "--out", meta) == 0
    assert run("eval", meta, data, "--out", report) == 0
    table = load_embeddings(meta)
    rows = [l.split("\t") for l in report.read_text().splitlines()[1:]]
    for row, ds in zip(rows, discover_datasets(data)):
        rep = evaluate(table, ds)
        assert row[0] == rep.dataset
        assert float(row[2]) == pytest.approx(rep.score, abs=5e-7)
        assert (int(row[3]), int(row[4])) == (rep.n_total, rep.n_used)


def test_pipeline_outputs(world_files, tmp_path):
    out = tmp_path / "run"
    x, z, data = world_files["x"], world_files["z"], world_files["datasets"]
    assert run("pipeline", x, z, "--dataset-dir", data, "--out-dir", out, "--mode", "geo-conc",
               "--max-iters", 30) == 0
    assert {p.name for p in out.iterdir()} == {"params.txt", "meta.geo-conc.txt", "report.geo-conc.tsv"}


def test_pipeline_no_datasets_writes_nothing(tiny, tmp_path):
    x, z = tiny
    (tmp_path / "empty").mkdir()
    out = tmp_path / "run"
    assert run("pipeline", x, z, "--dataset-dir", tmp_path / "empty", "--out-dir", out) == cli.EXIT_DATA
    assert not out.exists()


def test_console_entry_point(tiny, tmp_path):
    x, z = tiny
    out = tmp_path / "p.txt"
    res = subprocess.run([sys.executable, "-m", "geometa.cli", "train", str(x), str(z), "--out", str(out)],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert out.exists()
