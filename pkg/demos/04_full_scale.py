"""Train and evaluate on real pretrained embeddings (GloVe, fastText, word2vec).

The sources are multi-gigabyte word2vec text files that must be downloaded
separately, e.g. glove.42B.300d (prefix the file with a "n d" header or leave
it headerless) and crawl-300d-2M.vec. Benchmark files go into one directory
as *.sim.tsv, *.ana.tsv and *.anascored.tsv.

    python demos/04_full_scale.py glove.txt fasttext.vec benchmarks/ --max-words 200000
"""

import argparse
import time

from geometa import (
    MetaMode,
    PreprocessOptions,
    SolverConfig,
    build_gram_cache,
    build_meta,
    intersect_vocab,
    load_embeddings,
    make_latent_map,
    preprocess,
    solve,
)
from geometa.evaluation import discover_datasets, evaluate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("src_x")
    ap.add_argument("src_z")
    ap.add_argument("benchmarks")
    ap.add_argument("--max-words", type=int, default=None)
    ap.add_argument("--reg-c", type=float, default=1.0)
    ap.add_argument("--max-iters", type=int, default=500)
    args = ap.parse_args()

    t0 = time.time()
    opts = PreprocessOptions()
    x = preprocess(load_embeddings(args.src_x, args.max_words), opts)
    z = preprocess(load_embeddings(args.src_z, args.max_words), opts)
    pair = intersect_vocab(x, z)
    print(f"loaded {len(x)} / {len(z)} words, {len(pair)} shared, d={pair.dim} ({time.time() - t0:.0f}s)")

    point, trace = solve(build_gram_cache(pair), SolverConfig(reg_c=args.reg_c, max_iters=args.max_iters))
    print(f"solver: {trace.n_steps} iterations, {trace.termination}, loss {trace.records[-1].loss:.6g}")
    latent = make_latent_map(point)

    datasets = discover_datasets(args.benchmarks)
    print("mode\t" + "\t".join(ds.name for ds in datasets))
    for mode in MetaMode:
        table = build_meta(pair, latent if mode.is_geometric else None, mode)
        cells = []
        for ds in datasets:
            try:
                rep = evaluate(table, ds)
                cells.append(f"{100 * rep.score:.1f}")
            except ValueError:
                cells.append("n/a")
        print(mode.value + "\t" + "\t".join(cells))


if __name__ == "__main__":
    main()
