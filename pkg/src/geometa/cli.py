"""Command-line interface: ``geometa {train,transform,eval,pipeline}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 solver failure.
All inputs are read and validated before any output file is written.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import os
import sys
import tempfile
from pathlib import Path

from .embio import (
    AlignedPair,
    PreprocessOptions,
    intersect_vocab,
    load_embeddings,
    preprocess,
    save_embeddings,
)
from .errors import DataError, DimensionMismatchError, SolverError
from .evaluation import EvalReport, discover_datasets, evaluate
from .meta import MetaMode, build_meta, make_latent_map
from .objective import build_gram_cache
from .optimizer import SolverConfig, SolveTrace, solve
from .params import format_params, load_params

log = logging.getLogger("geometa")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_SOLVER = 0, 1, 2, 3

REPORT_COLUMNS = ("dataset", "metric", "score", "n_total", "n_used", "coverage")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@contextlib.contextmanager
def _atomic_path(path: str | os.PathLike):
    """Yield a temporary sibling of ``path``; move it into place on success."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    os.close(fd)
    try:
        yield tmp
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _write_text(path, text: str) -> None:
    with _atomic_path(path) as tmp:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _check_out_dir(path) -> None:
    parent = Path(path).parent
    if not parent.is_dir():
        raise DataError(f"output directory {str(parent)!r} does not exist")


def _load_pair(src_x, src_z, max_words, opts: PreprocessOptions) -> AlignedPair:
    x = preprocess(load_embeddings(src_x, max_words), opts)
    z = preprocess(load_embeddings(src_z, max_words), opts)
    return intersect_vocab(x, z)


def format_report(reports: list[EvalReport]) -> str:
    lines = ["\t".join(REPORT_COLUMNS)]
    for r in reports:
        lines.append(
            f"{r.dataset}\t{r.metric}\t{r.score:.6f}\t{r.n_total}\t{r.n_used}\t{r.coverage:.6f}"
        )
    return "\n".join(lines) + "\n"


def train(args) -> tuple[str, SolveTrace]:
    opts = PreprocessOptions(unit_normalize=args.unit_norm, mean_center=args.mean_center)
    pair = _load_pair(args.src_x, args.src_z, args.max_words, opts)
    cache = build_gram_cache(pair)
    cfg = SolverConfig(reg_c=args.reg_c, max_iters=args.max_iters, grad_tol=args.grad_tol, seed=args.seed)
    point, trace = solve(cache, cfg)
    header = {
        "source_x": Path(args.src_x).name,
        "source_z": Path(args.src_z).name,
        "unit_normalize": opts.unit_normalize,
        "mean_center": opts.mean_center,
        "max_words": args.max_words,
        "reg_c": cfg.reg_c,
        "seed": cfg.seed,
        "n_words": cache.n,
        "iterations": trace.n_steps,
        "final_loss": float(trace.records[-1].loss),
        "termination": trace.termination,
    }
    print(
        f"shared vocabulary: {cache.n} words, d={cache.d}\n"
        f"iterations: {trace.n_steps} ({trace.termination})\n"
        f"loss: {trace.records[0].loss:.10g} -> {trace.records[-1].loss:.10g}"
    )
    return format_params(point, header), trace


def transform(params_path, src_x, src_z, mode, renorm, max_words=None):
    point, header = load_params(params_path)
    opts = PreprocessOptions(
        unit_normalize=bool(header.get("unit_normalize", True)),
        mean_center=bool(header.get("mean_center", False)),
    )
    if max_words is None:
        max_words = header.get("max_words")
    pair = _load_pair(src_x, src_z, max_words, opts)
    if pair.dim != point.dim:
        raise DimensionMismatchError(f"params have d={point.dim}, embeddings have d={pair.dim}")
    mode = MetaMode(mode)
    latent = make_latent_map(point) if mode.is_geometric else None
    return build_meta(pair, latent, mode, renorm=renorm)


def run_eval(embeddings, dataset_dir) -> list[EvalReport]:
    table = load_embeddings(embeddings)
    reports = []
    for ds in discover_datasets(dataset_dir):
        try:
            reports.append(evaluate(table, ds))
        except DataError as exc:
            print(f"skipped {ds.name}: {exc}", file=sys.stderr)
    for r in reports:
        print(
            f"dataset={r.dataset} metric={r.metric} score={r.score:.6f} "
            f"used={r.n_used}/{r.n_total} coverage={r.coverage:.4f}"
        )
    return reports


def _cmd_train(args):
    _check_out_dir(args.out)
    if args.trace:
        _check_out_dir(args.trace)
    text, trace = train(args)
    _write_text(args.out, text)
    if args.trace:
        _write_text(args.trace, trace.to_jsonl())


def _cmd_transform(args):
    _check_out_dir(args.out)
    table = transform(args.params, args.src_x, args.src_z, args.mode, args.renorm, args.max_words)
    with _atomic_path(args.out) as tmp:
        save_embeddings(table, tmp)


def _cmd_eval(args):
    _check_out_dir(args.out)
    reports = run_eval(args.embeddings, args.dataset_dir)
    _write_text(args.out, format_report(reports))


def _cmd_pipeline(args):
    discover_datasets(args.dataset_dir)
    text, trace = train(args)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    mode = MetaMode(args.mode).value
    params_path = out_dir / "params.txt"
    meta_path = out_dir / f"meta.{mode}.txt"
    report_path = out_dir / f"report.{mode}.tsv"
    _write_text(params_path, text)
    if args.trace:
        _write_text(args.trace, trace.to_jsonl())
    table = transform(params_path, args.src_x, args.src_z, args.mode, args.renorm, args.max_words)
    with _atomic_path(meta_path) as tmp:
        save_embeddings(table, tmp)
    _write_text(report_path, format_report(run_eval(meta_path, args.dataset_dir)))


def _add_source_flags(p):
    p.add_argument("src_x", help="first source embeddings (word2vec text)")
    p.add_argument("src_z", help="second source embeddings (word2vec text)")
    p.add_argument("--max-words", type=int, default=None, help="read at most this many words per source")


def _add_train_flags(p):
    p.add_argument("--reg-c", type=float, default=1.0, help="weight of the ||B||^2 penalty (default 1.0)")
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--grad-tol", type=float, default=1e-6, help="stop when |grad| <= tol * |grad_0|")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--unit-norm", action=argparse.BooleanOptionalAction, default=True,
                   help="scale source vectors to unit length before training (default on)")
    p.add_argument("--mean-center", action="store_true", help="subtract the per-dimension mean")
    p.add_argument("--trace", default=None, help="write per-iteration records as JSON lines")


def _mode(value):
    try:
        return MetaMode(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"invalid mode {value!r} (choose from {', '.join(m.value for m in MetaMode)})"
        ) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="geometa", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="learn U, V, B on the shared vocabulary")
    _add_source_flags(p)
    _add_train_flags(p)
    p.add_argument("--out", required=True, help="params file to write")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("transform", help="write meta-embeddings for the shared vocabulary")
    p.add_argument("params")
    _add_source_flags(p)
    p.add_argument("--mode", type=_mode, default=MetaMode.GEO_AVG)
    p.add_argument("--renorm", action="store_true", help="unit-normalize the output vectors")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("eval", help="score an embedding file on every dataset in a directory")
    p.add_argument("embeddings")
    p.add_argument("dataset_dir")
    p.add_argument("--out", required=True, help="TSV report to write")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("pipeline", help="train, transform and eval in one go")
    _add_source_flags(p)
    _add_train_flags(p)
    p.add_argument("--dataset-dir", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--mode", type=_mode, default=MetaMode.GEO_AVG)
    p.add_argument("--renorm", action="store_true")
    p.set_defaults(func=_cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "max_words", None) is not None and args.max_words < 1:
        print("geometa: error: --max-words must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        args.func(args)
    except SolverError as exc:
        print(f"geometa: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (DataError, OSError, KeyError) as exc:
        print(f"geometa: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"geometa: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
