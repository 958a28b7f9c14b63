"""Command-line interface: simulate, fit, predict, eval, cv, bench.

Exit codes: 0 success, 1 usage error, 2 data/format error, 3 numeric
failure. Every run writes one JSON manifest recording the resolved
configuration, paths, and per-phase wall time.
"""

import argparse
import os
import sys
import time

import numpy as np

from . import __version__, estimator, evaluate, io, simulate
from ._backend import active_backend, available_backends, use
from .tensor import ShapeMismatchError

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_dims(text):
    try:
        dims = tuple(int(d) for d in text.split(","))
    except ValueError:
        raise UsageError(f"bad dims {text!r}; expected comma-separated integers")
    if not dims or any(d < 1 for d in dims):
        raise UsageError(f"bad dims {text!r}; every entry must be >= 1")
    return dims


def _parse_floats(text):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"bad float list {text!r}")


def _manifest(command, args, inputs, outputs, timings):
    return {
        "command": command,
        "config": {k: v for k, v in vars(args).items() if k != "func"},
        "inputs": inputs,
        "outputs": outputs,
        "timings_s": {k: round(v, 6) for k, v in timings.items()},
        "version": __version__,
        "backend": active_backend(),
    }


def _fit_config(args):
    return estimator.FitConfig(
        lam=args.lam,
        epsilon=args.epsilon,
        max_iter=args.max_iter,
        tol=args.tol,
        seed=args.seed,
        rescale=getattr(args, "rescale", False),
        anneal=getattr(args, "anneal", False),
    )


def cmd_simulate(args):
    spec = simulate.SimSpec(
        dims=_parse_dims(args.dims),
        n_samples=args.n,
        sparsity_pct=args.sparsity,
        noise_alpha=args.alpha,
        seed=args.seed,
    )
    t0 = time.perf_counter()
    out = simulate.gen_dataset(spec)
    t1 = time.perf_counter()
    os.makedirs(args.out, exist_ok=True)
    paths = {
        "dataset": os.path.join(args.out, "dataset.ftrt"),
        "responses": os.path.join(args.out, "responses.csv"),
        "true_factors": os.path.join(args.out, "true_factors.ftrt"),
        "true_tensor": os.path.join(args.out, "true_tensor.ftrt"),
    }
    io.write_tensor(paths["dataset"], out.samples)
    io.write_vector_csv(paths["responses"], out.responses)
    io.write_factors(paths["true_factors"], out.true_factors)
    io.write_tensor(paths["true_tensor"], out.true_tensor)
    t2 = time.perf_counter()
    io.write_manifest(
        os.path.join(args.out, "manifest.json"),
        _manifest("simulate", args, {}, paths, {"generate": t1 - t0, "write": t2 - t1}),
    )
    print(f"wrote {len(paths)} files to {args.out}")
    return 0


def cmd_fit(args):
    t0 = time.perf_counter()
    X = io.read_tensor(args.data)
    y = io.read_vector_csv(args.responses)
    t1 = time.perf_counter()
    cfg = _fit_config(args)
    phase = {}
    report = estimator.fit(X, y, cfg, timings=phase)
    t2 = time.perf_counter()
    io.save_model(args.out, report, cfg)
    if args.trace_out:
        with open(args.trace_out, "w", encoding="utf-8") as fh:
            fh.write("iteration,rel_change\n")
            for i, r in enumerate(report.rel_change_trace, start=1):
                fh.write(f"{i},{r!r}\n")
    t3 = time.perf_counter()
    timings = {"load": t1 - t0, "fit": t2 - t1, "write": t3 - t2, **phase}
    io.write_manifest(
        args.out + ".manifest.json",
        _manifest(
            "fit",
            args,
            {"data": args.data, "responses": args.responses},
            {"model": args.out, "trace": args.trace_out or ""},
            timings,
        ),
    )
    state = "converged" if report.converged else "hit iteration cap"
    print(f"fit {state} after {report.iterations} sweeps; model -> {args.out}")
    return 0


def cmd_predict(args):
    t0 = time.perf_counter()
    factors, _ = io.load_model(args.model)
    X = io.read_tensor(args.data)
    t1 = time.perf_counter()
    y_hat = estimator.predict(factors, X)
    t2 = time.perf_counter()
    io.write_vector_csv(args.out, y_hat)
    t3 = time.perf_counter()
    io.write_manifest(
        args.out + ".manifest.json",
        _manifest(
            "predict",
            args,
            {"model": args.model, "data": args.data},
            {"predictions": args.out},
            {"load": t1 - t0, "predict": t2 - t1, "write": t3 - t2},
        ),
    )
    print(f"wrote {y_hat.size} predictions -> {args.out}")
    return 0


def cmd_eval(args):
    t0 = time.perf_counter()
    factors, _ = io.load_model(args.model)
    X = io.read_tensor(args.data)
    y = io.read_vector_csv(args.responses)
    t1 = time.perf_counter()
    y_hat = estimator.predict(factors, X)
    metrics = [("mse", evaluate.mse(y_hat, y))]
    if args.true_tensor:
        from .tensor import outer_product

        w_star = io.read_tensor(args.true_tensor)
        w_hat = outer_product(factors)
        metrics.append(("ce", evaluate.coefficient_error(w_hat, w_star)))
    if np.unique(y).size == 2:
        metrics.append(("auc", evaluate.auc(y_hat, evaluate.encode_binary_labels(y))))
    t2 = time.perf_counter()
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("metric,value\n")
        for name, value in metrics:
            fh.write(f"{name},{value!r}\n")
    t3 = time.perf_counter()
    io.write_manifest(
        args.out + ".manifest.json",
        _manifest(
            "eval",
            args,
            {"model": args.model, "data": args.data, "responses": args.responses},
            {"metrics": args.out},
            {"load": t1 - t0, "evaluate": t2 - t1, "write": t3 - t2},
        ),
    )
    print("  ".join(f"{name}={value:.6g}" for name, value in metrics))
    return 0


def cmd_cv(args):
    t0 = time.perf_counter()
    X = io.read_tensor(args.data)
    y = io.read_vector_csv(args.responses)
    t1 = time.perf_counter()
    grid = evaluate.CVGrid(
        lambdas=_parse_floats(args.lambdas) if args.lambdas else evaluate.DEFAULT_LAMBDAS,
        epsilons=_parse_floats(args.epsilons) if args.epsilons else evaluate.DEFAULT_EPSILONS,
        k=args.k,
    )
    cfg = estimator.FitConfig(
        lam=0.0, epsilon=1.0, max_iter=args.max_iter, tol=args.tol, seed=args.seed
    )
    result = evaluate.kfold_cv(X, y, grid, cfg)
    t2 = time.perf_counter()
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("lambda,epsilon,fold,mse\n")
        for li, lam in enumerate(grid.lambdas):
            for ei, eps in enumerate(grid.epsilons):
                for fold in range(grid.k):
                    v = float(result.fold_scores[li, ei, fold])
                    fh.write(f"{lam!r},{eps!r},{fold},{v!r}\n")
    t3 = time.perf_counter()
    io.write_manifest(
        args.out + ".manifest.json",
        _manifest(
            "cv",
            args,
            {"data": args.data, "responses": args.responses},
            {"scores": args.out},
            {"load": t1 - t0, "cv": t2 - t1, "write": t3 - t2},
        ),
    )
    best = result.cell_scores[
        grid.lambdas.index(result.best_lambda), grid.epsilons.index(result.best_epsilon)
    ]
    print(
        f"best lambda={result.best_lambda!r} epsilon={result.best_epsilon!r} "
        f"mean_mse={best!r}"
    )
    return 0


def cmd_bench(args):
    if args.backend != "auto":
        if args.backend not in available_backends():
            raise UsageError(
                f"backend {args.backend!r} unavailable; have {available_backends()}"
            )
        use(args.backend)
    rows = []
    for text in args.shapes:
        dims = _parse_dims(text)
        spec = simulate.SimSpec(
            dims=dims,
            n_samples=args.n,
            sparsity_pct=args.sparsity,
            noise_alpha=args.alpha,
            seed=args.seed,
        )
        data = simulate.gen_dataset(spec)
        # tiny tolerance so the sweep count is fixed by the iteration cap
        cfg = estimator.FitConfig(
            lam=args.lam, epsilon=args.epsilon, max_iter=args.iters, tol=1e-300,
            seed=args.seed,
        )
        phase = {}
        t0 = time.perf_counter()
        report = estimator.fit(data.samples, data.responses, cfg, timings=phase)
        total = time.perf_counter() - t0
        rows.append(
            {
                "shape": "x".join(str(d) for d in dims),
                "n": args.n,
                "backend": active_backend(),
                "iterations": report.iterations,
                "projection_s": phase.get("projection", 0.0),
                "solve_s": phase.get("solve", 0.0),
                "threshold_s": phase.get("threshold", 0.0),
                "total_s": total,
            }
        )
    with open(args.out, "w", encoding="utf-8") as fh:
        cols = list(rows[0])
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(str(row[c]) for c in cols) + "\n")
    io.write_manifest(
        args.out + ".manifest.json",
        _manifest("bench", args, {}, {"timings": args.out}, {}),
    )
    for row in rows:
        print(
            f"{row['shape']:>12}  proj {row['projection_s']:.4f}s  "
            f"solve {row['solve_s']:.4f}s  thresh {row['threshold_s']:.4f}s"
        )
    return 0


def _add_fit_flags(p):
    p.add_argument("--lam", "--lambda", dest="lam", type=float, required=True,
                   help="sparsity threshold")
    p.add_argument("--epsilon", type=float, required=True, help="ridge perturbation")
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rescale", action="store_true",
                   help="balance factor norms after each sweep")
    p.add_argument("--anneal", action="store_true",
                   help="warm-start from a descending ridge ladder")


def build_parser():
    parser = _Parser(prog="fastr", description="Sparse unit-rank tensor regression")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a seeded synthetic dataset")
    p.add_argument("--dims", required=True, help="comma-separated mode sizes, e.g. 20,20")
    p.add_argument("--n", type=int, required=True, help="number of samples")
    p.add_argument("--sparsity", type=float, default=20.0, help="percent zeros per factor")
    p.add_argument("--alpha", type=float, default=0.1, help="noise scale")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--threads", type=int, default=1, help="parallelism hint")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit a model to a dataset")
    p.add_argument("--data", required=True, help="dataset FTRT file")
    p.add_argument("--responses", required=True, help="responses CSV")
    _add_fit_flags(p)
    p.add_argument("--out", required=True, help="model JSON path")
    p.add_argument("--trace-out", default="", help="optional convergence trace CSV")
    p.add_argument("--threads", type=int, default=1, help="parallelism hint")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="predict responses with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="predictions CSV path")
    p.add_argument("--threads", type=int, default=1, help="parallelism hint")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="score a model on labeled data")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--responses", required=True)
    p.add_argument("--true-tensor", default="", help="ground-truth FTRT for CE")
    p.add_argument("--out", required=True, help="metrics CSV path")
    p.add_argument("--threads", type=int, default=1, help="parallelism hint")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("cv", help="k-fold cross-validation over a (lambda, epsilon) grid")
    p.add_argument("--data", required=True)
    p.add_argument("--responses", required=True)
    p.add_argument("--lambdas", default="", help="comma-separated lambda grid")
    p.add_argument("--epsilons", default="", help="comma-separated epsilon grid")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="long-form scores CSV path")
    p.add_argument("--threads", type=int, default=1, help="parallelism hint")
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("bench", help="time fit phases over a ladder of shapes")
    p.add_argument("--shapes", nargs="+", required=True,
                   help="one or more comma-separated shapes, e.g. 5,5,5 10,10,10")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--iters", type=int, default=5, help="fixed sweep count")
    p.add_argument("--lam", "--lambda", dest="lam", type=float, default=0.01)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--sparsity", type=float, default=20.0)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", choices=("auto", "python", "compiled"), default="auto")
    p.add_argument("--out", required=True, help="timings CSV path")
    p.add_argument("--threads", type=int, default=1, help="parallelism hint")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        if isinstance(exc, (io.FormatError, ShapeMismatchError)):
            print(f"data error: {exc}", file=sys.stderr)
            return EXIT_DATA
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, PermissionError, IsADirectoryError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (estimator.NumericDomainError, ZeroDivisionError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
