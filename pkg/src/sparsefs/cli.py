"""Command-line surface.

Seven subcommands: ``synth`` (draw a synthetic dataset), ``solve`` (one
algorithm on one dataset), ``path`` (homotopy sweep with per-point
supports), ``select`` (pick a feature count from a stored path without
re-solving), ``evaluate`` (repeated-trial classifier evaluation),
``compare`` (traces, accuracy curves and timings for all methods) and
``oracle-check`` (solver objective vs. exhaustive optimum).

Each command merges a ``key=value`` config file with flag overrides
(flags win), executes, and writes a JSON result record plus flat trace
tables into the output directory. Exit codes: 0 success, 1 usage error,
2 runtime or divergence error. Everything except wall-clock timings is a
deterministic function of config and seed.
"""

import argparse
import os
import sys
import time

import numpy as np

from . import io as sfio
from .baseline import l21_solve
from .data import center, stratified_split
from .errors import ParameterError
from .evaluation import ExperimentGrids, accuracy_curve, run_experiment
from .objective import row_norms
from .oracle import brute_force_oracle
from .solver import SolverConfig, ahiht_solve, hiht_solve, resolve_config
from .synthetic import generate_synthetic

CONFIG_KEYS = {
    "data": str, "label_column": str, "has_header": "bool",
    "algorithm": str, "lambda0": float, "rho": float, "gamma": float,
    "eta": float, "epsilon": float, "steps": int, "max_inner": int,
    "seed": int, "lambda": float, "max_d": int,
    "d": int, "samples": int, "classes": int, "sparsity": int, "sigma": float,
    "features": "int_list", "classifier": str, "standardize": "bool",
    "trials": int, "lambda_grid": "float_list",
    "record": str, "target": int, "out": str,
}

ALGORITHMS = ("hiht", "ahiht", "l21")
CLASSIFIER_CHOICES = ("knn", "softmax", "both")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _parse_bool(text):
    lowered = str(text).strip().lower()
    if lowered in ("on", "true", "1", "yes"):
        return True
    if lowered in ("off", "false", "0", "no"):
        return False
    raise ParameterError(f"expected on/off, got {text!r}")


def _parse_int_list(text):
    return [int(tok) for tok in str(text).replace(" ", "").split(",") if tok]


def _parse_float_list(text):
    return [float(tok) for tok in str(text).replace(" ", "").split(",") if tok]


_PARSERS = {
    "bool": _parse_bool,
    "int_list": _parse_int_list,
    "float_list": _parse_float_list,
}


def _coerce(key, raw):
    kind = CONFIG_KEYS[key]
    parse = _PARSERS.get(kind, kind)
    try:
        return parse(raw)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"bad value for {key!r}: {raw!r} ({exc})") from exc


class Options:
    """Config-file values overridden by explicit command-line flags."""

    def __init__(self, args):
        self.values = {}
        if getattr(args, "config", None):
            for key, raw in sfio.load_config(args.config, CONFIG_KEYS).items():
                self.values[key] = _coerce(key, raw)
        for key in CONFIG_KEYS:
            flag = getattr(args, key, None)
            if flag is not None:
                self.values[key] = _coerce(key, flag) if isinstance(flag, str) else flag

    def get(self, key, default=None):
        return self.values.get(key, default)

    def require(self, key):
        if key not in self.values:
            raise _UsageError(f"missing required option {key!r} (flag or config)")
        return self.values[key]

    def snapshot(self):
        out = {}
        for key, value in sorted(self.values.items()):
            out[key] = list(value) if isinstance(value, (list, tuple)) else value
        return out


def _add(parser, *names):
    mapping = {
        "config": (("--config",), {"metavar": "PATH", "help": "key=value config file"}),
        "out": (("--out",), {"metavar": "DIR", "help": "output directory"}),
        "seed": (("--seed",), {"type": int, "help": "random seed"}),
        "data": (("--data",), {"metavar": "CSV", "help": "dataset file"}),
        "label_column": (("--label-column",), {"dest": "label_column"}),
        "has_header": (("--has-header",), {"dest": "has_header", "choices": ["on", "off"]}),
        "algorithm": (("--algorithm",), {"choices": list(ALGORITHMS)}),
        "lambda0": (("--lambda0",), {"type": float}),
        "rho": (("--rho",), {"type": float}),
        "gamma": (("--gamma",), {"type": float}),
        "eta": (("--eta",), {"type": float}),
        "epsilon": (("--epsilon",), {"type": float}),
        "steps": (("--steps",), {"type": int, "help": "homotopy path length"}),
        "max_inner": (("--max-inner",), {"dest": "max_inner", "type": int}),
        "lambda": (("--lambda",), {"dest": "lambda", "type": float,
                                   "help": "single regularization value (l21)"}),
        "max_d": (("--max-d",), {"dest": "max_d", "type": int}),
        "d": (("--d",), {"type": int, "help": "feature count"}),
        "samples": (("--samples",), {"type": int}),
        "classes": (("--classes",), {"type": int}),
        "sparsity": (("--sparsity",), {"type": int, "help": "planted support size"}),
        "sigma": (("--sigma",), {"type": float, "help": "label noise level"}),
        "features": (("--features",), {"help": "comma-separated feature-count grid"}),
        "classifier": (("--classifier",), {"choices": list(CLASSIFIER_CHOICES)}),
        "standardize": (("--standardize",), {"choices": ["on", "off"]}),
        "trials": (("--trials",), {"type": int}),
        "lambda_grid": (("--lambda-grid",), {"dest": "lambda_grid",
                                             "help": "comma-separated values"}),
        "record": (("--record",), {"metavar": "JSON", "help": "stored path record"}),
        "target": (("--target",), {"type": int, "help": "requested feature count"}),
    }
    for name in names:
        flags, kwargs = mapping[name]
        parser.add_argument(*flags, **kwargs)


def _solver_config(opt):
    return SolverConfig(
        lambda0=opt.get("lambda0"),
        rho=opt.get("rho", 0.7),
        gamma=opt.get("gamma", 2.0),
        eta=opt.get("eta", 1e-4),
        epsilon=opt.get("epsilon", 1e-6),
        L0=None,
        path_steps=opt.get("steps", 30),
        max_inner_iterations=opt.get("max_inner", 1000),
        seed=opt.get("seed", 0),
    )


def _load_dataset(opt):
    path = opt.require("data")
    dataset = sfio.load_csv(
        path,
        label_column=opt.get("label_column"),
        has_header=opt.get("has_header", False),
    )
    if opt.get("standardize", False):
        x = dataset.features
        std = x.std(axis=1, keepdims=True)
        std[std == 0.0] = 1.0
        from .data import Dataset

        dataset = Dataset(
            features=(x - x.mean(axis=1, keepdims=True)) / std,
            labels=dataset.labels,
            class_count=dataset.class_count,
            feature_names=dataset.feature_names,
            label_names=dataset.label_names,
        )
    return dataset


def _point_summary(point):
    return {
        "lambda": point.lam,
        "support_size": point.support_size,
        "support": list(point.support),
        "objective": point.objective,
        "inner_iterations": point.inner_iterations,
        "final_L": point.final_L,
        "truncated": point.truncated,
    }


def _path_tables(out_dir, path, with_supports):
    sfio.write_trace_table(
        os.path.join(out_dir, "path.csv"),
        ["lambda", "support_size", "objective", "inner_iterations", "final_L"],
        [
            (p.lam, p.support_size, p.objective, p.inner_iterations, p.final_L)
            for p in path.points
        ],
    )
    rows = []
    iteration = 0
    for p in path.points:
        for value in p.objective_trace:
            rows.append((iteration, value))
            iteration += 1
    sfio.write_trace_table(
        os.path.join(out_dir, "trace.csv"), ["iteration", "objective"], rows
    )
    if with_supports:
        sfio.write_trace_table(
            os.path.join(out_dir, "supports.csv"),
            ["lambda", "support_size", "features"],
            [
                (p.lam, p.support_size, " ".join(str(i) for i in p.support))
                for p in path.points
            ],
        )


def _run_path_algorithm(algorithm, data, config):
    solve = hiht_solve if algorithm == "hiht" else ahiht_solve
    return solve(data, config)


def cmd_synth(opt):
    out_dir = opt.require("out")
    dataset, planted = generate_synthetic(
        d=opt.require("d"),
        n=opt.require("samples"),
        class_count=opt.require("classes"),
        true_support_size=opt.get("sparsity", 0),
        noise_sigma=opt.get("sigma", 0.0),
        seed=opt.get("seed", 0),
    )
    csv_path = os.path.join(out_dir, "dataset.csv")
    sfio.save_csv(dataset, csv_path)
    sfio.write_record(
        os.path.join(out_dir, "record.json"),
        {
            "command": "synth",
            "config": opt.snapshot(),
            "dataset": sfio.dataset_fingerprint(dataset),
            "outputs": {"dataset_csv": "dataset.csv", "planted_support": list(planted)},
        },
    )
    print(f"wrote {csv_path} (d={dataset.feature_count}, N={dataset.sample_count}, "
          f"C={dataset.class_count}), planted support {list(planted)}")
    return 0


def _solve_l21(opt, dataset, out_dir, record):
    lam = opt.get("lambda")
    if lam is None:
        raise _UsageError("algorithm l21 needs --lambda (or lambda= in the config)")
    data = center(dataset)
    config = _solver_config(opt)
    started = time.perf_counter()
    weights = l21_solve(data, lam, config)
    elapsed = time.perf_counter() - started
    norms = row_norms(weights)
    zero_rows = int(np.count_nonzero(norms == 0.0))
    order = [int(i) + 1 for i in np.argsort(-norms, kind="stable")]
    sfio.write_trace_table(
        os.path.join(out_dir, "ranking.csv"),
        ["rank", "feature", "row_norm"],
        [(r + 1, idx, norms[idx - 1]) for r, idx in enumerate(order)],
    )
    record["outputs"] = {
        "lambda": lam,
        "zero_rows": zero_rows,
        "nonzero_rows": dataset.feature_count - zero_rows,
        "ranking_table": "ranking.csv",
    }
    record["timings"] = {"solve_seconds": elapsed}
    print(f"l21 solve at lambda={lam:g}: {zero_rows} exactly-zero rows "
          f"of {dataset.feature_count}")


def cmd_solve(opt):
    out_dir = opt.require("out")
    algorithm = opt.get("algorithm", "hiht")
    dataset = _load_dataset(opt)
    record = {
        "command": "solve",
        "config": opt.snapshot(),
        "dataset": sfio.dataset_fingerprint(dataset),
    }
    if algorithm == "l21":
        _solve_l21(opt, dataset, out_dir, record)
    else:
        data = center(dataset)
        path = _run_path_algorithm(algorithm, data, _solver_config(opt))
        _path_tables(out_dir, path, with_supports=False)
        record["outputs"] = {
            "path_table": "path.csv",
            "trace_table": "trace.csv",
            "points": [_point_summary(p) for p in path.points],
            "total_iht_updates": path.total_iht_updates,
        }
        record["timings"] = {"solve_seconds": path.wall_time}
        for p in path.points:
            print(f"lambda={p.lam:.6g}  support={p.support_size:4d}  "
                  f"objective={p.objective:.6g}  inner={p.inner_iterations}")
    sfio.write_record(os.path.join(out_dir, "record.json"), record)
    return 0


def cmd_path(opt):
    out_dir = opt.require("out")
    algorithm = opt.get("algorithm", "hiht")
    if algorithm not in ("hiht", "ahiht"):
        raise _UsageError("path requires a homotopy algorithm (hiht or ahiht)")
    dataset = _load_dataset(opt)
    data = center(dataset)
    path = _run_path_algorithm(algorithm, data, _solver_config(opt))
    _path_tables(out_dir, path, with_supports=True)
    sfio.write_record(
        os.path.join(out_dir, "record.json"),
        {
            "command": "path",
            "config": opt.snapshot(),
            "dataset": sfio.dataset_fingerprint(dataset),
            "outputs": {
                "path_table": "path.csv",
                "trace_table": "trace.csv",
                "supports_table": "supports.csv",
                "points": [_point_summary(p) for p in path.points],
                "total_iht_updates": path.total_iht_updates,
            },
            "timings": {"solve_seconds": path.wall_time},
        },
    )
    print(f"recorded {len(path.points)} path points "
          f"({path.total_iht_updates} updates)")
    return 0


def cmd_select(opt):
    out_dir = opt.require("out")
    record_path = opt.require("record")
    target = opt.require("target")
    stored = sfio.read_record(record_path)
    points = stored.get("outputs", {}).get("points")
    if not points:
        raise ParameterError(f"{record_path}: record holds no path points")
    # same tie policy as solver.select_by_count: nearest count, then
    # sparser, then larger lambda
    chosen = min(
        points,
        key=lambda p: (abs(p["support_size"] - target), p["support_size"],
                       -p["lambda"]),
    )
    sfio.write_trace_table(
        os.path.join(out_dir, "selected.csv"),
        ["feature"],
        [(idx,) for idx in chosen["support"]],
    )
    sfio.write_record(
        os.path.join(out_dir, "record.json"),
        {
            "command": "select",
            "config": opt.snapshot(),
            "outputs": {
                "target": target,
                "lambda": chosen["lambda"],
                "support_size": chosen["support_size"],
                "support": chosen["support"],
                "selected_table": "selected.csv",
            },
        },
    )
    print(f"target {target} -> {chosen['support_size']} features at "
          f"lambda={chosen['lambda']:.6g}")
    return 0


def _grids(opt, dataset):
    counts = opt.get("features")
    if counts is None:
        counts = [c for c in ExperimentGrids().feature_counts
                  if c <= dataset.feature_count] or [dataset.feature_count]
    grid = opt.get("lambda_grid")
    if grid is None:
        grid = list(ExperimentGrids().lambda_grid)
    return ExperimentGrids(lambda_grid=tuple(grid), feature_counts=tuple(counts))


def _classifier_names(opt):
    choice = opt.get("classifier", "both")
    return ("knn", "softmax") if choice == "both" else (choice,)


def _run_evaluation(opt, dataset, method, grids):
    return run_experiment(
        dataset,
        method,
        grids=grids,
        trials=opt.get("trials", 10),
        seed=opt.get("seed", 0),
        solver_config=_solver_config(opt),
        classifiers=_classifier_names(opt),
        standardize=opt.get("standardize", False),
        dataset_name=os.path.basename(str(opt.get("data", "dataset"))),
    )


def _report_payload(report):
    return {
        "dataset": report.dataset_name,
        "mean_accuracy": report.mean_accuracy,
        "accuracy_std": report.accuracy_std,
        "mean_feature_count": report.mean_feature_count,
        "seeds": list(report.seeds),
        "results": [
            {
                "method": r.method,
                "classifier": r.classifier,
                "trial": r.trial_index,
                "lambda_or_k": r.lambda_or_k,
                "target_count": r.target_count,
                "selected_count": len(r.selected_features),
                "accuracy": r.accuracy,
            }
            for r in report.trials
        ],
    }


def cmd_evaluate(opt):
    out_dir = opt.require("out")
    dataset = sfio.load_csv(
        opt.require("data"),
        label_column=opt.get("label_column"),
        has_header=opt.get("has_header", False),
    )
    method = opt.get("algorithm", "hiht")
    grids = _grids(opt, dataset)
    report = _run_evaluation(opt, dataset, method, grids)
    for clf in _classifier_names(opt):
        curve = accuracy_curve(report, clf)
        sfio.write_trace_table(
            os.path.join(out_dir, f"curve_{clf}.csv"),
            ["count", "accuracy"],
            curve,
        )
        best = max(curve, key=lambda item: item[1]) if curve else None
        if best:
            print(f"{clf}: best mean accuracy {best[1]:.4f} at {best[0]} features")
    sfio.write_record(
        os.path.join(out_dir, "record.json"),
        {
            "command": "evaluate",
            "config": opt.snapshot(),
            "dataset": sfio.dataset_fingerprint(dataset),
            "outputs": {"report": _report_payload(report)},
            "timings": {
                "mean_train_seconds": float(
                    np.mean([r.train_seconds for r in report.trials])
                )
            },
        },
    )
    return 0


def cmd_compare(opt):
    out_dir = opt.require("out")
    dataset = sfio.load_csv(
        opt.require("data"),
        label_column=opt.get("label_column"),
        has_header=opt.get("has_header", False),
    )
    grids = _grids(opt, dataset)
    config = _solver_config(opt)
    data = center(dataset)
    timings = []
    record_outputs = {}
    for algorithm in ("hiht", "ahiht"):
        path = _run_path_algorithm(algorithm, data, config)
        rows = []
        iteration = 0
        for p in path.points:
            for value in p.objective_trace:
                rows.append((iteration, value))
                iteration += 1
        sfio.write_trace_table(
            os.path.join(out_dir, f"trace_{algorithm}.csv"),
            ["iteration", "objective"],
            rows,
        )
        record_outputs[f"{algorithm}_updates"] = path.total_iht_updates
        record_outputs[f"{algorithm}_solve_seconds"] = path.wall_time
    for method in ("hiht", "ahiht", "l21", "baseline"):
        report = _run_evaluation(opt, dataset, method, grids)
        for clf in _classifier_names(opt):
            sfio.write_trace_table(
                os.path.join(out_dir, f"curve_{method}_{clf}.csv"),
                ["count", "accuracy"],
                accuracy_curve(report, clf)
                or [(dataset.feature_count, report.mean_accuracy)],
            )
        mean_seconds = float(np.mean(
            [r.train_seconds for r in report.trials]
        ))
        timings.append((method, mean_seconds))
        record_outputs[f"{method}_mean_accuracy"] = report.mean_accuracy
        print(f"{method}: mean accuracy {report.mean_accuracy:.4f}, "
              f"mean solve {mean_seconds:.4f}s")
    sfio.write_trace_table(
        os.path.join(out_dir, "timings.csv"), ["method", "seconds"], timings
    )
    sfio.write_record(
        os.path.join(out_dir, "record.json"),
        {
            "command": "compare",
            "config": opt.snapshot(),
            "dataset": sfio.dataset_fingerprint(dataset),
            "outputs": record_outputs,
            "timings": {"table": "timings.csv"},
        },
    )
    return 0


def cmd_oracle_check(opt):
    out_dir = opt.require("out")
    dataset = _load_dataset(opt)
    max_d = opt.get("max_d", 12)
    data = center(dataset)
    algorithm = opt.get("algorithm", "hiht")
    if algorithm not in ("hiht", "ahiht"):
        raise _UsageError("oracle-check requires hiht or ahiht")
    path = _run_path_algorithm(algorithm, data, _solver_config(opt))
    rows = []
    for p in path.points:
        _, best = brute_force_oracle(data, p.lam, max_d=max_d)
        gap = (p.objective - best) / max(best, 1e-300)
        rows.append((p.lam, p.objective, best, gap))
        print(f"lambda={p.lam:.6g}  solver={p.objective:.9g}  "
              f"oracle={best:.9g}  relative gap={gap:.3g}")
    sfio.write_trace_table(
        os.path.join(out_dir, "gaps.csv"),
        ["lambda", "solver_objective", "oracle_objective", "relative_gap"],
        rows,
    )
    sfio.write_record(
        os.path.join(out_dir, "record.json"),
        {
            "command": "oracle-check",
            "config": opt.snapshot(),
            "dataset": sfio.dataset_fingerprint(dataset),
            "outputs": {
                "gaps_table": "gaps.csv",
                "worst_relative_gap": max(r[3] for r in rows),
            },
        },
    )
    return 0


_COMMANDS = {
    "synth": (cmd_synth, ["config", "out", "seed", "d", "samples", "classes",
                          "sparsity", "sigma"]),
    "solve": (cmd_solve, ["config", "out", "seed", "data", "label_column",
                          "has_header", "algorithm", "lambda0", "rho", "gamma",
                          "eta", "epsilon", "steps", "max_inner", "lambda",
                          "standardize"]),
    "path": (cmd_path, ["config", "out", "seed", "data", "label_column",
                        "has_header", "algorithm", "lambda0", "rho", "gamma",
                        "eta", "epsilon", "steps", "max_inner", "standardize"]),
    "select": (cmd_select, ["config", "out", "record", "target"]),
    "evaluate": (cmd_evaluate, ["config", "out", "seed", "data", "label_column",
                                "has_header", "algorithm", "lambda0", "rho",
                                "gamma", "eta", "epsilon", "steps", "max_inner",
                                "features", "classifier", "standardize",
                                "trials", "lambda_grid"]),
    "compare": (cmd_compare, ["config", "out", "seed", "data", "label_column",
                              "has_header", "lambda0", "rho", "gamma", "eta",
                              "epsilon", "steps", "max_inner", "features",
                              "classifier", "standardize", "trials",
                              "lambda_grid"]),
    "oracle-check": (cmd_oracle_check, ["config", "out", "seed", "data",
                                        "label_column", "has_header",
                                        "algorithm", "lambda0", "rho", "gamma",
                                        "eta", "epsilon", "steps", "max_inner",
                                        "max_d", "standardize"]),
}


def build_parser():
    parser = _Parser(
        prog="sparsefs",
        description="Row-sparse multi-class feature selection toolkit",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, (func, options) in _COMMANDS.items():
        sub = subparsers.add_parser(name, description=func.__doc__)
        _add(sub, *options)
        sub.set_defaults(func=func)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        options = Options(args)
        return args.func(options)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime/divergence/IO failures
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
