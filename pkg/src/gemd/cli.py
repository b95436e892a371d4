"""Command-line entry point: ``gemd <subcommand> ...``."""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import io
from .experiments import (ExperimentConfig, config_to_dict, run_faithfulness_scan,
                          run_orientation_accuracy, run_roc,
                          verify_counterexample)
from .ldim import ModelError, empirical_autocovariance, population_autocovariance, simulate
from .models import BUILTINS
from .orientation import orient_all
from .reconstruct import GemdParams, ReconstructionResult, gemd


def _model(spec: str):
    if spec in BUILTINS:
        return BUILTINS[spec]()
    return io.load_model(spec)


def _horizons(text: str) -> tuple[int, ...]:
    return tuple(int(h) for h in text.split(","))


def cmd_simulate(a):
    m = _model(a.model)
    io.write_data_csv(simulate(m, a.horizon, a.seed), a.out)


def cmd_reconstruct(a):
    params = GemdParams(edge_threshold=a.threshold, lag_depth=a.lags,
                        max_cond_size=a.max_cond, witness=a.witness)
    if a.data:
        data = io.read_data_csv(a.data)
        source = empirical_autocovariance(data, a.lags)
    elif a.model:
        source = population_autocovariance(_model(a.model), a.lags)
    else:
        raise SystemExit("reconstruct: need --data or --model")
    if a.model and a.data:
        n = _model(a.model).n
        if n != source.n:
            raise SystemExit(f"reconstruct: model has {n} processes, data has {source.n}")
    res = gemd(source, source.n, params)
    io.write_json(res.to_dict(), a.out)


def cmd_orient(a):
    res = ReconstructionResult.from_dict(io.read_json(a.inp))
    g, trace = orient_all(res)
    io.write_json({"graph": g.to_dict(), "trace": trace.to_dict()}, a.out)
    if a.log:
        with open(a.log, "w") as fh:
            fh.writelines(line + "\n" for line in trace.log_lines())


def _config(a) -> ExperimentConfig:
    return ExperimentConfig(model=a.model, trials=a.trials, horizons=_horizons(a.horizons),
                            lag_depth=a.lags, max_cond_size=a.max_cond, seed=a.seed,
                            param_low=a.low, param_high=a.high, n_jobs=a.jobs,
                            b32_placement=a.b32)


def cmd_roc(a):
    cfg = _config(a)
    curves = run_roc(cfg)
    rows = [r for c in curves for r in c.rows()]
    io.write_rows_csv(rows, ["horizon", "threshold", "tpr", "fpr"], a.out)
    for c in curves:
        print(f"T={c.horizon} AUC={io.fmt(c.auc)} knee={io.fmt(c.knee())}")


def cmd_accuracy(a):
    cfg = _config(a)
    rows = run_orientation_accuracy(cfg, population=a.population)
    io.write_rows_csv([r.__dict__ for r in rows], ["horizon", "accuracy", "trials"], a.out)
    for r in rows:
        print(f"T={r.horizon} accuracy={io.fmt(r.accuracy)} threshold={io.fmt(r.threshold)}")


def cmd_counterexample(a):
    rep = verify_counterexample(grid_size=a.grid, draws=a.draws, seed=a.seed)
    print(f"max deviation {io.fmt(rep.max_deviation)}")
    print(f"max closed-form error {io.fmt(rep.max_closed_form_error)}")
    print("PASS" if rep.passed else "FAIL")
    return 0 if rep.passed else 1


def cmd_faithfulness(a):
    cfg = ExperimentConfig(model=a.model, trials=a.trials, horizons=(1,), lag_depth=a.lags,
                           seed=a.seed, param_low=a.low, param_high=a.high,
                           b32_placement=a.b32)
    summary = run_faithfulness_scan(cfg, constrained=a.constrained)
    rows = [{"trial": r["trial"], "seed": r["seed"],
             "faithful": "" if r["faithful"] is None else str(r["faithful"]).lower(),
             "violations": "" if r["violations"] is None else r["violations"]}
            for r in summary.rows]
    io.write_rows_csv(rows, ["trial", "seed", "faithful", "violations"], a.out)
    if a.summary:
        io.write_json(summary.to_dict() | {"config": config_to_dict(cfg)}, a.summary)
    print(f"trials={summary.trials} faithful={summary.faithful} "
          f"unfaithful={summary.unfaithful} unstable={summary.unstable}")


def _experiment_args(p, trials=100, horizons="500,1000,10000,20000,25000"):
    p.add_argument("--model", default="example2_network")
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--horizons", default=horizons, help="comma-separated sample counts")
    p.add_argument("--lags", type=int, default=10)
    p.add_argument("--max-cond", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--low", type=float, default=0.3)
    p.add_argument("--high", type=float, default=0.6)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--b32", choices=("combined", "self"), default="combined")
    p.add_argument("--out", required=True)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gemd", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("simulate", help="simulate a model to CSV")
    p.add_argument("--model", required=True, help="model JSON or builtin name")
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconstruct", help="run GEMD on data or a model's covariance")
    p.add_argument("--model")
    p.add_argument("--data")
    p.add_argument("--threshold", type=float, default=1e-6)
    p.add_argument("--lags", type=int, default=10)
    p.add_argument("--max-cond", type=int, default=None)
    p.add_argument("--witness", choices=("first", "min"), default="first")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("orient", help="orient a reconstruction result")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--log")
    p.set_defaults(func=cmd_orient)

    p = sub.add_parser("roc", help="ROC sweep over horizons")
    _experiment_args(p)
    p.set_defaults(func=cmd_roc)

    p = sub.add_parser("accuracy", help="orientation accuracy at the ROC knee")
    _experiment_args(p)
    p.add_argument("--population", action="store_true",
                   help="use exact autocovariances instead of samples")
    p.set_defaults(func=cmd_accuracy)

    p = sub.add_parser("counterexample", help="check the triangle/sparse PSD equality")
    p.add_argument("--draws", type=int, default=20)
    p.add_argument("--grid", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("faithfulness", help="zero-measure faithfulness scan")
    p.add_argument("--model", default="example2_network")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--lags", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--low", type=float, default=0.3)
    p.add_argument("--high", type=float, default=0.6)
    p.add_argument("--b32", choices=("combined", "self"), default="combined")
    p.add_argument("--constrained", action="store_true", help="triangle with c = -a b")
    p.add_argument("--out", required=True)
    p.add_argument("--summary")
    p.set_defaults(func=cmd_faithfulness)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        rc = a.func(a)
    except (ModelError, ValueError, FileNotFoundError, np.linalg.LinAlgError) as exc:
        print(f"gemd {a.cmd}: error: {exc}", file=sys.stderr)
        return 2
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
