"""Command line front end for the generators, learners, and benchmark.

Subcommands: generate, sample, learn, eval, experiment. Exit codes are
0 on success, 1 for usage errors (bad flags or flag values), and 2 for
IO and parse errors (missing or malformed input files).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from .evaluation import mb_scores
from .experiment import ExperimentConfig, run_experiment
from .generators import GeneratorSpec, ci_order, function_from_cpt, generate
from .network import BayesNet, DataFormatError, Dataset, forward_sample, log_likelihood
from .scoring import ScoreConfig
from .sparse_candidate import LearnConfig, RunReport, run_skewed_sc, run_standard_sc

LEARNERS = ("sc", "skewed-sc")


class UsageError(Exception):
    """Invalid flag combination or flag value; maps to exit code 1."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skewsc",
        description="Structure learning with skew-weighted candidate selection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate",
                         help="draw a synthetic network and sample data")
    gen.add_argument("--family", required=True, choices=("hub", "qmr"))
    gen.add_argument("--n", type=int, default=30,
                     help="hub: total variable count")
    gen.add_argument("--parent-count", type=int, default=5,
                     help="hub: inputs of the function child")
    gen.add_argument("--function-kind", default="parity",
                     choices=("parity", "consensus", "random"))
    gen.add_argument("--fidelity", type=float, default=1.0,
                     help="hub: probability the child follows the function")
    gen.add_argument("--top-count", type=int, default=20)
    gen.add_argument("--bottom-count", type=int, default=20)
    gen.add_argument("--ci-fraction", type=float, default=1.0,
                     help="qmr: share of effects given a parity table")
    gen.add_argument("--top-prior-low", type=float, default=0.5)
    gen.add_argument("--top-prior-high", type=float, default=0.5)
    gen.add_argument("--train", type=int, default=1000,
                     help="training rows to sample")
    gen.add_argument("--test", type=int, default=0,
                     help="test rows to sample (0 skips the file)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out-dir", required=True)
    gen.set_defaults(func=cmd_generate)

    smp = sub.add_parser("sample", help="sample rows from a stored network")
    smp.add_argument("--network", required=True)
    smp.add_argument("--rows", type=int, required=True)
    smp.add_argument("--seed", type=int, default=0)
    smp.add_argument("--out", required=True)
    smp.set_defaults(func=cmd_sample)

    lrn = sub.add_parser("learn", help="learn a network from a data CSV")
    lrn.add_argument("--data", required=True)
    lrn.add_argument("--learner", required=True, choices=LEARNERS)
    lrn.add_argument("--out", required=True, help="path for the network JSON")
    lrn.add_argument("--report", default=None,
                     help="path for the run summary (default: stdout)")
    lrn.add_argument("--k", type=int, default=None,
                     help="candidate set size per variable")
    lrn.add_argument("--t1", type=int, default=None,
                     help="skewed-sc: weightings per restrict phase")
    lrn.add_argument("--t2", type=int, default=None,
                     help="skewed-sc: weightings per search phase")
    lrn.add_argument("--fraction", type=float, default=None,
                     help="skewed-sc: stop a search phase once the best "
                          "improvement falls below this share of the first "
                          "applied action's improvement")
    lrn.add_argument("--max-outer-iterations", type=int, default=None)
    lrn.add_argument("--max-actions-per-phase", type=int, default=None)
    lrn.add_argument("--fit-pseudocount", type=float, default=None)
    lrn.add_argument("--no-normalize-weights", action="store_true",
                     help="skewed-sc: skip scaling weights to sum to the row count")
    lrn.add_argument("--no-penalty", action="store_true",
                     help="score without the complexity penalty")
    lrn.add_argument("--penalty-log-half-m", action="store_true",
                     help="use log(m/2) instead of log(m)/2 in the penalty")
    lrn.add_argument("--layer-constraint", action="store_true",
                     help="restrict arcs to top-to-bottom; needs --layers-from")
    lrn.add_argument("--layers-from", default=None,
                     help="network JSON supplying the layer labels")
    lrn.add_argument("--seed", type=int, default=0)
    lrn.set_defaults(func=cmd_learn)

    ev = sub.add_parser("eval",
                        help="score a learned network against the truth")
    ev.add_argument("--true-network", required=True)
    ev.add_argument("--learned-network", required=True)
    ev.add_argument("--test", default=None,
                    help="test CSV for held-out log-likelihood")
    ev.add_argument("--average", default="micro", choices=("micro", "macro"))
    ev.set_defaults(func=cmd_eval)

    exp = sub.add_parser("experiment",
                         help="run a benchmark grid described by a config file")
    exp.add_argument("--config", required=True)
    exp.add_argument("--output", default=None,
                     help="override the config's output CSV path")
    exp.add_argument("--datasets-per-point", type=int, default=None)
    exp.add_argument("--seed", type=int, default=None,
                     help="override the config's master seed")
    exp.add_argument("--quiet", action="store_true",
                     help="suppress per-row progress lines")
    exp.set_defaults(func=cmd_experiment)

    return parser


def cmd_generate(args) -> int:
    spec = GeneratorSpec(
        family=args.family,
        n=args.n,
        parent_count=args.parent_count,
        function_kind=args.function_kind,
        fidelity=args.fidelity,
        top_count=args.top_count,
        bottom_count=args.bottom_count,
        ci_fraction=args.ci_fraction,
        top_prior_range=(args.top_prior_low, args.top_prior_high),
    )
    if args.train < 1:
        raise UsageError("--train must be positive")
    if args.test < 0:
        raise UsageError("--test must be nonnegative")
    rng = np.random.default_rng(args.seed)
    net = generate(spec, rng)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    net.to_json(out_dir / "network.json")
    train = forward_sample(net, args.train, rng)
    train.to_csv(out_dir / "train.csv")
    written = ["network.json", "train.csv"]
    if args.test:
        forward_sample(net, args.test, rng).to_csv(out_dir / "test.csv")
        written.append("test.csv")
    arcs = sum(len(net.dag.parents(v)) for v in range(net.n))
    print(f"family={spec.family} variables={net.n} arcs={arcs}")
    for v in range(net.n):
        fn = function_from_cpt(net.cpts[v])
        if fn is None:
            continue
        print(f"{net.names[v]}: arity={fn.arity} ci_order={ci_order(fn)}")
    print(f"wrote {', '.join(written)} to {out_dir}")
    return 0


def cmd_sample(args) -> int:
    if args.rows < 1:
        raise UsageError("--rows must be positive")
    net = BayesNet.from_json(args.network)
    data = forward_sample(net, args.rows, np.random.default_rng(args.seed))
    data.to_csv(args.out)
    print(f"wrote {args.rows} rows to {args.out}")
    return 0


def _learn_config(args) -> LearnConfig:
    if args.learner == "sc":
        for name, flag in (("t1", "--t1"), ("t2", "--t2"),
                           ("fraction", "--fraction")):
            if getattr(args, name) is not None:
                raise UsageError(
                    f"{flag} only applies to skewed-sc; the standard learner "
                    f"uses a single all-ones weighting")
        if args.no_normalize_weights:
            raise UsageError("--no-normalize-weights only applies to skewed-sc")
    score = ScoreConfig(penalty_enabled=not args.no_penalty,
                        penalty_log_half_m=args.penalty_log_half_m)
    cfg = LearnConfig(seed=args.seed, layer_constraint=args.layer_constraint,
                      normalize_weights=not args.no_normalize_weights,
                      score=score)
    overrides = {}
    for name in ("k", "t1", "t2", "fraction", "max_outer_iterations",
                 "max_actions_per_phase", "fit_pseudocount"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    return replace(cfg, **overrides)


def _layers_for(args, data: Dataset) -> list[str] | None:
    if args.layers_from is None:
        if args.layer_constraint:
            raise UsageError("--layer-constraint needs --layers-from")
        return None
    source = BayesNet.from_json(args.layers_from)
    if source.dag.layers is None:
        raise UsageError(f"{args.layers_from} carries no layer labels")
    if list(source.names) != list(data.names):
        raise UsageError(
            "--layers-from network names do not match the data columns")
    return source.dag.layers


def _describe_run(report: RunReport, wall: float, arcs: int) -> str:
    lines = [f"learner: {report.learner}"]
    measure = ("refit log-likelihood" if report.learner == "skewed"
               else "penalized network score")
    lines.append(f"starting {measure}: {report.initial_original_score:.4f}")
    for i, rnd in enumerate(report.rounds, start=1):
        lines.append(
            f"round {i}: actions={rnd.actions_applied} "
            f"search_stop={rnd.search_stop} {measure}={rnd.original_score:.4f}")
    lines.append(f"stop reason: {report.stop_reason}")
    if report.refinement is not None:
        lines.append("refinement on the unweighted data:")
        ref = report.refinement
        lines.append(f"  starting penalized network score: "
                     f"{ref.initial_original_score:.4f}")
        for i, rnd in enumerate(ref.rounds, start=1):
            lines.append(
                f"  round {i}: actions={rnd.actions_applied} "
                f"search_stop={rnd.search_stop} "
                f"penalized network score={rnd.original_score:.4f}")
        lines.append(f"  stop reason: {ref.stop_reason}")
    lines.append(f"arcs learned: {arcs}")
    lines.append(f"wall seconds: {wall:.3f}")
    return "\n".join(lines)


def cmd_learn(args) -> int:
    cfg = _learn_config(args)
    data = Dataset.from_csv(args.data)
    layers = _layers_for(args, data)
    started = time.perf_counter()
    if args.learner == "sc":
        net, report = run_standard_sc(data, cfg, layers=layers)
    else:
        net, report = run_skewed_sc(data, cfg, layers=layers)
    wall = time.perf_counter() - started
    net.to_json(args.out)
    arcs = sum(len(net.dag.parents(v)) for v in range(net.n))
    summary = _describe_run(report, wall, arcs)
    if args.report is None:
        print(summary)
    else:
        Path(args.report).write_text(summary + "\n")
        print(f"wrote {args.out} and {args.report}")
    return 0


def cmd_eval(args) -> int:
    true_net = BayesNet.from_json(args.true_network)
    learned = BayesNet.from_json(args.learned_network)
    if true_net.n != learned.n:
        raise UsageError("networks disagree on variable count")
    scores = mb_scores(true_net.dag, learned.dag, average=args.average)
    for name in ("precision", "recall", "f1"):
        print(f"mb_{name}={scores[name]!r}")
    if args.test is not None:
        test = Dataset.from_csv(args.test)
        if test.n != learned.n:
            raise UsageError("test data and network disagree on variable count")
        print(f"test_loglik={log_likelihood(learned, test)!r}")
    return 0


def cmd_experiment(args) -> int:
    try:
        cfg = ExperimentConfig.from_json(Path(args.config).read_text())
    except ValueError as exc:
        raise DataFormatError(f"{args.config}: {exc}")
    if args.output is not None:
        cfg = replace(cfg, output=args.output)
    if args.datasets_per_point is not None:
        cfg = replace(cfg, datasets_per_point=args.datasets_per_point)
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)

    def progress(row):
        print(f"train={row.train_size} dataset={row.dataset_index} "
              f"learner={row.learner} run={row.run_index} "
              f"mb_f1={row.mb_f1:.3f} ({row.wall_seconds:.2f}s)")

    rows = run_experiment(cfg, progress=None if args.quiet else progress)
    for size in cfg.train_sizes:
        for learner in LEARNERS:
            group = [r.mb_f1 for r in rows
                     if r.train_size == size and r.learner == learner]
            if group:
                print(f"train={size} learner={learner} "
                      f"mean_mb_f1={sum(group) / len(group):.4f} "
                      f"rows={len(group)}")
    print(f"wrote {len(rows)} rows to {cfg.output}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DataFormatError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
