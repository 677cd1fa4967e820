"""Seeded benchmark harness producing the per-run results CSV.

A grid point is (generator settings, training size); each point draws
datasets_per_point fresh networks and samples, runs the standard learner
once and the skewed learner skewed_runs times on every dataset, and
appends one CSV row per run. Every random draw is derived from the master
seed and the row's identity through a stable hash, so any row can be
recomputed in isolation and must reproduce its metrics exactly. Existing
rows are skipped on rerun, which makes interrupted runs resumable.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Callable, Iterator

import numpy as np

from .evaluation import blanket_recall, mb_scores
from .generators import GeneratorSpec, generate
from .network import BayesNet, Dataset, forward_sample, log_likelihood
from .sparse_candidate import LearnConfig, run_skewed_sc, run_standard_sc

STANDARD = "sc"
SKEWED = "skewed-sc"

CSV_COLUMNS = (
    "family",
    "function_kind",
    "fidelity",
    "ci_fraction",
    "train_size",
    "dataset_index",
    "run_index",
    "learner",
    "mb_precision",
    "mb_recall",
    "mb_f1",
    "child_mb_recall",
    "test_loglik",
    "wall_seconds",
    "seed",
)

METRIC_COLUMNS = ("mb_precision", "mb_recall", "mb_f1", "child_mb_recall",
                  "test_loglik")


def derive_seed(master_seed: int, *parts) -> int:
    """Stable 64-bit seed from the master seed and a row identity."""
    text = "|".join([str(master_seed)] + [str(p) for p in parts])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class RowKey:
    """Identity of one results row; the resume key and the seed input."""

    train_size: int
    dataset_index: int
    learner: str
    run_index: int

    def __post_init__(self):
        if self.learner not in (STANDARD, SKEWED):
            raise ValueError(f"unknown learner {self.learner!r}")
        if self.train_size < 1 or self.dataset_index < 0 or self.run_index < 0:
            raise ValueError("row key fields must be non-negative")

    def as_tuple(self) -> tuple:
        return (self.train_size, self.dataset_index, self.learner,
                self.run_index)


@dataclass
class ResultRow:
    family: str
    function_kind: str
    fidelity: float | None
    ci_fraction: float | None
    train_size: int
    dataset_index: int
    run_index: int
    learner: str
    mb_precision: float
    mb_recall: float
    mb_f1: float
    child_mb_recall: float
    test_loglik: float
    wall_seconds: float
    seed: int

    def resume_key(self) -> tuple:
        return (self.train_size, self.dataset_index, self.learner,
                self.run_index)

    def to_csv_dict(self) -> dict[str, str]:
        out = {}
        for name in CSV_COLUMNS:
            value = getattr(self, name)
            if value is None:
                out[name] = ""
            elif isinstance(value, float):
                out[name] = repr(float(value))
            else:
                out[name] = str(value)
        return out

    @classmethod
    def from_csv_dict(cls, row: dict[str, str]) -> "ResultRow":
        def opt_float(text: str) -> float | None:
            return None if text == "" else float(text)

        return cls(
            family=row["family"],
            function_kind=row["function_kind"],
            fidelity=opt_float(row["fidelity"]),
            ci_fraction=opt_float(row["ci_fraction"]),
            train_size=int(row["train_size"]),
            dataset_index=int(row["dataset_index"]),
            run_index=int(row["run_index"]),
            learner=row["learner"],
            mb_precision=float(row["mb_precision"]),
            mb_recall=float(row["mb_recall"]),
            mb_f1=float(row["mb_f1"]),
            child_mb_recall=float(row["child_mb_recall"]),
            test_loglik=float(row["test_loglik"]),
            wall_seconds=float(row["wall_seconds"]),
            seed=int(row["seed"]),
        )


@dataclass
class ExperimentConfig:
    """Grid description: generator, sizes, repetitions, seeds, output."""

    generator: GeneratorSpec
    train_sizes: list[int]
    test_size: int = 1000
    datasets_per_point: int = 10
    skewed_runs: int = 5
    master_seed: int = 0
    output: str = "results.csv"
    standard: LearnConfig = field(default_factory=LearnConfig)
    skewed: LearnConfig = field(default_factory=LearnConfig)

    def __post_init__(self):
        if not self.train_sizes or any(s < 1 for s in self.train_sizes):
            raise ValueError("train_sizes must be positive")
        if self.test_size < 1:
            raise ValueError("test_size must be positive")
        if self.datasets_per_point < 1 or self.skewed_runs < 1:
            raise ValueError("repetition counts must be positive")

    def to_json(self) -> str:
        def spec_dict(obj) -> dict:
            return {f.name: getattr(obj, f.name) for f in fields(obj)}

        body = {
            "generator": spec_dict(self.generator),
            "train_sizes": self.train_sizes,
            "test_size": self.test_size,
            "datasets_per_point": self.datasets_per_point,
            "skewed_runs": self.skewed_runs,
            "master_seed": self.master_seed,
            "output": self.output,
            "standard": learn_config_dict(self.standard),
            "skewed": learn_config_dict(self.skewed),
        }
        return json.dumps(body, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        body = json.loads(text)
        gen = body.get("generator")
        if not isinstance(gen, dict) or "family" not in gen:
            raise ValueError("config needs a generator section with a family")
        if "top_prior_range" in gen:
            gen = dict(gen, top_prior_range=tuple(gen["top_prior_range"]))
        known = {
            "generator", "train_sizes", "test_size", "datasets_per_point",
            "skewed_runs", "master_seed", "output", "standard", "skewed",
        }
        unknown = set(body) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(
            generator=GeneratorSpec(**gen),
            train_sizes=[int(s) for s in body.get("train_sizes", [])],
            test_size=int(body.get("test_size", 1000)),
            datasets_per_point=int(body.get("datasets_per_point", 10)),
            skewed_runs=int(body.get("skewed_runs", 5)),
            master_seed=int(body.get("master_seed", 0)),
            output=str(body.get("output", "results.csv")),
            standard=learn_config_from_dict(body.get("standard", {})),
            skewed=learn_config_from_dict(body.get("skewed", {})),
        )


def learn_config_dict(cfg: LearnConfig) -> dict:
    """Flat key-value form of a LearnConfig, score settings inlined."""
    out = {f.name: getattr(cfg, f.name) for f in fields(cfg)
           if f.name != "score"}
    out["penalty_enabled"] = cfg.score.penalty_enabled
    out["penalty_log_half_m"] = cfg.score.penalty_log_half_m
    return out


def learn_config_from_dict(body: dict) -> LearnConfig:
    from .scoring import ScoreConfig

    body = dict(body)
    score = ScoreConfig(
        penalty_enabled=bool(body.pop("penalty_enabled", True)),
        penalty_log_half_m=bool(body.pop("penalty_log_half_m", False)),
    )
    allowed = {f.name for f in fields(LearnConfig)} - {"score"}
    unknown = set(body) - allowed
    if unknown:
        raise ValueError(f"unknown learner settings: {sorted(unknown)}")
    return LearnConfig(**body, score=score)


def grid_keys(cfg: ExperimentConfig) -> Iterator[RowKey]:
    """All row identities of the grid, in execution order."""
    for size in cfg.train_sizes:
        for d in range(cfg.datasets_per_point):
            yield RowKey(size, d, STANDARD, 0)
            for r in range(cfg.skewed_runs):
                yield RowKey(size, d, SKEWED, r)


def _point_identity(cfg: ExperimentConfig, size: int) -> tuple:
    g = cfg.generator
    if g.family == "hub":
        settings = (g.family, g.n, g.parent_count, g.function_kind, g.fidelity)
    else:
        settings = (g.family, g.top_count, g.bottom_count, g.ci_fraction,
                    g.top_prior_range)
    return settings + (size,)


def make_point_data(cfg: ExperimentConfig, size: int,
                    dataset_index: int) -> tuple[BayesNet, Dataset, Dataset]:
    """Network plus train/test samples for one dataset of a grid point.

    Shared by every learner and run on that dataset: the identity feeding
    the seeds deliberately excludes the learner and run index.
    """
    identity = _point_identity(cfg, size) + (dataset_index,)
    net = generate(cfg.generator,
                   np.random.default_rng(derive_seed(cfg.master_seed, "net",
                                                     *identity)))
    train = forward_sample(net, size,
                           np.random.default_rng(
                               derive_seed(cfg.master_seed, "train",
                                           *identity)))
    test = forward_sample(net, cfg.test_size,
                          np.random.default_rng(
                              derive_seed(cfg.master_seed, "test",
                                          *identity)))
    return net, train, test


def _driven_variables(net: BayesNet) -> list[int]:
    """Variables whose CPTs are function-driven (they have parents)."""
    return [v for v in range(net.n) if net.dag.parents(v)]


def compute_row(cfg: ExperimentConfig, key: RowKey) -> ResultRow:
    """Recompute one results row from scratch, independent of any other."""
    net, train, test = make_point_data(cfg, key.train_size, key.dataset_index)
    identity = _point_identity(cfg, key.train_size) + (
        key.dataset_index, key.learner, key.run_index)
    seed = derive_seed(cfg.master_seed, "run", *identity)
    base = cfg.standard if key.learner == STANDARD else cfg.skewed
    learn_cfg = replace(base, seed=seed)
    layers = net.dag.layers
    started = time.perf_counter()
    if key.learner == STANDARD:
        learned, _ = run_standard_sc(train, learn_cfg, layers=layers)
    else:
        learned, _ = run_skewed_sc(train, learn_cfg, layers=layers)
    wall = time.perf_counter() - started
    scores = mb_scores(net.dag, learned.dag)
    driven = _driven_variables(net)
    child_recall = (
        sum(blanket_recall(net.dag, learned.dag, v) for v in driven)
        / len(driven)) if driven else 1.0
    g = cfg.generator
    return ResultRow(
        family=g.family,
        function_kind=g.function_kind if g.family == "hub" else "parity",
        fidelity=g.fidelity if g.family == "hub" else None,
        ci_fraction=g.ci_fraction if g.family == "qmr" else None,
        train_size=key.train_size,
        dataset_index=key.dataset_index,
        run_index=key.run_index,
        learner=key.learner,
        mb_precision=float(scores["precision"]),
        mb_recall=float(scores["recall"]),
        mb_f1=float(scores["f1"]),
        child_mb_recall=float(child_recall),
        test_loglik=float(log_likelihood(learned, test)),
        wall_seconds=wall,
        seed=seed,
    )


def read_rows(path: str | Path) -> list[ResultRow]:
    path = Path(path)
    if not path.exists():
        return []
    with path.open(newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is not None and tuple(
                reader.fieldnames) != CSV_COLUMNS:
            raise ValueError(
                f"{path} has columns {reader.fieldnames}, "
                f"expected {list(CSV_COLUMNS)}")
        return [ResultRow.from_csv_dict(row) for row in reader]


def run_experiment(cfg: ExperimentConfig,
                   progress: Callable[[ResultRow], None] | None = None,
                   ) -> list[ResultRow]:
    """Fill in any missing grid rows and return the complete row list.

    Rows already present in the output CSV are kept as-is; new rows are
    appended as they finish, so an interrupted run loses at most the row
    in flight.
    """
    path = Path(cfg.output)
    existing = read_rows(path)
    done = {row.resume_key() for row in existing}
    path.parent.mkdir(parents=True, exist_ok=True)
    fresh_file = not path.exists() or path.stat().st_size == 0
    with path.open("a", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=CSV_COLUMNS)
        if fresh_file:
            writer.writeheader()
            handle.flush()
        for key in grid_keys(cfg):
            if key.as_tuple() in done:
                continue
            row = compute_row(cfg, key)
            writer.writerow(row.to_csv_dict())
            handle.flush()
            existing.append(row)
            if progress is not None:
                progress(row)
    order = {key.as_tuple(): i for i, key in enumerate(grid_keys(cfg))}
    existing.sort(key=lambda row: order.get(row.resume_key(), len(order)))
    return existing
