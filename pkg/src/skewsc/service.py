"""HTTP service exposing generation, learning, evaluation, and benchmarks.

Thin wrapper over the library: requests and responses are pydantic models,
networks travel as the same JSON document the CLI writes, and benchmark
grids run as background jobs that report progress and stream back their
result rows. Domain validation failures map to 400, malformed request
shapes to FastAPI's native 422.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .evaluation import mb_scores
from .experiment import ExperimentConfig, ResultRow, grid_keys, run_experiment
from .generators import GeneratorSpec, ci_order, function_from_cpt, generate
from .network import BayesNet, DataFormatError, Dataset, forward_sample, log_likelihood
from .scoring import ScoreConfig
from .sparse_candidate import LearnConfig, run_skewed_sc, run_standard_sc


class NetworkModel(BaseModel):
    """Wire form of a network; identical to the network JSON file schema."""

    model_config = ConfigDict(extra="forbid")

    variables: list[str]
    parents: list[list[str]]
    cpts: list[list[float]]
    layers: list[str] | None = None

    @classmethod
    def from_net(cls, net: BayesNet) -> "NetworkModel":
        return cls(**json.loads(net.to_json()))

    def to_net(self) -> BayesNet:
        return BayesNet.from_json(self.model_dump_json())


class DataModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    names: list[str]
    rows: list[list[int]]

    @classmethod
    def from_dataset(cls, data: Dataset) -> "DataModel":
        return cls(names=list(data.names),
                   rows=[[int(v) for v in row] for row in data.values])

    def to_dataset(self) -> Dataset:
        values = (np.array(self.rows, dtype=np.uint8) if self.rows
                  else np.zeros((0, len(self.names)), np.uint8))
        return Dataset(list(self.names), values)


class GenerateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: str
    n: int = 30
    parent_count: int = 5
    function_kind: str = "parity"
    fidelity: float = 1.0
    top_count: int = 20
    bottom_count: int = 20
    ci_fraction: float = 1.0
    top_prior_low: float = 0.5
    top_prior_high: float = 0.5
    seed: int = 0


class GenerateResponse(BaseModel):
    network: NetworkModel
    ci_orders: dict[str, int]


class SampleRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    network: NetworkModel
    rows: int = Field(ge=1, le=1_000_000)
    seed: int = 0


class LearnSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k: int = 6
    t1: int = 30
    t2: int = 30
    fraction: float = 0.5
    max_outer_iterations: int = 30
    max_actions_per_phase: int | None = None
    seed: int = 0
    layer_constraint: bool = False
    normalize_weights: bool = True
    fit_pseudocount: float = 1.0
    penalty_enabled: bool = True
    penalty_log_half_m: bool = False

    def to_config(self) -> LearnConfig:
        score = ScoreConfig(penalty_enabled=self.penalty_enabled,
                            penalty_log_half_m=self.penalty_log_half_m)
        return LearnConfig(
            k=self.k, t1=self.t1, t2=self.t2, fraction=self.fraction,
            max_outer_iterations=self.max_outer_iterations,
            max_actions_per_phase=self.max_actions_per_phase,
            seed=self.seed, layer_constraint=self.layer_constraint,
            normalize_weights=self.normalize_weights,
            fit_pseudocount=self.fit_pseudocount, score=score)


class LearnRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    data: DataModel
    learner: str
    settings: LearnSettings = Field(default_factory=LearnSettings)
    layers: list[str] | None = None


class RoundModel(BaseModel):
    actions_applied: int
    search_stop: str
    score: float


class PhaseModel(BaseModel):
    rounds: list[RoundModel]
    stop_reason: str
    initial_score: float
    final_score: float


class LearnResponse(BaseModel):
    network: NetworkModel
    learner: str
    outer: PhaseModel
    refinement: PhaseModel | None
    arcs: int
    wall_seconds: float


class EvaluateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    true_network: NetworkModel
    learned_network: NetworkModel
    test: DataModel | None = None
    average: str = "micro"


class EvaluateResponse(BaseModel):
    mb_precision: float
    mb_recall: float
    mb_f1: float
    test_loglik: float | None = None


class ResultRowModel(BaseModel):
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

    @classmethod
    def from_row(cls, row: ResultRow) -> "ResultRowModel":
        return cls(**{name: getattr(row, name) for name in
                      cls.model_fields})


class JobStatus(BaseModel):
    job_id: str
    status: str
    rows_done: int
    total_rows: int
    output: str
    error: str | None = None


@dataclass
class _Job:
    config: ExperimentConfig
    total: int
    status: str = "running"
    done: int = 0
    error: str | None = None
    rows: list[ResultRow] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)


def _phase_model(report) -> PhaseModel:
    return PhaseModel(
        rounds=[RoundModel(actions_applied=r.actions_applied,
                           search_stop=r.search_stop,
                           score=r.original_score) for r in report.rounds],
        stop_reason=report.stop_reason,
        initial_score=report.initial_original_score,
        final_score=report.final_original_score)


def create_app() -> FastAPI:
    app = FastAPI(title="skewsc", version=__version__)
    jobs: dict[str, _Job] = {}
    app.state.jobs = jobs

    def bad_request(exc: Exception) -> HTTPException:
        return HTTPException(status_code=400, detail=str(exc))

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/generate", response_model=GenerateResponse)
    def generate_endpoint(req: GenerateRequest) -> GenerateResponse:
        try:
            spec = GeneratorSpec(
                family=req.family, n=req.n, parent_count=req.parent_count,
                function_kind=req.function_kind, fidelity=req.fidelity,
                top_count=req.top_count, bottom_count=req.bottom_count,
                ci_fraction=req.ci_fraction,
                top_prior_range=(req.top_prior_low, req.top_prior_high))
            net = generate(spec, np.random.default_rng(req.seed))
        except ValueError as exc:
            raise bad_request(exc)
        orders = {}
        for v in range(net.n):
            fn = function_from_cpt(net.cpts[v])
            if fn is not None:
                orders[net.names[v]] = ci_order(fn)
        return GenerateResponse(network=NetworkModel.from_net(net),
                                ci_orders=orders)

    @app.post("/sample", response_model=DataModel)
    def sample_endpoint(req: SampleRequest) -> DataModel:
        try:
            net = req.network.to_net()
            data = forward_sample(net, req.rows,
                                  np.random.default_rng(req.seed))
        except (ValueError, DataFormatError) as exc:
            raise bad_request(exc)
        return DataModel.from_dataset(data)

    @app.post("/learn", response_model=LearnResponse)
    def learn_endpoint(req: LearnRequest) -> LearnResponse:
        if req.learner not in ("sc", "skewed-sc"):
            raise bad_request(ValueError(
                f"unknown learner {req.learner!r}; expected sc or skewed-sc"))
        if req.learner == "sc":
            skew_only = {"t1", "t2", "fraction", "normalize_weights"}
            given = skew_only & req.settings.model_fields_set
            if given:
                raise bad_request(ValueError(
                    f"settings {sorted(given)} only apply to skewed-sc"))
        try:
            data = req.data.to_dataset()
            cfg = req.settings.to_config()
            started = time.perf_counter()
            if req.learner == "sc":
                net, report = run_standard_sc(data, cfg, layers=req.layers)
            else:
                net, report = run_skewed_sc(data, cfg, layers=req.layers)
            wall = time.perf_counter() - started
        except (ValueError, DataFormatError) as exc:
            raise bad_request(exc)
        refinement = (None if report.refinement is None
                      else _phase_model(report.refinement))
        return LearnResponse(
            network=NetworkModel.from_net(net),
            learner=req.learner,
            outer=_phase_model(report),
            refinement=refinement,
            arcs=sum(len(net.dag.parents(v)) for v in range(net.n)),
            wall_seconds=wall)

    @app.post("/evaluate", response_model=EvaluateResponse)
    def evaluate_endpoint(req: EvaluateRequest) -> EvaluateResponse:
        try:
            true_net = req.true_network.to_net()
            learned = req.learned_network.to_net()
            if true_net.n != learned.n:
                raise ValueError("networks disagree on variable count")
            scores = mb_scores(true_net.dag, learned.dag,
                               average=req.average)
            loglik = None
            if req.test is not None:
                test = req.test.to_dataset()
                if test.n != learned.n:
                    raise ValueError(
                        "test data and network disagree on variable count")
                loglik = log_likelihood(learned, test)
        except (ValueError, DataFormatError) as exc:
            raise bad_request(exc)
        return EvaluateResponse(mb_precision=scores["precision"],
                                mb_recall=scores["recall"],
                                mb_f1=scores["f1"], test_loglik=loglik)

    def _run_job(job_id: str) -> None:
        job = jobs[job_id]

        def progress(row: ResultRow) -> None:
            with job.lock:
                job.done += 1

        try:
            rows = run_experiment(job.config, progress=progress)
            with job.lock:
                job.rows = rows
                job.done = len(rows)
                job.status = "done"
        except Exception as exc:
            with job.lock:
                job.status = "failed"
                job.error = str(exc)

    @app.post("/experiments", response_model=JobStatus)
    def start_experiment(body: dict) -> JobStatus:
        try:
            cfg = ExperimentConfig.from_json(json.dumps(body))
        except (ValueError, TypeError) as exc:
            raise bad_request(exc)
        job_id = uuid.uuid4().hex
        total = sum(1 for _ in grid_keys(cfg))
        job = _Job(config=cfg, total=total)
        jobs[job_id] = job
        thread = threading.Thread(target=_run_job, args=(job_id,),
                                  daemon=True)
        thread.start()
        return JobStatus(job_id=job_id, status=job.status, rows_done=0,
                         total_rows=total, output=cfg.output)

    def _get_job(job_id: str) -> _Job:
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404,
                                detail=f"no job {job_id!r}")
        return job

    @app.get("/experiments/{job_id}", response_model=JobStatus)
    def experiment_status(job_id: str) -> JobStatus:
        job = _get_job(job_id)
        with job.lock:
            return JobStatus(job_id=job_id, status=job.status,
                             rows_done=job.done, total_rows=job.total,
                             output=job.config.output, error=job.error)

    @app.get("/experiments/{job_id}/results",
             response_model=list[ResultRowModel])
    def experiment_results(job_id: str) -> list[ResultRowModel]:
        job = _get_job(job_id)
        with job.lock:
            if job.status == "running":
                raise HTTPException(status_code=409,
                                    detail="job still running")
            if job.status == "failed":
                raise HTTPException(status_code=409,
                                    detail=f"job failed: {job.error}")
            return [ResultRowModel.from_row(r) for r in job.rows]

    return app


app = create_app()
