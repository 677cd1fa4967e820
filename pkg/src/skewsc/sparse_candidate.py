"""Sparse-candidate structure search, standard and skew-averaged.

The restrict phase caps each variable's potential parents at k candidates
chosen by (skew-averaged) conditional mutual information given the current
parents. The search phase greedily applies the arc change with the best
(skew-averaged) score gain among adds, removes and reverses that respect
the candidate sets. The skewed learner alternates the two with fresh skews
per phase while the fit of the structure to the unweighted data keeps
improving, then hands the structure to the standard learner for refinement.

The outer loop of the skewed learner deliberately tracks plain fit (the
log-likelihood of the refit network on the training data) rather than the
penalized search score. Arcs recovered from a hidden relationship arrive
one at a time, and a partial parent set often adds nothing measurable to
the penalized score until the set is nearly complete; a penalized stop
would therefore end the loop before the parents can accumulate. Fit is
monotone under arc additions, so the loop survives exploratory rounds and
halts once a round stops adding structure, leaving the cleanup of
unsupported arcs to the refinement pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .info_theory import MAX_CONDITIONING_VARS
from .network import (
    BayesNet,
    Dag,
    Dataset,
    fit_cpts,
    log_likelihood,
    pack_configs,
    topological_order,
)
from .scoring import ScoreConfig, WeightedScorer
from .skewing import draw_weight_matrix

SCORE_EPSILON = 1e-9


@dataclass(frozen=True)
class Action:
    """One arc change; reverse turns parent->child into child->parent."""

    kind: str
    parent: int
    child: int

    def __post_init__(self):
        if self.kind not in ("add", "remove", "reverse"):
            raise ValueError(f"unknown action kind {self.kind!r}")
        if self.parent == self.child:
            raise ValueError("actions must touch two distinct variables")


@dataclass
class CandidateSets:
    """Per-variable parent candidates, each of size at most k."""

    sets: list[tuple[int, ...]]
    k: int

    def __post_init__(self):
        self.sets = [tuple(sorted(s)) for s in self.sets]
        for i, s in enumerate(self.sets):
            if i in s:
                raise ValueError(f"variable {i} cannot be its own candidate")
            if len(set(s)) != len(s):
                raise ValueError(f"duplicate candidates for variable {i}")

    def validate_against(self, dag: Dag) -> None:
        for i, s in enumerate(self.sets):
            pa = dag.parents(i)
            if not set(pa) <= set(s):
                raise ValueError(f"candidates for {i} must include current parents")
            if len(pa) < self.k and len(s) > self.k:
                raise ValueError(f"candidate set for {i} exceeds k={self.k}")


@dataclass
class LearnConfig:
    """Settings shared by both learners; t1, t2 and fraction only matter
    for the skewed one."""

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
    score: ScoreConfig = field(default_factory=ScoreConfig)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.k > MAX_CONDITIONING_VARS:
            raise ValueError(f"k cannot exceed {MAX_CONDITIONING_VARS}")
        if self.t1 < 1 or self.t2 < 1:
            raise ValueError("t1 and t2 must be at least 1")
        if not (0.0 < self.fraction <= 1.0):
            raise ValueError("fraction must lie in (0, 1]")
        if self.max_outer_iterations < 1:
            raise ValueError("max_outer_iterations must be at least 1")

    def action_cap(self, n: int) -> int:
        return self.max_actions_per_phase if self.max_actions_per_phase else 10 * n


@dataclass
class SearchInfo:
    applied: list[tuple[Action, float]]
    first_gain: float | None
    stop_reason: str


@dataclass
class OuterRound:
    """One restrict+search round; original_score is measured on the
    unweighted data (penalized network score for standard runs, refit
    log-likelihood for skew rounds)."""

    actions_applied: int
    search_stop: str
    original_score: float


@dataclass
class RunReport:
    """Trajectory of an outer loop; scores use the same measure as the
    matching OuterRound entries."""

    learner: str
    rounds: list[OuterRound]
    stop_reason: str
    initial_original_score: float
    final_original_score: float
    refinement: "RunReport | None" = None


def _cmi_batch(counts: np.ndarray) -> np.ndarray:
    """Clamped CMI in bits per leading index of a (T, C, 2, 2) count stack."""
    total = counts.sum(axis=(1, 2, 3), keepdims=True)
    nz = counts.sum(axis=(2, 3), keepdims=True)
    nxz = counts.sum(axis=3, keepdims=True)
    nyz = counts.sum(axis=2, keepdims=True)
    ratio = np.ones_like(counts)
    np.divide(counts * nz, nxz * nyz, out=ratio, where=counts > 0.0)
    values = ((counts / total) * np.log2(ratio)).sum(axis=(1, 2, 3))
    return np.maximum(values, 0.0)


def _stacked_bincount(cell: np.ndarray, weights: np.ndarray, size: int) -> np.ndarray:
    """bincount of the same cells under every weight row, shape (T, size)."""
    count = weights.shape[0]
    offsets = (np.arange(count, dtype=np.int64) * size)[:, None]
    flat = (cell[None, :] + offsets).ravel()
    return np.bincount(flat, weights=weights.ravel(),
                       minlength=count * size).reshape(count, size)


def _candidate_pool(dag: Dag, i: int, layer_constraint: bool) -> list[int]:
    pa = set(dag.parents(i))
    pool = [j for j in range(dag.n) if j != i and j not in pa]
    if layer_constraint:
        layers = dag.layers
        if layers[i] != "bottom":
            return []
        pool = [j for j in pool if layers[j] == "top"]
    return pool


def restrict_phase(data: Dataset, dag: Dag, cfg: LearnConfig,
                   rng: np.random.Generator) -> CandidateSets:
    """Pick up to k candidate parents per variable by skew-averaged CMI
    given the variable's current parents; current parents always stay in."""
    if cfg.layer_constraint and dag.layers is None:
        raise ValueError("layer_constraint requires a layer-labelled graph")
    weights = draw_weight_matrix(data, cfg.t1, rng, cfg.normalize_weights)
    sets = []
    for i in range(data.n):
        pa = dag.parents(i)
        need = cfg.k - len(pa)
        pool = _candidate_pool(dag, i, cfg.layer_constraint)
        if need <= 0 or not pool:
            sets.append(pa)
            continue
        if pa:
            base = (pack_configs(data.values, pa) << 2) \
                | (data.values[:, i].astype(np.int64) << 1)
        else:
            base = data.values[:, i].astype(np.int64) << 1
        size = 2 ** (len(pa) + 2)
        scores = np.empty(len(pool))
        for col, j in enumerate(pool):
            counts = _stacked_bincount(base | data.values[:, j], weights, size)
            scores[col] = _cmi_batch(counts.reshape(weights.shape[0], -1, 2, 2)).mean()
        ranked = sorted(range(len(pool)), key=lambda c: (-scores[c], pool[c]))
        chosen = [pool[c] for c in ranked[:need]]
        sets.append(tuple(sorted(set(pa) | set(chosen))))
    return CandidateSets(sets, cfg.k)


def _reverse_would_cycle(children: list[list[int]], parent: int, child: int) -> bool:
    # after dropping parent->child, is child still reachable from parent?
    stack = [c for c in children[parent] if c != child]
    seen = set(stack)
    while stack:
        u = stack.pop()
        if u == child:
            return True
        for w in children[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def legal_actions(dag: Dag, candidates: CandidateSets,
                  layer_constraint: bool = False) -> list[Action]:
    """Every applicable action, in a fixed order: adds by (child, parent),
    then removes, then reverses, each over arcs sorted by (child, parent)."""
    if layer_constraint and dag.layers is None:
        raise ValueError("layer_constraint requires a layer-labelled graph")
    n = dag.n
    children: list[list[int]] = [[] for _ in range(n)]
    for p, c in dag.arcs():
        children[p].append(c)

    def layer_ok(p: int, c: int) -> bool:
        if not layer_constraint:
            return True
        return dag.layers[p] == "top" and dag.layers[c] == "bottom"

    # descendants as bitmasks, built leaves-first
    reach = [0] * n
    for v in reversed(topological_order(dag)):
        mask = 0
        for c in children[v]:
            mask |= (1 << c) | reach[c]
        reach[v] = mask

    actions = []
    for child in range(n):
        pa = set(dag.parents(child))
        for parent in candidates.sets[child]:
            if parent in pa:
                continue
            if (reach[child] >> parent) & 1:
                continue
            if not layer_ok(parent, child):
                continue
            actions.append(Action("add", parent, child))
    arcs = dag.arcs()
    for parent, child in arcs:
        actions.append(Action("remove", parent, child))
    for parent, child in arcs:
        # the reversed arc makes `child` a parent of `parent`
        if child not in candidates.sets[parent]:
            continue
        if not layer_ok(child, parent):
            continue
        if _reverse_would_cycle(children, parent, child):
            continue
        actions.append(Action("reverse", parent, child))
    return actions


def apply_action(dag: Dag, action: Action) -> None:
    if action.kind == "add":
        dag.add_arc(action.parent, action.child)
    elif action.kind == "remove":
        dag.remove_arc(action.parent, action.child)
    else:
        dag.reverse_arc(action.parent, action.child)


def greedy_search(scorer, dag: Dag, candidates: CandidateSets, cfg: LearnConfig,
                  skewed: bool) -> SearchInfo:
    """Apply best-gain actions to `dag` in place until no action helps, the
    skewed threshold rule fires, or the action cap is hit.

    In skewed mode the improvement of the first applied action sets the bar:
    once the best available gain falls below fraction times that first gain,
    the phase ends even though the gain is still positive.
    """
    cap = cfg.action_cap(dag.n)
    applied: list[tuple[Action, float]] = []
    first_gain: float | None = None
    stop = "action_cap"
    while len(applied) < cap:
        best = None
        best_gain = 0.0
        for action in legal_actions(dag, candidates, cfg.layer_constraint):
            gain = scorer.mean_action_gain(dag, action)
            if best is None or gain > best_gain:
                best, best_gain = action, gain
        if best is None or best_gain <= 0.0:
            stop = "no_improving_action"
            break
        if skewed and first_gain is not None and best_gain < cfg.fraction * first_gain:
            stop = "below_first_gain_fraction"
            break
        if first_gain is None:
            first_gain = best_gain
        apply_action(dag, best)
        applied.append((best, best_gain))
    return SearchInfo(applied, first_gain, stop)


def search_phase(data: Dataset, dag: Dag, candidates: CandidateSets,
                 cfg: LearnConfig, rng: np.random.Generator,
                 skewed: bool) -> tuple[Dag, SearchInfo]:
    """Greedy arc search under fresh weights; standard mode scores only the
    original distribution."""
    candidates.validate_against(dag)
    count = cfg.t2 if skewed else 1
    weights = draw_weight_matrix(data, count, rng, cfg.normalize_weights)
    scorer = WeightedScorer(data, weights, cfg.score)
    out = dag.copy()
    info = greedy_search(scorer, out, candidates, cfg, skewed)
    return out, info


def _initial_dag(data: Dataset, cfg: LearnConfig, initial: Dag | None,
                 layers: list[str] | None) -> Dag:
    if initial is not None:
        if initial.n != data.n:
            raise ValueError("initial graph and dataset disagree on variable count")
        return initial.copy()
    return Dag(data.n, layers=layers)


def run_standard_sc(data: Dataset, cfg: LearnConfig, initial: Dag | None = None,
                    layers: list[str] | None = None) -> tuple[BayesNet, RunReport]:
    """Sparse-candidate learning on the original distribution only.

    Alternates single-weight restrict and search until a search phase leaves
    the structure unchanged, then fits CPTs with the configured pseudocount.
    """
    flat = replace(cfg, t1=1, t2=1)
    rng = np.random.default_rng(cfg.seed)
    dag = _initial_dag(data, cfg, initial, layers)
    scorer = WeightedScorer(data, np.ones((1, data.m)), cfg.score)
    start = scorer.mean_dag_score(dag)
    rounds = []
    stop = "max_outer_iterations"
    for _ in range(cfg.max_outer_iterations):
        candidates = restrict_phase(data, dag, flat, rng)
        dag, info = search_phase(data, dag, candidates, flat, rng, skewed=False)
        rounds.append(OuterRound(len(info.applied), info.stop_reason,
                                 scorer.mean_dag_score(dag)))
        if not info.applied:
            stop = "no_structural_change"
            break
    report = RunReport("standard", rounds, stop, start,
                       rounds[-1].original_score if rounds else start)
    return fit_cpts(dag, data, cfg.fit_pseudocount), report


def _refit_log_likelihood(dag: Dag, data: Dataset, pseudocount: float) -> float:
    """Fit of a structure to the unweighted data, via smoothed CPTs."""
    return log_likelihood(fit_cpts(dag, data, pseudocount), data)


def run_skewed_sc(data: Dataset, cfg: LearnConfig, initial: Dag | None = None,
                  layers: list[str] | None = None) -> tuple[BayesNet, RunReport]:
    """Skew-averaged sparse-candidate learning with standard refinement.

    Fresh skews are drawn for every restrict and search phase. After each
    round the structure is refit and its log-likelihood on the unweighted
    data is compared with the previous round's; the outer loop ends once
    that fit stops improving or a phase changes nothing. The resulting
    structure seeds a standard run whose output is returned.
    """
    rng = np.random.default_rng(cfg.seed)
    dag = _initial_dag(data, cfg, initial, layers)
    previous = _refit_log_likelihood(dag, data, cfg.fit_pseudocount)
    start = previous
    rounds = []
    stop = "max_outer_iterations"
    for _ in range(cfg.max_outer_iterations):
        candidates = restrict_phase(data, dag, cfg, rng)
        dag, info = search_phase(data, dag, candidates, cfg, rng, skewed=True)
        fit = _refit_log_likelihood(dag, data, cfg.fit_pseudocount)
        rounds.append(OuterRound(len(info.applied), info.stop_reason, fit))
        if not info.applied:
            stop = "no_structural_change"
            break
        if fit <= previous + SCORE_EPSILON:
            stop = "original_score_not_improved"
            break
        previous = fit
    net, refinement = run_standard_sc(data, cfg, initial=dag)
    report = RunReport("skewed", rounds, stop, start,
                       refinement.final_original_score, refinement=refinement)
    return net, report
