"""Weighted Bayesian-Dirichlet family scores with a size penalty.

Scores use natural logs. Counts may be fractional because rows carry skew
weights; the closed-form marginal likelihood is continued through the gamma
function, which agrees with the factorial form on integer counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .network import Dag, Dataset, pack_configs
from .skewing import _as_weights


@dataclass
class ScoreConfig:
    """penalty_log_half_m switches the per-family factor from ln(m)/2 to ln(m/2)."""

    penalty_enabled: bool = True
    penalty_log_half_m: bool = False


@dataclass
class FamilyCounts:
    """Weighted counts N[config, child_value] for one variable and its parents."""

    child: int
    parents: tuple[int, ...]
    counts: np.ndarray  # shape (2^|parents|, 2)


def family_counts(data: Dataset, child: int, parents, weights) -> FamilyCounts:
    parents = tuple(sorted(parents))
    if child in parents:
        raise ValueError("child cannot be its own parent")
    if len(parents) > 8:
        raise ValueError("families with more than 8 parents are not supported")
    w = _as_weights(weights)
    if parents:
        idx = pack_configs(data.values, parents)
    else:
        idx = np.zeros(data.m, dtype=np.int64)
    cell = (idx << 1) | data.values[:, child]
    counts = np.bincount(cell, weights=w, minlength=2 ** (len(parents) + 1))
    return FamilyCounts(child, parents, counts.reshape(-1, 2))


def k2_family_score(counts) -> float:
    """ln of the Dirichlet(1,1) marginal likelihood of one family's counts."""
    table = counts.counts if isinstance(counts, FamilyCounts) else np.asarray(counts, float)
    n0 = table[:, 0]
    n1 = table[:, 1]
    return float((gammaln(n0 + 1.0) + gammaln(n1 + 1.0) - gammaln(n0 + n1 + 2.0)).sum())


def penalty_unit(m: float, config: ScoreConfig) -> float:
    """Per-parent-configuration penalty factor."""
    if not config.penalty_enabled:
        return 0.0
    if config.penalty_log_half_m:
        return math.log(m / 2.0)
    return math.log(m) / 2.0


def structure_penalty(dag: Dag, m: float, config: ScoreConfig | None = None) -> float:
    """Sum over variables of 2^{parent count}, scaled by the log-m factor."""
    config = config or ScoreConfig()
    unit = penalty_unit(m, config)
    return unit * float(sum(2 ** len(dag.parents(v)) for v in range(dag.n)))


def network_score(data: Dataset, dag: Dag, weights, config: ScoreConfig | None = None) -> float:
    """Penalized log score of the whole network under one weight vector."""
    config = config or ScoreConfig()
    total = sum(
        k2_family_score(family_counts(data, v, dag.parents(v), weights))
        for v in range(dag.n)
    )
    return total - structure_penalty(dag, data.m, config)


def _action_fields(action) -> tuple[str, int, int]:
    if isinstance(action, tuple):
        kind, parent, child = action
    else:
        kind, parent, child = action.kind, action.parent, action.child
    if kind not in ("add", "remove", "reverse"):
        raise ValueError(f"unknown action kind {kind!r}")
    return kind, parent, child


class WeightedScorer:
    """Network scores under a stack of weight vectors, with family caching.

    Family score vectors are memoized by (child, parent set) and parent
    packings by parent set, so repeated candidate evaluations during search
    reduce to dictionary lookups plus arithmetic on cached vectors.
    """

    def __init__(self, data: Dataset, weight_matrix, config: ScoreConfig | None = None):
        matrix = np.atleast_2d(np.asarray(_as_weights_matrix(weight_matrix)))
        if matrix.shape[1] != data.m:
            raise ValueError("weight matrix width does not match the dataset")
        self.data = data
        self.weights = matrix
        self.count = matrix.shape[0]
        self.config = config or ScoreConfig()
        self._unit = penalty_unit(data.m, self.config)
        self._pack: dict[tuple[int, ...], np.ndarray] = {}
        self._family: dict[tuple, np.ndarray] = {}

    def _packed(self, parents: tuple[int, ...]) -> np.ndarray:
        got = self._pack.get(parents)
        if got is None:
            if parents:
                got = pack_configs(self.data.values, parents)
            else:
                got = np.zeros(self.data.m, dtype=np.int64)
            self._pack[parents] = got
        return got

    def family_score_vector(self, child: int, parents) -> np.ndarray:
        """K2 score of one family under every weight vector, shape (count,)."""
        parents = tuple(sorted(parents))
        key = (child, parents)
        got = self._family.get(key)
        if got is None:
            cell = (self._packed(parents) << 1) | self.data.values[:, child]
            size = 2 ** (len(parents) + 1)
            counts = np.empty((self.count, size))
            for t in range(self.count):
                counts[t] = np.bincount(cell, weights=self.weights[t], minlength=size)
            counts = counts.reshape(self.count, -1, 2)
            n0 = counts[:, :, 0]
            n1 = counts[:, :, 1]
            got = (gammaln(n0 + 1.0) + gammaln(n1 + 1.0)
                   - gammaln(n0 + n1 + 2.0)).sum(axis=1)
            self._family[key] = got
        return got

    def penalty(self, parent_count: int) -> float:
        return self._unit * (2 ** parent_count)

    def dag_score_vector(self, dag: Dag) -> np.ndarray:
        total = np.zeros(self.count)
        pen = 0.0
        for v in range(dag.n):
            ps = dag.parents(v)
            total = total + self.family_score_vector(v, ps)
            pen += self.penalty(len(ps))
        return total - pen

    def mean_dag_score(self, dag: Dag) -> float:
        return float(self.dag_score_vector(dag).mean())

    def action_delta_vector(self, dag: Dag, action) -> np.ndarray:
        """Per-weight-vector score change of applying one structure action."""
        kind, parent, child = _action_fields(action)
        old_c = dag.parents(child)
        if kind == "add":
            new_c = tuple(sorted(old_c + (parent,)))
            delta = self.family_score_vector(child, new_c) \
                - self.family_score_vector(child, old_c)
            pen = self.penalty(len(new_c)) - self.penalty(len(old_c))
        elif kind == "remove":
            new_c = tuple(p for p in old_c if p != parent)
            delta = self.family_score_vector(child, new_c) \
                - self.family_score_vector(child, old_c)
            pen = self.penalty(len(new_c)) - self.penalty(len(old_c))
        else:  # reverse: child loses `parent`, `parent` gains `child`
            new_c = tuple(p for p in old_c if p != parent)
            old_p = dag.parents(parent)
            new_p = tuple(sorted(old_p + (child,)))
            delta = (
                self.family_score_vector(child, new_c)
                - self.family_score_vector(child, old_c)
                + self.family_score_vector(parent, new_p)
                - self.family_score_vector(parent, old_p)
            )
            pen = (self.penalty(len(new_c)) - self.penalty(len(old_c))
                   + self.penalty(len(new_p)) - self.penalty(len(old_p)))
        return delta - pen

    def mean_action_gain(self, dag: Dag, action) -> float:
        return float(self.action_delta_vector(dag, action).mean())


def _as_weights_matrix(weights) -> np.ndarray:
    if isinstance(weights, np.ndarray):
        return weights
    if hasattr(weights, "weights"):
        return weights.weights
    try:
        return np.stack([_as_weights(w) for w in weights])
    except TypeError:
        return np.asarray(weights, dtype=np.float64)


def skew_averaged_action_score(data: Dataset, dag: Dag, action, weight_matrix,
                               config: ScoreConfig | None = None) -> float:
    """Mean over weight vectors of the network score after applying `action`."""
    scorer = WeightedScorer(data, weight_matrix, config)
    post = scorer.dag_score_vector(dag) + scorer.action_delta_vector(dag, action)
    return float(post.mean())
