"""Row reweighting that skews the empirical distribution toward random corners.

Each skew favors one random assignment: rows matching the favored value of a
variable keep factor s, mismatching rows keep factor 1-s, multiplied across
variables. Averaging statistics over several skews exposes dependencies whose
pairwise correlations cancel under the original distribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import Dataset


class UndefinedConditionalError(ValueError):
    """Conditioning event has zero weighted mass."""


@dataclass(frozen=True)
class SkewSpec:
    """Favored value per variable plus one shared preference strength."""

    favored: tuple[int, ...]
    strength: float

    def __post_init__(self):
        if any(v not in (0, 1) for v in self.favored):
            raise ValueError("favored values must be 0 or 1")
        if not (0.5 < self.strength < 1.0):
            raise ValueError("strength must lie strictly between 0.5 and 1")


@dataclass
class WeightVector:
    """One nonnegative weight per dataset row."""

    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.ndim != 1:
            raise ValueError("weights must be one-dimensional")
        if not np.all(np.isfinite(self.weights)) or np.any(self.weights < 0):
            raise ValueError("weights must be finite and nonnegative")

    @property
    def m(self) -> int:
        return self.weights.shape[0]


def make_skew(n: int, rng: np.random.Generator) -> SkewSpec:
    """Draw favored values uniformly and one strength from U(0.5, 1)."""
    favored = tuple(int(b) for b in rng.integers(0, 2, size=n))
    strength = float(rng.uniform(0.5, 1.0))
    return SkewSpec(favored, strength)


def compute_weights(data: Dataset, skew: SkewSpec, normalize: bool = True) -> WeightVector:
    """Per-row product of s (variable matches its favored value) or 1-s.

    With normalize=True (the default) the weights are rescaled to sum to the
    row count m, which keeps weighted counts on the same scale as the
    unweighted data regardless of how many variables the skew touches.
    """
    if len(skew.favored) != data.n:
        raise ValueError("skew covers a different number of variables than the data")
    favored = np.array(skew.favored, dtype=np.uint8)
    matches = (data.values == favored).sum(axis=1)
    s = skew.strength
    w = (s ** matches) * ((1.0 - s) ** (data.n - matches))
    if normalize:
        w = w * (data.m / w.sum())
    return WeightVector(w)


def all_ones_weights(m: int) -> WeightVector:
    return WeightVector(np.ones(m, dtype=np.float64))


def draw_weight_matrix(data: Dataset, count: int, rng: np.random.Generator,
                       normalize: bool = True) -> np.ndarray:
    """Stack of `count` weight rows: the first is all ones, the rest skews."""
    if count < 1:
        raise ValueError("count must be at least 1")
    rows = np.ones((count, data.m), dtype=np.float64)
    for t in range(1, count):
        rows[t] = compute_weights(data, make_skew(data.n, rng), normalize).weights
    return rows


def _as_weights(weights) -> np.ndarray:
    if isinstance(weights, WeightVector):
        return weights.weights
    return np.asarray(weights, dtype=np.float64)


def weighted_probability(data: Dataset, weights, event: dict[int, int],
                         given: dict[int, int] | None = None) -> float:
    """Weighted relative frequency of `event`, optionally conditioned on `given`.

    Raises UndefinedConditionalError when the conditioning event carries no
    weighted mass.
    """
    w = _as_weights(weights)
    if w.shape[0] != data.m:
        raise ValueError("weight vector length does not match the dataset")
    if not event:
        raise ValueError("event must constrain at least one variable")
    overlap = set(event) & set(given or {})
    if overlap:
        raise ValueError(f"variables {sorted(overlap)} appear in both event and given")

    mask = np.ones(data.m, dtype=bool)
    if given:
        for var, val in given.items():
            mask &= data.values[:, var] == val
    denom = float(w[mask].sum())
    if denom <= 0.0:
        raise UndefinedConditionalError(
            f"conditioning event {given!r} has zero weighted mass"
        )
    for var, val in event.items():
        mask &= data.values[:, var] == val
    return float(w[mask].sum()) / denom
