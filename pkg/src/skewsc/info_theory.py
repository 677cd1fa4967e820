"""Weighted conditional mutual information, in bits, and its skew average."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .network import Dataset, pack_configs
from .skewing import WeightVector, _as_weights

MAX_CONDITIONING_VARS = 6


@dataclass(frozen=True)
class CmiQuery:
    """I(x ; y | z) between two variables given a (possibly empty) set."""

    x: int
    y: int
    z: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(sorted(self.z)))
        if self.x == self.y:
            raise ValueError("x and y must differ")
        if self.x in self.z or self.y in self.z:
            raise ValueError("x and y must not appear in the conditioning set")
        if len(set(self.z)) != len(self.z):
            raise ValueError("duplicate variables in conditioning set")
        if len(self.z) > MAX_CONDITIONING_VARS:
            raise ValueError(
                f"conditioning sets larger than {MAX_CONDITIONING_VARS} are not supported"
            )


def joint_cell_weights(data: Dataset, query: CmiQuery, weights) -> np.ndarray:
    """Weighted mass per (z-config, x, y) cell, shape (2^|z|, 2, 2).

    The z configuration is packed with the shared ascending-variable, most
    significant-bit-first convention.
    """
    w = _as_weights(weights)
    if w.shape[0] != data.m:
        raise ValueError("weight vector length does not match the dataset")
    if query.z:
        idx = pack_configs(data.values, query.z)
    else:
        idx = np.zeros(data.m, dtype=np.int64)
    size = 2 ** len(query.z)
    cell = (idx << 2) | (data.values[:, query.x].astype(np.int64) << 1) \
        | data.values[:, query.y]
    counts = np.bincount(cell, weights=w, minlength=4 * size)
    return counts.reshape(size, 2, 2)


def _cmi_from_cells(cells: np.ndarray) -> float:
    """Raw (unclamped) CMI in bits from a (Cz, 2, 2) weighted count table.

    Cells with zero mass contribute nothing, which also skips zero-mass
    z-configurations entirely. The log ratio is computed from count products
    so that exactly factorizing tables give exactly zero.
    """
    total = cells.sum()
    if total <= 0.0:
        raise ValueError("total weight must be positive")
    nz = cells.sum(axis=(1, 2), keepdims=True)
    nxz = cells.sum(axis=2, keepdims=True)
    nyz = cells.sum(axis=1, keepdims=True)
    # where a cell is empty the ratio stays 1, so its log term vanishes along
    # with the cell's zero share of the mass
    ratio = np.ones_like(cells)
    np.divide(cells * nz, nxz * nyz, out=ratio, where=cells > 0.0)
    return float(((cells / total) * np.log2(ratio)).sum())


def conditional_mutual_information(data: Dataset, query: CmiQuery, weights) -> float:
    """Weighted I(x ; y | z) in bits; tiny negative rounding is clamped to 0."""
    raw = _cmi_from_cells(joint_cell_weights(data, query, weights))
    return raw if raw > 0.0 else 0.0


def skewed_cmi(data: Dataset, query: CmiQuery, weight_vectors) -> float:
    """Mean CMI over a stack of weight vectors, the first of which must be
    the all-ones vector so the original distribution always contributes."""
    if isinstance(weight_vectors, np.ndarray) and weight_vectors.ndim == 2:
        matrix = weight_vectors
    else:
        matrix = np.stack([_as_weights(w) for w in weight_vectors])
    if matrix.shape[0] < 1:
        raise ValueError("at least one weight vector is required")
    if not np.all(matrix[0] == 1.0):
        raise ValueError("the first weight vector must be all ones")
    values = [conditional_mutual_information(data, query, matrix[t])
              for t in range(matrix.shape[0])]
    return float(np.mean(values))


__all__ = [
    "CmiQuery",
    "MAX_CONDITIONING_VARS",
    "WeightVector",
    "conditional_mutual_information",
    "joint_cell_weights",
    "skewed_cmi",
]
