"""Boolean Bayesian networks: datasets, DAGs, CPTs, sampling and likelihood."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np


class CycleError(ValueError):
    """Raised when an arc set is not acyclic; the message names one offending arc."""


class DataFormatError(ValueError):
    """Raised on malformed dataset files; the message carries a 1-based line number."""


class ZeroProbabilityError(ValueError):
    """Raised when observed data has probability zero under a network."""


def pack_configs(values: np.ndarray, variables: tuple[int, ...] | list[int]) -> np.ndarray:
    """Encode each row's assignment to `variables` as an integer config index.

    Variables are taken in ascending index order and the smallest index
    becomes the most significant bit. All parent-configuration indexing in
    this package (CPT rows, family counts, conditioning sets) goes through
    this one function so the bit convention cannot drift.
    """
    order = sorted(variables)
    idx = np.zeros(values.shape[0], dtype=np.int64)
    for v in order:
        idx = (idx << 1) | values[:, v]
    return idx


@dataclass
class Dataset:
    """Complete Boolean data: one column per variable, values 0/1."""

    names: list[str]
    values: np.ndarray  # shape (m, n), dtype uint8

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.uint8)
        if self.values.ndim != 2:
            raise ValueError("dataset values must be a 2-d array")
        if self.values.shape[1] != len(self.names):
            raise ValueError(
                f"{len(self.names)} names but {self.values.shape[1]} columns"
            )
        if self.values.size and self.values.max() > 1:
            raise ValueError("dataset values must be 0 or 1")

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.names)
            for row in self.values:
                writer.writerow(int(v) for v in row)

    @classmethod
    def from_csv(cls, path) -> "Dataset":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                names = next(reader)
            except StopIteration:
                raise DataFormatError("line 1: empty file, expected a header row")
            names = [s.strip() for s in names]
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if not row or (len(row) == 1 and not row[0].strip()):
                    continue
                if len(row) != len(names):
                    raise DataFormatError(
                        f"line {lineno}: expected {len(names)} fields, got {len(row)}"
                    )
                try:
                    parsed = [int(tok) for tok in row]
                except ValueError:
                    raise DataFormatError(
                        f"line {lineno}: fields must be 0 or 1, got {row!r}"
                    )
                if any(v not in (0, 1) for v in parsed):
                    raise DataFormatError(
                        f"line {lineno}: fields must be 0 or 1, got {row!r}"
                    )
                rows.append(parsed)
        values = np.array(rows, dtype=np.uint8) if rows else np.zeros((0, len(names)), np.uint8)
        return cls(names, values)


class Dag:
    """Directed acyclic graph over variables 0..n-1, optionally layer labelled.

    Parents are kept sorted ascending. Every mutation re-checks acyclicity
    and raises CycleError (naming an arc on the cycle) instead of applying
    an illegal change.
    """

    def __init__(self, n: int, parents: dict[int, list[int]] | None = None,
                 layers: list[str] | None = None):
        if n < 0:
            raise ValueError("n must be nonnegative")
        self.n = n
        self._parents: list[list[int]] = [[] for _ in range(n)]
        if layers is not None:
            if len(layers) != n:
                raise ValueError("layers must have one label per variable")
            bad = set(layers) - {"top", "bottom"}
            if bad:
                raise ValueError(f"unknown layer labels: {sorted(bad)}")
        self.layers = list(layers) if layers is not None else None
        if parents:
            for child, ps in parents.items():
                self._validate_var(child)
                for p in ps:
                    self._validate_var(p)
                    if p == child:
                        raise CycleError(f"self-loop {p}->{child}")
                if len(set(ps)) != len(ps):
                    raise ValueError(f"duplicate parents for variable {child}")
                self._parents[child] = sorted(ps)
            topological_order(self)  # raises CycleError on a cycle

    def _validate_var(self, v: int) -> None:
        if not (0 <= v < self.n):
            raise ValueError(f"variable index {v} out of range for n={self.n}")

    def parents(self, v: int) -> tuple[int, ...]:
        return tuple(self._parents[v])

    def children(self, v: int) -> list[int]:
        return [c for c in range(self.n) if v in self._parents[c]]

    def arcs(self) -> list[tuple[int, int]]:
        """All arcs as (parent, child), sorted by (child, parent)."""
        return [(p, c) for c in range(self.n) for p in self._parents[c]]

    def has_arc(self, parent: int, child: int) -> bool:
        return parent in self._parents[child]

    def arc_count(self) -> int:
        return sum(len(ps) for ps in self._parents)

    def would_cycle(self, parent: int, child: int) -> bool:
        """True if adding parent->child would close a directed cycle."""
        if parent == child:
            return True
        # a cycle appears exactly when parent is already reachable from child
        seen = {child}
        stack = [child]
        while stack:
            u = stack.pop()
            for c in range(self.n):
                if u in self._parents[c] and c not in seen:
                    if c == parent:
                        return True
                    seen.add(c)
                    stack.append(c)
        return False

    def add_arc(self, parent: int, child: int) -> None:
        self._validate_var(parent)
        self._validate_var(child)
        if self.has_arc(parent, child):
            raise ValueError(f"arc {parent}->{child} already present")
        if self.would_cycle(parent, child):
            raise CycleError(f"adding {parent}->{child} creates a cycle")
        self._parents[child] = sorted(self._parents[child] + [parent])

    def remove_arc(self, parent: int, child: int) -> None:
        if not self.has_arc(parent, child):
            raise ValueError(f"arc {parent}->{child} not present")
        self._parents[child].remove(parent)

    def reverse_arc(self, parent: int, child: int) -> None:
        self.remove_arc(parent, child)
        try:
            self.add_arc(child, parent)
        except CycleError:
            self._parents[child] = sorted(self._parents[child] + [parent])
            raise CycleError(f"reversing {parent}->{child} creates a cycle")

    def copy(self) -> "Dag":
        out = Dag(self.n, layers=self.layers)
        out._parents = [list(ps) for ps in self._parents]
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Dag)
            and self.n == other.n
            and self._parents == other._parents
        )

    def __repr__(self) -> str:
        return f"Dag(n={self.n}, arcs={self.arcs()})"


def topological_order(dag: Dag) -> list[int]:
    """Kahn's algorithm; among ready variables the lowest index goes first.

    Raises CycleError naming one arc that lies on a cycle if the graph has one.
    """
    indegree = [len(dag.parents(v)) for v in range(dag.n)]
    children: list[list[int]] = [[] for _ in range(dag.n)]
    for p, c in dag.arcs():
        children[p].append(c)
    import heapq

    ready = [v for v in range(dag.n) if indegree[v] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for c in children[v]:
            indegree[c] -= 1
            if indegree[c] == 0:
                heapq.heappush(ready, c)
    if len(order) < dag.n:
        remaining = {v for v in range(dag.n)} - set(order)
        # walk parent pointers inside the leftover set; the first repeated
        # node closes a cycle and the arc into the previous node lies on it
        v = min(remaining)
        seen = set()
        prev = v
        while v not in seen:
            seen.add(v)
            prev = v
            v = next(p for p in dag.parents(v) if p in remaining)
        raise CycleError(f"graph has a cycle through arc {v}->{prev}")
    return order


@dataclass
class Cpt:
    """P(X=1) for each parent configuration, indexed via pack_configs."""

    parents: tuple[int, ...]
    table: np.ndarray  # shape (2**len(parents),), float64

    def __post_init__(self):
        self.parents = tuple(sorted(self.parents))
        self.table = np.asarray(self.table, dtype=np.float64)
        if self.table.shape != (2 ** len(self.parents),):
            raise ValueError(
                f"table length {self.table.shape} does not match "
                f"{len(self.parents)} parents"
            )
        if np.any((self.table < 0.0) | (self.table > 1.0)):
            raise ValueError("CPT entries must lie in [0, 1]")


@dataclass
class BayesNet:
    names: list[str]
    dag: Dag
    cpts: list[Cpt] = field(default_factory=list)

    def __post_init__(self):
        if len(self.names) != self.dag.n:
            raise ValueError("one name per variable required")
        if self.cpts and len(self.cpts) != self.dag.n:
            raise ValueError("one CPT per variable required")
        for v, cpt in enumerate(self.cpts):
            if cpt.parents != self.dag.parents(v):
                raise ValueError(
                    f"CPT parents {cpt.parents} do not match DAG parents "
                    f"{self.dag.parents(v)} for variable {v}"
                )

    @property
    def n(self) -> int:
        return self.dag.n

    def to_json(self, path=None) -> str:
        doc = {
            "variables": list(self.names),
            "parents": [[self.names[p] for p in self.dag.parents(v)]
                        for v in range(self.n)],
            "cpts": [[float(x) for x in cpt.table] for cpt in self.cpts],
        }
        if self.dag.layers is not None:
            doc["layers"] = list(self.dag.layers)
        text = json.dumps(doc, indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text

    @classmethod
    def from_json(cls, source) -> "BayesNet":
        if hasattr(source, "read"):
            doc = json.load(source)
        elif isinstance(source, str) and source.lstrip().startswith("{"):
            doc = json.loads(source)
        else:
            with open(source) as fh:
                doc = json.load(fh)
        try:
            names = list(doc["variables"])
            parent_names = doc["parents"]
            tables = doc["cpts"]
        except KeyError as missing:
            raise DataFormatError(f"network JSON missing key {missing}")
        index = {name: i for i, name in enumerate(names)}
        if len(index) != len(names):
            raise DataFormatError("duplicate variable names in network JSON")
        parents = {}
        for v, plist in enumerate(parent_names):
            try:
                parents[v] = [index[p] for p in plist]
            except KeyError as unknown:
                raise DataFormatError(f"unknown parent name {unknown}")
        dag = Dag(len(names), parents, layers=doc.get("layers"))
        cpts = [Cpt(dag.parents(v), np.array(tables[v], dtype=np.float64))
                for v in range(len(names))]
        return cls(names, dag, cpts)


def forward_sample(net: BayesNet, m: int, rng: np.random.Generator) -> Dataset:
    """Draw m complete rows by sampling variables in topological order."""
    if not net.cpts:
        raise ValueError("network has no CPTs to sample from")
    values = np.zeros((m, net.n), dtype=np.uint8)
    for v in topological_order(net.dag):
        cpt = net.cpts[v]
        if cpt.parents:
            idx = pack_configs(values, cpt.parents)
            p = cpt.table[idx]
        else:
            p = np.full(m, cpt.table[0])
        values[:, v] = rng.random(m) < p
    return Dataset(list(net.names), values)


def fit_cpts(dag: Dag, data: Dataset, pseudocount: float = 1.0) -> BayesNet:
    """Maximum a posteriori CPTs: (ones + pc) / (total + 2 pc) per parent config.

    A parent configuration never seen in the data gets probability 0.5.
    """
    if dag.n != data.n:
        raise ValueError("DAG and dataset disagree on variable count")
    if pseudocount < 0:
        raise ValueError("pseudocount must be nonnegative")
    cpts = []
    for v in range(dag.n):
        ps = dag.parents(v)
        size = 2 ** len(ps)
        if ps:
            idx = pack_configs(data.values, ps)
        else:
            idx = np.zeros(data.m, dtype=np.int64)
        total = np.bincount(idx, minlength=size).astype(np.float64)
        ones = np.bincount(idx, weights=data.values[:, v], minlength=size)
        denom = total + 2.0 * pseudocount
        table = np.where(denom > 0.0, (ones + pseudocount) / np.where(denom > 0, denom, 1.0), 0.5)
        cpts.append(Cpt(ps, table))
    return BayesNet(list(data.names), dag, cpts)


def log_likelihood(net: BayesNet, data: Dataset) -> float:
    """Sum over rows of ln P(row); raises if any row has probability zero."""
    if not net.cpts:
        raise ValueError("network has no CPTs")
    if net.n != data.n:
        raise ValueError("network and dataset disagree on variable count")
    total = 0.0
    for v in range(net.n):
        cpt = net.cpts[v]
        if cpt.parents:
            idx = pack_configs(data.values, cpt.parents)
            p1 = cpt.table[idx]
        else:
            p1 = np.full(data.m, cpt.table[0])
        pr = np.where(data.values[:, v] == 1, p1, 1.0 - p1)
        if np.any(pr <= 0.0):
            row = int(np.argmax(pr <= 0.0))
            raise ZeroProbabilityError(
                f"row {row} has probability 0 for variable {net.names[v]}; "
                "refit the CPTs with a positive pseudocount before scoring "
                "held-out data"
            )
        total += float(np.log(pr).sum())
    return total
