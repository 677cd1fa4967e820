"""Synthetic Boolean networks built around hard-to-see function patterns."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .network import BayesNet, Cpt, Dag

FUNCTION_KINDS = ("parity", "consensus", "random")
MAX_FUNCTION_ARITY = 5


@dataclass(frozen=True)
class BoolFunction:
    """Truth table of a Boolean function; the first input is the high bit."""

    arity: int
    table: tuple[int, ...]

    def __post_init__(self):
        if not (1 <= self.arity <= MAX_FUNCTION_ARITY):
            raise ValueError(f"arity must be between 1 and {MAX_FUNCTION_ARITY}")
        if len(self.table) != 2 ** self.arity:
            raise ValueError("table length must be 2^arity")
        if any(v not in (0, 1) for v in self.table):
            raise ValueError("table entries must be 0 or 1")

    def value(self, bits) -> int:
        idx = 0
        for b in bits:
            idx = (idx << 1) | int(b)
        return self.table[idx]


def make_function(kind: str, arity: int, rng: np.random.Generator) -> BoolFunction:
    """parity and consensus are fixed tables; random re-draws constants."""
    if kind == "parity":
        table = tuple(bin(i).count("1") % 2 for i in range(2 ** arity))
    elif kind == "consensus":
        table = tuple(
            1 if i in (0, 2 ** arity - 1) else 0 for i in range(2 ** arity)
        )
    elif kind == "random":
        while True:
            table = tuple(int(b) for b in rng.integers(0, 2, size=2 ** arity))
            if 0 < sum(table) < len(table):
                break
    else:
        raise ValueError(f"unknown function kind {kind!r}; expected one of {FUNCTION_KINDS}")
    return BoolFunction(arity, table)


def ci_order(fn: BoolFunction) -> int:
    """Largest c such that the output is independent of every c-subset of
    inputs under uniform inputs; 0 means some single input already leaks."""
    configs = list(itertools.product((0, 1), repeat=fn.arity))
    outputs = [fn.value(bits) for bits in configs]
    total = len(configs)
    ones_total = sum(outputs)

    def independent(subset) -> bool:
        cells: dict[tuple, list[int]] = {}
        for bits, out in zip(configs, outputs):
            key = tuple(bits[i] for i in subset)
            cells.setdefault(key, []).append(out)
        # integer-exact: N(v, f=1) * total == N(v) * N(f=1) for every value v
        for group in cells.values():
            if sum(group) * total != len(group) * ones_total:
                return False
        return True

    order = 0
    for c in range(1, fn.arity + 1):
        if all(independent(s) for s in itertools.combinations(range(fn.arity), c)):
            order = c
        else:
            break
    return order


@dataclass
class GeneratorSpec:
    """Settings for the two synthetic families.

    family "hub": n variables, the first parent_count are fair coins feeding
    one child through a function CPT with the given fidelity; the remaining
    variables are independent with random priors.

    family "qmr": top_count root causes over bottom_count effect variables,
    each effect wired to 2 or 3 roots; a ci_fraction share of effects get a
    deterministic parity CPT, the rest random non-immune functions. Root
    priors come from top_prior_range. The default collapses that range to
    fair coins: a biased cause shifts the conditional frequency of a parity
    effect given any one of its other causes, so uneven priors would leak
    the supposedly hidden relationships into plain pairwise counts.
    """

    family: str
    n: int = 30
    parent_count: int = 5
    function_kind: str = "parity"
    fidelity: float = 1.0
    top_count: int = 20
    bottom_count: int = 20
    ci_fraction: float = 1.0
    top_prior_range: tuple[float, float] = (0.5, 0.5)

    def __post_init__(self):
        if self.family not in ("hub", "qmr"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "hub":
            if not (1 <= self.parent_count <= MAX_FUNCTION_ARITY):
                raise ValueError("parent_count must be between 1 and 5")
            if self.n < self.parent_count + 1:
                raise ValueError("hub needs at least parent_count + 1 variables")
            if self.function_kind not in FUNCTION_KINDS:
                raise ValueError(f"unknown function kind {self.function_kind!r}")
            if not (0.5 < self.fidelity <= 1.0):
                raise ValueError("fidelity must lie in (0.5, 1]")
        else:
            if self.top_count < 3 or self.bottom_count < 1:
                raise ValueError("qmr needs at least 3 top and 1 bottom variable")
            if not (0.0 <= self.ci_fraction <= 1.0):
                raise ValueError("ci_fraction must lie in [0, 1]")
            low, high = self.top_prior_range
            if not (0.0 < low <= high < 1.0):
                raise ValueError("top_prior_range must satisfy 0 < low <= high < 1")

    @property
    def hub_child(self) -> int:
        if self.family != "hub":
            raise ValueError("hub_child only applies to the hub family")
        return self.parent_count


def gen_hub(spec: GeneratorSpec, rng: np.random.Generator) -> BayesNet:
    """One function-driven child over fair-coin parents, plus loose roots.

    Variables 0..parent_count-1 are the parents, variable parent_count is the
    child, and everything after is an independent distractor with a prior
    drawn from U(0.1, 0.9). The child's CPT row for a parent configuration u
    is fidelity when f(u) = 1 and 1 - fidelity otherwise.
    """
    if spec.family != "hub":
        raise ValueError("spec is not a hub spec")
    fn = make_function(spec.function_kind, spec.parent_count, rng)
    child = spec.hub_child
    parents = {child: list(range(spec.parent_count))}
    dag = Dag(spec.n, parents)
    cpts = []
    for v in range(spec.n):
        if v < spec.parent_count:
            cpts.append(Cpt((), np.array([0.5])))
        elif v == child:
            table = np.where(np.array(fn.table) == 1, spec.fidelity, 1.0 - spec.fidelity)
            cpts.append(Cpt(tuple(range(spec.parent_count)), table))
        else:
            cpts.append(Cpt((), np.array([float(rng.uniform(0.1, 0.9))])))
    names = [f"x{i}" for i in range(spec.n)]
    return BayesNet(names, dag, cpts)


def gen_qmr(spec: GeneratorSpec, rng: np.random.Generator) -> BayesNet:
    """Two-layer network: independent top causes, function-driven bottoms.

    Top priors are drawn uniformly from spec.top_prior_range, fair coins by
    default. Every bottom variable picks 2 or 3 distinct top parents
    uniformly. With probability ci_fraction it computes exact parity of its
    parents; otherwise a random function that is not correlation immune
    (re-drawn until ci_order is 0). Layer labels are attached to the graph.
    """
    if spec.family != "qmr":
        raise ValueError("spec is not a qmr spec")
    n = spec.top_count + spec.bottom_count
    layers = ["top"] * spec.top_count + ["bottom"] * spec.bottom_count
    parents: dict[int, list[int]] = {}
    functions: dict[int, BoolFunction] = {}
    for b in range(spec.bottom_count):
        v = spec.top_count + b
        count = int(rng.choice([2, 3]))
        chosen = sorted(int(p) for p in rng.choice(spec.top_count, size=count,
                                                   replace=False))
        parents[v] = chosen
        if rng.random() < spec.ci_fraction:
            functions[v] = make_function("parity", count, rng)
        else:
            while True:
                fn = make_function("random", count, rng)
                if ci_order(fn) == 0:
                    break
            functions[v] = fn
    dag = Dag(n, parents, layers=layers)
    cpts = []
    for v in range(n):
        if v < spec.top_count:
            low, high = spec.top_prior_range
            cpts.append(Cpt((), np.array([float(rng.uniform(low, high))])))
        else:
            fn = functions[v]
            cpts.append(Cpt(tuple(parents[v]), np.array(fn.table, dtype=np.float64)))
    names = [f"d{i}" for i in range(spec.top_count)] + \
        [f"s{i}" for i in range(spec.bottom_count)]
    return BayesNet(names, dag, cpts)


def generate(spec: GeneratorSpec, rng: np.random.Generator) -> BayesNet:
    return gen_hub(spec, rng) if spec.family == "hub" else gen_qmr(spec, rng)


def function_from_cpt(cpt: Cpt) -> BoolFunction | None:
    """Recover the underlying Boolean function of a function-driven CPT.

    Rows above one half are read as 1. Returns None for parentless tables
    and for tables with a row exactly at one half, which carry no function.
    """
    if not cpt.parents:
        return None
    if np.any(cpt.table == 0.5):
        return None
    table = tuple(int(p > 0.5) for p in cpt.table)
    return BoolFunction(len(cpt.parents), table)
