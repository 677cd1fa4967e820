"""Structure quality scored through Markov blankets, so arc orientation
differences that leave the dependence structure intact are not punished."""

from __future__ import annotations

from .network import Dag


def markov_blanket(dag: Dag, v: int) -> set[int]:
    """Parents, children, and the children's other parents of v."""
    blanket = set(dag.parents(v))
    for child in dag.children(v):
        blanket.add(child)
        blanket.update(dag.parents(child))
    blanket.discard(v)
    return blanket


def _blanket_pairs(dag: Dag) -> set[tuple[int, int]]:
    pairs = set()
    for v in range(dag.n):
        for member in markov_blanket(dag, v):
            pairs.add((v, member))
    return pairs


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def mb_scores(true_dag: Dag, learned_dag: Dag, average: str = "micro") -> dict[str, float]:
    """Precision, recall and F1 of learned Markov blanket membership.

    "micro" pools the ordered (variable, member) pairs of all blankets into
    one contingency count. "macro" averages per-variable F1 instead. A graph
    with no blanket pairs scores 0 against a nonempty truth and 1 against an
    empty one.
    """
    if true_dag.n != learned_dag.n:
        raise ValueError("graphs must share the variable count")
    if average not in ("micro", "macro"):
        raise ValueError(f"unknown average {average!r}")
    if average == "micro":
        true_pairs = _blanket_pairs(true_dag)
        learned_pairs = _blanket_pairs(learned_dag)
        tp = len(true_pairs & learned_pairs)
        precision = tp / len(learned_pairs) if learned_pairs else (
            1.0 if not true_pairs else 0.0)
        recall = tp / len(true_pairs) if true_pairs else (
            1.0 if not learned_pairs else 0.0)
        return {
            "precision": precision,
            "recall": recall,
            "f1": f1_score(precision, recall),
        }
    precisions, recalls, f1s = [], [], []
    for v in range(true_dag.n):
        t = markov_blanket(true_dag, v)
        l = markov_blanket(learned_dag, v)
        tp = len(t & l)
        precision = tp / len(l) if l else (1.0 if not t else 0.0)
        recall = tp / len(t) if t else (1.0 if not l else 0.0)
        precisions.append(precision)
        recalls.append(recall)
        f1s.append(f1_score(precision, recall))
    count = max(true_dag.n, 1)
    return {
        "precision": sum(precisions) / count,
        "recall": sum(recalls) / count,
        "f1": sum(f1s) / count,
    }


def blanket_recall(true_dag: Dag, learned_dag: Dag, v: int) -> float:
    """Share of v's true blanket present in the learned blanket; 1 if empty."""
    t = markov_blanket(true_dag, v)
    if not t:
        return 1.0
    return len(t & markov_blanket(learned_dag, v)) / len(t)
