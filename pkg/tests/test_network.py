import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewsc.network import (
    BayesNet,
    Cpt,
    CycleError,
    Dag,
    DataFormatError,
    Dataset,
    ZeroProbabilityError,
    fit_cpts,
    forward_sample,
    log_likelihood,
    pack_configs,
    topological_order,
)


def net_from_tables(tables):
    """Build a BayesNet from {var: (parents, [p1 per config])}."""
    n = len(tables)
    dag = Dag(n, {v: list(ps) for v, (ps, _) in tables.items()})
    cpts = [Cpt(tuple(tables[v][0]), np.array(tables[v][1])) for v in range(n)]
    return BayesNet([f"x{i}" for i in range(n)], dag, cpts)


def joint_probability(net, assignment):
    """Chain-rule joint probability of one complete assignment, by hand."""
    p = 1.0
    for v in range(net.n):
        cpt = net.cpts[v]
        idx = 0
        for parent in sorted(cpt.parents):
            idx = (idx << 1) | assignment[parent]
        p1 = cpt.table[idx]
        p *= p1 if assignment[v] == 1 else 1.0 - p1
    return p


# ---------------------------------------------------------------- ordering


def test_topological_order_no_arcs_is_ascending():
    assert topological_order(Dag(3)) == [0, 1, 2]


def test_topological_order_chain():
    dag = Dag(3, {1: [0], 2: [1]})
    assert topological_order(dag) == [0, 1, 2]


def test_topological_order_tie_breaks_ascending():
    # both 1 and 2 are ready before 0; lowest index first
    dag = Dag(3, {0: [1, 2]})
    assert topological_order(dag) == [1, 2, 0]


def test_cycle_rejected_at_construction_naming_an_arc():
    with pytest.raises(CycleError) as err:
        Dag(3, {0: [1], 1: [2], 2: [0]})
    msg = str(err.value)
    assert "->" in msg
    a, b = msg.split("arc ")[1].split("->")
    pair = (int(a), int(b.strip()))
    assert pair in {(1, 0), (2, 1), (0, 2)}


def test_add_arc_refuses_cycle_and_leaves_graph_unchanged():
    dag = Dag(2, {1: [0]})
    with pytest.raises(CycleError):
        dag.add_arc(1, 0)
    assert dag.arcs() == [(0, 1)]


def test_reverse_arc_refuses_cycle_and_restores_graph():
    # reversing 0->2 would add 2->0 while the path 0->1->2 still stands
    dag = Dag(3, {1: [0], 2: [0, 1]})
    with pytest.raises(CycleError):
        dag.reverse_arc(0, 2)
    assert dag.arcs() == [(0, 1), (0, 2), (1, 2)]


@st.composite
def random_dags(draw):
    n = draw(st.integers(min_value=1, max_value=8))
    perm = draw(st.permutations(range(n)))
    arcs = []
    for i in range(n):
        for j in range(i + 1, n):
            if draw(st.booleans()):
                arcs.append((perm[i], perm[j]))
    return n, arcs


@given(random_dags())
@settings(max_examples=60, deadline=None)
def test_any_arc_set_built_along_an_order_is_accepted(case):
    n, arcs = case
    dag = Dag(n)
    for p, c in arcs:
        dag.add_arc(p, c)
    order = topological_order(dag)
    pos = {v: i for i, v in enumerate(order)}
    for p, c in dag.arcs():
        assert pos[p] < pos[c]


@given(random_dags(), st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
def test_mutations_never_produce_a_cycle(case, rnd):
    n, arcs = case
    dag = Dag(n)
    for p, c in arcs:
        dag.add_arc(p, c)
    for _ in range(20):
        u = rnd.randrange(n)
        v = rnd.randrange(n)
        op = rnd.choice(["add", "remove", "reverse"])
        try:
            if op == "add" and u != v and not dag.has_arc(u, v):
                dag.add_arc(u, v)
            elif op == "remove" and dag.has_arc(u, v):
                dag.remove_arc(u, v)
            elif op == "reverse" and dag.has_arc(u, v):
                dag.reverse_arc(u, v)
        except CycleError:
            pass
        topological_order(dag)  # must stay acyclic after every mutation


# ---------------------------------------------------------------- packing


def test_pack_configs_smallest_variable_is_most_significant():
    values = np.array([[1, 0, 1]], dtype=np.uint8)
    # variables (0, 2): bit of var 0 is the high bit
    assert pack_configs(values, (2, 0)) == [0b11]
    assert pack_configs(values, (0, 1)) == [0b10]
    assert pack_configs(values, (1, 2)) == [0b01]


# ---------------------------------------------------------------- sampling


def test_forward_sample_matches_marginal():
    net = net_from_tables({0: ((), [0.7])})
    data = forward_sample(net, 10_000, np.random.default_rng(7))
    ones = int(data.values.sum())
    assert 6_800 <= ones <= 7_200


def test_forward_sample_is_reproducible():
    net = net_from_tables({0: ((), [0.3]), 1: ((0,), [0.9, 0.2])})
    a = forward_sample(net, 500, np.random.default_rng(11))
    b = forward_sample(net, 500, np.random.default_rng(11))
    assert np.array_equal(a.values, b.values)


def test_forward_sample_respects_parent_configs():
    # child copies its parent exactly; table index 0 is parent=0
    net = net_from_tables({0: ((), [0.5]), 1: ((0,), [0.0, 1.0])})
    data = forward_sample(net, 2000, np.random.default_rng(3))
    assert np.array_equal(data.values[:, 0], data.values[:, 1])


# ---------------------------------------------------------------- fitting


def test_fit_single_variable_no_smoothing():
    data = Dataset(["a"], np.array([[1], [1], [1], [0]]))
    net = fit_cpts(Dag(1), data, pseudocount=0.0)
    assert net.cpts[0].table[0] == pytest.approx(0.75, abs=0)


def test_fit_single_variable_pseudocount_one():
    data = Dataset(["a"], np.array([[1], [1], [1], [0]]))
    net = fit_cpts(Dag(1), data, pseudocount=1.0)
    assert net.cpts[0].table[0] == pytest.approx(4.0 / 6.0, abs=1e-15)


def test_fit_unseen_parent_config_gets_half():
    # parent is always 0, so config parent=1 is never observed
    data = Dataset(["p", "c"], np.array([[0, 1], [0, 0]]))
    for pc in (0.0, 1.0):
        net = fit_cpts(Dag(2, {1: [0]}), data, pseudocount=pc)
        assert net.cpts[1].table[1] == pytest.approx(0.5, abs=0)


def test_fit_recovers_generating_cpts_at_large_m():
    rng = np.random.default_rng(92)
    dag = Dag(6, {1: [0], 3: [1, 2], 4: [0, 2, 3], 5: [4]})
    cpts = []
    for v in range(6):
        ps = dag.parents(v)
        cpts.append(Cpt(ps, rng.uniform(0.1, 0.9, size=2 ** len(ps))))
    net = BayesNet([f"x{i}" for i in range(6)], dag, cpts)
    data = forward_sample(net, 50_000, rng)
    fitted = fit_cpts(dag, data, pseudocount=1.0)
    worst = max(
        float(np.max(np.abs(fitted.cpts[v].table - net.cpts[v].table)))
        for v in range(6)
    )
    assert worst < 0.05


# ---------------------------------------------------------------- likelihood


def test_log_likelihood_matches_joint_enumeration():
    rng = np.random.default_rng(5)
    dag = Dag(5, {1: [0], 2: [0, 1], 4: [2, 3]})
    cpts = [Cpt(dag.parents(v), rng.uniform(0.05, 0.95, size=2 ** len(dag.parents(v))))
            for v in range(5)]
    net = BayesNet([f"x{i}" for i in range(5)], dag, cpts)
    # joint over all assignments must sum to 1, otherwise the oracle is wrong
    total = sum(joint_probability(net, a) for a in itertools.product((0, 1), repeat=5))
    assert total == pytest.approx(1.0, abs=1e-12)
    data = forward_sample(net, 200, rng)
    expected = sum(
        math.log(joint_probability(net, tuple(int(x) for x in row)))
        for row in data.values
    )
    assert log_likelihood(net, data) == pytest.approx(expected, abs=1e-9)


def test_log_likelihood_zero_probability_tells_caller_to_refit():
    net = net_from_tables({0: ((), [1.0])})
    data = Dataset(["x0"], np.array([[0]]))
    with pytest.raises(ZeroProbabilityError, match="pseudocount"):
        log_likelihood(net, data)


# ---------------------------------------------------------------- file formats


def test_dataset_csv_round_trip(tmp_path):
    data = Dataset(["a", "b"], np.array([[0, 1], [1, 1], [1, 0]]))
    path = tmp_path / "d.csv"
    data.to_csv(path)
    back = Dataset.from_csv(path)
    assert back.names == data.names
    assert np.array_equal(back.values, data.values)


def test_dataset_csv_bad_token_reports_line(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("a,b\n0,1\n1,2\n")
    with pytest.raises(DataFormatError, match="line 3"):
        Dataset.from_csv(path)


def test_dataset_csv_bad_width_reports_line(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("a,b\n0,1\n1\n")
    with pytest.raises(DataFormatError, match="line 3"):
        Dataset.from_csv(path)


def test_network_json_round_trip_is_value_exact(tmp_path):
    rng = np.random.default_rng(13)
    dag = Dag(4, {2: [0, 1], 3: [2]}, layers=None)
    cpts = [Cpt(dag.parents(v), rng.random(2 ** len(dag.parents(v))))
            for v in range(4)]
    net = BayesNet(["a", "b", "c", "d"], dag, cpts)
    path = tmp_path / "net.json"
    net.to_json(path)
    back = BayesNet.from_json(path)
    assert back.names == net.names
    assert back.dag == net.dag
    for v in range(4):
        assert np.array_equal(back.cpts[v].table, net.cpts[v].table)


def test_network_json_keeps_layers(tmp_path):
    dag = Dag(2, {1: [0]}, layers=["top", "bottom"])
    net = BayesNet(["t", "b"], dag, [Cpt((), [0.5]), Cpt((0,), [0.1, 0.9])])
    doc = json.loads(net.to_json())
    assert doc["layers"] == ["top", "bottom"]
    back = BayesNet.from_json(json.dumps(doc))
    assert back.dag.layers == ["top", "bottom"]


def test_network_json_missing_key_is_format_error():
    with pytest.raises(DataFormatError):
        BayesNet.from_json(json.dumps({"variables": ["a"], "parents": [[]]}))


def test_cpt_parent_mismatch_rejected():
    dag = Dag(2, {1: [0]})
    with pytest.raises(ValueError, match="parents"):
        BayesNet(["a", "b"], dag, [Cpt((), [0.5]), Cpt((), [0.5])])
