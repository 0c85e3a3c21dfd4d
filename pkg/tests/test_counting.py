import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cayleycount.counting import (
    bipartite_bound_sum,
    cluster_bound,
    container_table,
    count_closure_preimages,
    count_independent_sets,
    count_independent_sets_bruteforce,
    enumerate_small_2linked_closed,
    lucas_number,
)
from cayleycount.errors import InstanceTooLargeError
from cayleycount.graphs import Graph, bits_list, closure, mask_of, two_linked_components
from cayleycount.groups import GeneratorSet, make_group
from cayleycount.graphs import build_cayley
from cayleycount.verify import complete_bipartite_graph, cycle_graph


def test_known_counts():
    assert count_independent_sets(cycle_graph(4)) == 7
    assert count_independent_sets(cycle_graph(5)) == 11
    assert count_independent_sets(cycle_graph(6)) == 18
    assert count_independent_sets(cycle_graph(8)) == 47
    assert count_independent_sets(complete_bipartite_graph(2)) == 7
    assert count_independent_sets(Graph([0] * 5)) == 32
    assert count_independent_sets(Graph([0])) == 2
    assert count_independent_sets(Graph([])) == 1


def test_bruteforce_known_counts():
    assert count_independent_sets_bruteforce(cycle_graph(8)) == 47
    assert count_independent_sets_bruteforce(cycle_graph(5)) == 11
    assert count_independent_sets_bruteforce(Graph([0])) == 2


def test_budgets_enforced():
    g = cycle_graph(12)
    with pytest.raises(InstanceTooLargeError):
        count_independent_sets(g, budget=10)
    with pytest.raises(InstanceTooLargeError):
        count_independent_sets_bruteforce(g, budget=10)


def test_lucas_oracle():
    known = {1: 1, 2: 3, 3: 4, 4: 7, 5: 11, 6: 18, 7: 29, 8: 47, 10: 123}
    for n, val in known.items():
        assert lucas_number(n) == val
    for n in range(3, 40):
        assert lucas_number(n) == lucas_number(n - 1) + lucas_number(n - 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 11), st.data())
def test_engine_matches_bruteforce_on_random_graphs(n, data):
    adj = [0] * n
    for u in range(n):
        for v in range(u + 1, n):
            if data.draw(st.booleans()):
                adj[u] |= 1 << v
                adj[v] |= 1 << u
    g = Graph(adj)
    assert count_independent_sets(g) == count_independent_sets_bruteforce(g)


def test_monotone_under_added_generators():
    # adding generators only adds edges, which can only remove independent sets
    spec = make_group([12])
    nested = [{1, 11}, {1, 11, 2, 10}, {1, 11, 2, 10, 3, 9}]
    counts = [count_independent_sets(build_cayley(spec, GeneratorSet(spec, d)))
              for d in nested]
    assert counts[0] >= counts[1] >= counts[2]


def _brute_small_2linked_closed(graph):
    """Independent oracle: scan every subset of X for closed 2-linked small."""
    xs = bits_list(graph.parts[0])
    n = len(xs)
    out = set()
    for sub in range(1, 1 << n):
        mask = 0
        for i, v in enumerate(xs):
            if sub >> i & 1:
                mask |= 1 << v
        rec = closure(graph, mask)
        if rec.closure != mask:
            continue
        if 2 * rec.a > n:
            continue
        if len(two_linked_components(graph, mask)) != 1:
            continue
        out.add(mask)
    return out


def test_enumeration_matches_subset_scan():
    for g in (cycle_graph(8), cycle_graph(12), complete_bipartite_graph(3)):
        expected = _brute_small_2linked_closed(g)
        got = {rec.closure for rec in enumerate_small_2linked_closed(g, "X")}
        assert got == expected


def test_enumeration_c8_records():
    g = cycle_graph(8)
    recs = {rec.closure: rec for rec in enumerate_small_2linked_closed(g, "X")}
    singles = {mask_of([v]) for v in (0, 2, 4, 6)}
    pairs = {mask_of([0, 2]), mask_of([2, 4]), mask_of([4, 6]), mask_of([6, 0])}
    assert set(recs) == singles | pairs
    for mask in singles:
        assert (recs[mask].a, recs[mask].g) == (1, 2)
    for mask in pairs:
        assert (recs[mask].a, recs[mask].g) == (2, 3)


def test_enumeration_complete_bipartite_is_empty():
    # every nonempty subset closes to the whole side
    for d in (2, 3, 4):
        assert list(enumerate_small_2linked_closed(complete_bipartite_graph(d), "X")) == []


def test_container_table_c8():
    table = container_table(cycle_graph(8))
    assert table.entries == {(1, 2): 4, (2, 3): 4}
    assert table.closed_entries == {(1, 2): 4, (2, 3): 4}
    assert table.rows() == [(1, 2, 1, 4), (2, 3, 1, 4)]


def test_container_table_c4_empty():
    # C4 is K_{2,2}: singleton closures already cover the whole side
    assert container_table(cycle_graph(4)).entries == {}


def test_preimage_counts():
    g = cycle_graph(8)
    rec = closure(g, mask_of([0, 2]))
    assert count_closure_preimages(g, rec) == 1
    rec = closure(g, mask_of([0]))
    assert count_closure_preimages(g, rec) == 1


def test_side_sum_c4_example():
    sums = bipartite_bound_sum(cycle_graph(4))
    assert sums.sum_small_size == 6
    assert sums.doubled_small_size == 12
    assert sums.sum_small_closure == 4
    assert sums.doubled_small_closure == 8
    assert sums.doubled_small_size >= 7 and sums.doubled_small_closure >= 7


def test_side_sum_matches_direct_loop():
    # independent oracle: recompute both sums element by element
    for g in (cycle_graph(8), complete_bipartite_graph(3), cycle_graph(6)):
        xs = bits_list(g.parts[0])
        n = len(xs)
        by_size = 0
        by_closure = 0
        for sub in range(1 << n):
            mask = 0
            for i, v in enumerate(xs):
                if sub >> i & 1:
                    mask |= 1 << v
            rec = closure(g, mask)
            term = 2 ** (n - rec.g)
            if 2 * mask.bit_count() <= n:
                by_size += term
            if 2 * rec.a <= n:
                by_closure += term
        sums = bipartite_bound_sum(g)
        assert sums.sum_small_size == by_size
        assert sums.sum_small_closure == by_closure


def test_cluster_bound_c8():
    rep = cluster_bound(cycle_graph(8))
    assert rep.sum_all == Fraction(3, 2)
    assert rep.i_count == 47
    assert rep.holds
    assert abs(rep.bound_float - 143.414) < 0.01
    assert rep.bound_lower <= Fraction(144)


def test_cluster_bound_c4():
    rep = cluster_bound(cycle_graph(4))
    assert rep.sum_all == 0
    assert rep.bound_float == 8.0
    assert rep.holds  # 7 <= 8


def test_cluster_bound_complete_bipartite():
    for d in range(1, 7):
        rep = cluster_bound(complete_bipartite_graph(d))
        assert rep.sum_all == 0
        assert rep.i_count == 2 ** (d + 1) - 1
        assert rep.holds


def test_cluster_lower_bound_is_rigorous():
    import math
    rep = cluster_bound(cycle_graph(8))
    exact = 2 ** 5 * math.exp(1.5)
    assert float(rep.bound_lower) <= exact
    assert exact - float(rep.bound_lower) < 1e-10


def test_side_sum_requires_connected_bipartite():
    from cayleycount.errors import InvalidInputError
    from cayleycount.groups import GeneratorSet, coords_to_id

    spec = make_group([2, 4])
    # a perfect matching: bipartite but disconnected
    disconnected = build_cayley(spec, GeneratorSet(spec, {coords_to_id(spec, (1, 0))}))
    assert disconnected.parts is not None and not disconnected.is_connected()
    with pytest.raises(InvalidInputError):
        bipartite_bound_sum(disconnected)
    non_bipartite = cycle_graph(5)
    with pytest.raises(InvalidInputError):
        bipartite_bound_sum(non_bipartite)
