import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import graphs
from surjcount.brute import ListAssignment, count_comp, count_hom
from surjcount.decomposition import (
    WeightedGraphSet,
    build_table,
    comp_via_decomposition,
    comp_via_moebius,
    edge_deleted_weight_check,
    enumerate_sub,
    isomorphic_entry,
    z_value,
)
from surjcount.errors import GraphTooLargeError, PreconditionError
from surjcount.graph import (
    Graph,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    disjoint_union,
    empty_graph,
    is_isomorphic,
    path_graph,
    star,
)
from surjcount.polyalgo import count_hom_tractable
from surjcount.verify import K23_TABLES, k23_class


def test_enumerate_sub_examples():
    assert enumerate_sub(Graph(1)) == [Graph(1)]
    subs = enumerate_sub(complete_graph(2))
    assert sorted(s.n for s in subs) == [1, 1, 2]
    k23 = complete_bipartite(2, 3)
    subs = enumerate_sub(k23)
    mu = [sum(1 for s in subs if is_isomorphic(s, k23_class(i))) for i in range(1, 11)]
    assert mu == [1, 6, 6, 3, 6, 2, 12, 9, 6, 5]


def test_enumerate_sub_preconditions():
    with pytest.raises(PreconditionError):
        enumerate_sub(empty_graph(2))
    with pytest.raises(PreconditionError):
        enumerate_sub(empty_graph(0))
    with pytest.raises(GraphTooLargeError):
        enumerate_sub(path_graph(9))


@pytest.mark.parametrize("i", sorted(K23_TABLES))
def test_k23_class_tables(i):
    table = build_table(k23_class(i))
    assert len(table.entries) == len(K23_TABLES[i])
    for j, mu, lam in K23_TABLES[i]:
        e = isomorphic_entry(table, k23_class(j))
        assert (e.mu, e.lam) == (mu, lam)


def test_named_lambda_rows():
    def lam_row(i, members):
        t = build_table(k23_class(i))
        return [isomorphic_entry(t, k23_class(j)).lam for j in members]

    assert lam_row(8, [8, 9, 10]) == [1, -2, 1]
    assert lam_row(6, [6, 8, 9, 10]) == [1, -3, 3, -1]
    assert lam_row(1, range(1, 11)) == [1, -6, 6, 3, 6, -2, -12, 3, 0, 0]


def test_table_serialization():
    table = build_table(complete_bipartite(2, 3))
    d = json.loads(table.to_json())
    assert len(d["entries"]) == 10 and d["entries"][0]["lambda"] == 1
    lines = table.to_text().splitlines()
    assert lines[0].split()[:5] == ["#", "n", "|E|", "mu", "lambda"]
    assert len(lines) == 11
    assert build_table(Graph(1)).to_text().splitlines()[1].split() == ["1", "1", "0", "1", "1", "-"]


def test_k23_decomposition_formula():
    H = complete_bipartite(2, 3)
    coeff = {1: 1, 2: -6, 3: 6, 4: 3, 5: 6, 6: -2, 7: -12, 8: 3}
    for G in [cycle_graph(4), path_graph(5), star(3), cycle_graph(6), complete_bipartite(2, 3)]:
        want = sum(c * count_hom(G, k23_class(i)) for i, c in coeff.items())
        assert count_comp(G, H) == want == comp_via_decomposition(G, build_table(H))


@given(graphs(min_n=1, max_n=5, connected=True), graphs(min_n=1, max_n=4, loops=True, connected=True))
def test_decomposition_identity(G, H):
    assert comp_via_decomposition(G, build_table(H)) == count_comp(G, H) == comp_via_moebius(G, H)


def test_decomposition_needs_connected_input():
    table = build_table(complete_graph(2))
    with pytest.raises(PreconditionError):
        comp_via_decomposition(empty_graph(2), table)
    with pytest.raises(PreconditionError):
        comp_via_decomposition(complete_graph(2, True), table)


def test_single_vertex_base_case():
    for G in [path_graph(1), path_graph(3)]:
        assert comp_via_decomposition(G, build_table(Graph(1))) == count_hom(G, Graph(1))


@given(graphs(max_n=4), graphs(max_n=4, loops=True), st.data())
def test_moebius_with_lists(G, H, data):
    if H.n:
        L = ListAssignment(tuple(
            data.draw(st.frozensets(st.integers(0, H.n - 1))) for _ in range(G.n)
        ))
    else:
        L = None
    assert comp_via_moebius(G, H, L) == count_comp(G, H, L)


@pytest.mark.parametrize("H", [
    star(3), disjoint_union(star(2), complete_graph(2, True)),
    disjoint_union(Graph(1, frozenset({(0, 0)})), complete_graph(2)),
])
@given(G=graphs(max_n=5))
def test_moebius_with_tractable_homs(H, G):
    assert comp_via_moebius(G, H, None, count_hom_tractable) == count_comp(G, H)


def test_moebius_empty_cases():
    assert comp_via_moebius(empty_graph(0), empty_graph(0)) == 1
    assert comp_via_moebius(empty_graph(0), Graph(1)) == 0


def test_z_value():
    H = complete_graph(3, True)
    ws = WeightedGraphSet.from_table(build_table(H))
    for G in [path_graph(3), cycle_graph(4)]:
        assert z_value(ws, G) == count_comp(G, H)
    single = WeightedGraphSet((Graph(1),), (5,))
    assert z_value(single, path_graph(1)) == 5
    assert z_value(ws, empty_graph(0)) == 0
    with pytest.raises(PreconditionError):
        WeightedGraphSet((Graph(1), Graph(1)), (1, 2))
    with pytest.raises(PreconditionError):
        WeightedGraphSet((Graph(1),), ())


def test_edge_deletion_weights():
    assert {w for _, w in edge_deleted_weight_check(complete_bipartite(2, 3))} == {-6}
    assert all(w != 0 for _, w in edge_deleted_weight_check(complete_graph(3, True)))
    assert all(w != 0 for _, w in edge_deleted_weight_check(complete_graph(3)))
    with pytest.raises(PreconditionError):
        edge_deleted_weight_check(path_graph(3))


def test_moebius_inversion_of_table():
    # hom(G -> H) = sum over members J of mu(J) * comp(G -> J)
    H = complete_bipartite(2, 3)
    table = build_table(H)
    for G in [path_graph(3), cycle_graph(4)]:
        assert count_hom(G, H) == sum(e.mu * count_comp(G, e.graph) for e in table.entries)
