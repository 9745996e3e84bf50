from math import factorial

import pytest
from hypothesis import given

from conftest import graphs
from surjcount.brute import count_anchored_hom, count_comp, count_hom, count_sur
from surjcount.decomposition import WeightedGraphSet, build_table
from surjcount.errors import OracleError, PreconditionError, SearchExhaustedError
from surjcount.graph import (
    Graph,
    automorphism_orbits,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    delete_edge,
    disjoint_union,
    path_graph,
    star,
)
from surjcount.interpolation import (
    LinearSystem,
    ReductionTrace,
    comp_call_budget,
    component_replacement_count,
    distinguisher_search,
    edge_cover_count,
    hom_via_z_search,
    isolated_cover_count,
    orbit_targets,
    recover_hom_via_comp,
    recover_hom_via_sur,
    recover_hom_via_z,
    replacement_choice,
    strip_size1_interpolation,
)

RK1 = Graph(1, frozenset({(0, 0)}))


def test_cover_counts_diagonals():
    for t in range(6):
        assert isolated_cover_count(t, t, 7) == factorial(t)
        assert edge_cover_count(t, t, 9) == 2**t * factorial(t)


def test_strip_examples():
    H = disjoint_union(Graph(1), complete_graph(2))
    G = cycle_graph(4)
    tr = ReductionTrace()
    assert strip_size1_interpolation(G, H, count_comp, tr) == count_comp(G, complete_graph(2))
    assert tr.count() == 2
    assert tr.systems[0].b[0] == count_comp(G, H)
    tr = ReductionTrace()
    assert strip_size1_interpolation(G, complete_graph(2), count_comp, tr) == count_comp(G, complete_graph(2))
    assert tr.count() == 1


@given(graphs(max_n=4), graphs(min_n=1, max_n=4, loops=True))
def test_strip_matches_brute(G, H):
    tr = ReductionTrace()
    got = strip_size1_interpolation(G, H, count_comp, tr)
    keep = [v for v in range(H.n) if H.degree(v) > 0]
    from surjcount.graph import induced_subgraph

    Hp, _ = induced_subgraph(H, keep)
    assert got == count_comp(G, Hp)
    assert tr.count() == H.n - len(keep) + 1


@given(graphs(max_n=4), graphs(max_n=4, loops=True))
def test_hom_via_comp_matches_brute(G, H):
    tr = ReductionTrace()
    assert recover_hom_via_comp(G, H, count_comp, tr) == count_hom(G, H)
    assert tr.count() == comp_call_budget(G, H)


def test_hom_via_comp_small_systems():
    tr = ReductionTrace()
    G = path_graph(3)
    assert recover_hom_via_comp(G, complete_graph(2), count_comp, tr) == 2
    a = tr.systems[0].a
    assert a[0] == [1, 0] and a[1][1] == 2
    for G in [Graph(1), path_graph(2), path_graph(3)]:
        assert recover_hom_via_comp(G, Graph(1), count_comp) == count_hom(G, Graph(1))


@given(graphs(max_n=4), graphs(max_n=4, loops=True))
def test_hom_via_sur_matches_brute(G, H):
    tr = ReductionTrace()
    assert recover_hom_via_sur(G, H, count_sur, tr) == count_hom(G, H)
    assert tr.count() == H.n + 1


def test_hom_via_sur_examples():
    assert recover_hom_via_sur(path_graph(3), complete_graph(2), count_sur) == 2
    assert recover_hom_via_sur(path_graph(3), Graph(1), count_sur) == 0
    assert recover_hom_via_sur(path_graph(1), Graph(1), count_sur) == 1


def test_inconsistent_oracle_detected():
    with pytest.raises(OracleError):
        # padded answers 1, 1, 2 leave a half-integer in the last unknown
        recover_hom_via_sur(path_graph(3), complete_graph(2), lambda G, H: 2 if G.n == 5 else 1)


def test_linear_system_errors():
    with pytest.raises(OracleError):
        LinearSystem([[2]], [1]).solve()
    with pytest.raises(OracleError):
        LinearSystem([[0]], [1]).solve()
    with pytest.raises(OracleError):
        LinearSystem([[1, 1], [1, 1]], [1, 1], kind="vandermonde").solve()
    with pytest.raises(PreconditionError):
        LinearSystem([[1, 1], [0, 1]], [1, 1]).solve()
    with pytest.raises(PreconditionError):
        LinearSystem([[1]], [1, 2]).solve()
    s = LinearSystem([[1, 1], [1, 2]], [3, 5], kind="vandermonde")
    assert s.solve() == [1, 2] and s.to_dict()["x"] == ["1", "2"]


def test_component_replacement_examples():
    two_k3 = disjoint_union(complete_graph(3, True), complete_graph(3, True))
    G = cycle_graph(4)
    tr = ReductionTrace()
    J, value = component_replacement_count(G, two_k3, count_comp, tr)
    assert J == complete_graph(3, True) and value == count_comp(G, J) == 24
    assert tr.count() == 1
    assert replacement_choice(two_k3)[1] == 2

    H = disjoint_union(complete_bipartite(2, 3), complete_graph(2))
    G = complete_bipartite(2, 3)
    J, value = component_replacement_count(G, H, count_comp)
    assert J == complete_bipartite(2, 3) and value == count_comp(G, J) == 12

    tr = ReductionTrace()
    J, value = component_replacement_count(G, complete_bipartite(2, 3), count_comp, tr)
    assert value == count_comp(G, J) and tr.count() == 1


def test_component_replacement_small_reflexive():
    H = disjoint_union(complete_graph(2, True), complete_graph(2))
    G = complete_graph(2)
    J, value = component_replacement_count(G, H, count_comp)
    assert J == complete_graph(2, True) and value == count_comp(G, J)


def test_component_replacement_preconditions():
    with pytest.raises(PreconditionError):
        component_replacement_count(disjoint_union(Graph(1), Graph(1)), complete_graph(3, True), count_comp)
    with pytest.raises(PreconditionError):
        replacement_choice(disjoint_union(star(2), star(3)))
    with pytest.raises(PreconditionError):
        replacement_choice(cycle_graph(5))


@given(graphs(min_n=1, max_n=4, connected=True))
def test_component_replacement_matches_brute(G):
    for H in [disjoint_union(complete_graph(3, True), complete_graph(2, True), Graph(1)),
              disjoint_union(cycle_graph(4), star(2))]:
        J, value = component_replacement_count(G, H, count_comp)
        assert value == count_comp(G, J)


def test_distinguisher_examples():
    rk2 = complete_graph(2, True)
    d = distinguisher_search([(RK1, 0), (rk2, 0)], "reflexive")
    assert d.g == complete_graph(2) and d.scores == (1, 2)
    d = distinguisher_search([(complete_bipartite(2, 3), 0)], "reflexive" if False else "bipartite")
    assert len(d.scores) == 1
    k23 = complete_bipartite(2, 3)
    reps = [b[0] for b in automorphism_orbits(k23).blocks]
    d = distinguisher_search([(k23, w) for w in reps], "bipartite", max_n=4)
    assert len(set(d.scores)) == 2
    assert d.scores == tuple(count_anchored_hom(d.g, d.v, k23, w) for w in reps)


def test_distinguisher_errors():
    rk2 = complete_graph(2, True)
    with pytest.raises(PreconditionError):
        distinguisher_search([(rk2, 0), (rk2, 1)], "reflexive")
    with pytest.raises(PreconditionError):
        distinguisher_search([(complete_graph(2), 0)], "reflexive")
    with pytest.raises(PreconditionError):
        distinguisher_search([(rk2, 0)], "other")
    # rooted K2 and rooted P3 at its centre cannot be told apart by one vertex
    with pytest.raises(SearchExhaustedError):
        distinguisher_search([(complete_graph(2), 0), (path_graph(3), 1)], "bipartite", max_n=1)


def test_orbit_coefficients():
    H = complete_graph(3, True)
    ws = WeightedGraphSet.from_table(build_table(H))
    rooted = orbit_targets(ws, drop_single_vertex=False)
    for i, J, w, size in rooted:
        orbit = next(b for b in automorphism_orbits(J).blocks if w in b)
        assert size == len(orbit)


@given(graphs(min_n=1, max_n=4, connected=True))
def test_vandermonde_recovery_reflexive(G):
    H = complete_graph(3, True)
    target = delete_edge(H, 0, 1)
    ws = WeightedGraphSet.from_table(build_table(H))
    tr = ReductionTrace()
    got, d = hom_via_z_search(G, 0, ws, target, lambda X: count_comp(X, H), trace=tr)
    assert got == count_hom(G, target)
    assert tr.systems[0].kind == "vandermonde"


@given(graphs(min_n=1, max_n=4, connected=True))
def test_vandermonde_recovery_bipartite(G):
    H = cycle_graph(4)
    target = path_graph(4)
    ws = WeightedGraphSet.from_table(build_table(H))
    got, _ = hom_via_z_search(G, 0, ws, target, lambda X: count_comp(X, H))
    assert got == count_hom(G, target)


def test_vandermonde_single_member():
    ws = WeightedGraphSet((RK1,), (1,))
    d = distinguisher_search([(RK1, 0)], "reflexive")
    assert recover_hom_via_z(path_graph(3), 0, ws, RK1, lambda X: 1, d) == 1


def test_vandermonde_preconditions():
    H = complete_graph(3, True)
    ws = WeightedGraphSet.from_table(build_table(H))
    d = distinguisher_search([(RK1, 0)], "reflexive")
    with pytest.raises(PreconditionError):
        recover_hom_via_z(path_graph(3), 0, ws, complete_graph(4, True), count_comp, d)
    with pytest.raises(PreconditionError):
        recover_hom_via_z(path_graph(3), 7, ws, H, count_comp, d)
    with pytest.raises(PreconditionError):
        recover_hom_via_z(path_graph(3), 0, ws, H, count_comp, d)


def test_trace_serialization():
    tr = ReductionTrace()
    recover_hom_via_sur(path_graph(3), complete_graph(2), count_sur, tr)
    d = tr.to_dict()
    assert len(d["calls"]) == 3 and all(isinstance(c["count"], str) for c in d["calls"])
    assert d["systems"][0]["kind"] == "triangular"
