from collections import Counter
from fractions import Fraction
from itertools import product
from math import comb, exp, floor, log
from statistics import NormalDist, fmean, pstdev

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import graphs
from surjcount import approx
from surjcount.approx import (
    SideAssignment,
    ap_hom_via_comp,
    ap_hom_via_sur,
    comp_padding,
    exact_estimator,
    hom_via_ret,
    ln_upper,
    mc_comp_estimator,
    mc_estimate_comp,
    restricted_space_size,
    sample_count,
    sample_uniform_hom,
    stream_generator,
    sur_padding,
)
from surjcount.brute import count_comp, count_hom, count_ret, count_sur
from surjcount.errors import NotTractableError, PreconditionError
from surjcount.graph import (
    Graph,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    disjoint_union,
    empty_graph,
    matching,
    path_graph,
    star,
)
from surjcount.polyalgo import surjections_count

RK3 = complete_graph(3, True)
K23 = complete_bipartite(2, 3)


def test_ln_upper_bounds_from_above():
    for x in [Fraction(2), Fraction(8), Fraction(16), Fraction(7, 3)]:
        u = ln_upper(x)
        assert u >= Fraction(log(x)) - Fraction(1, 10**12)
        assert u - Fraction(log(x)) < Fraction(1, 10**9)


def test_sample_count_examples():
    # reflexive K3 with its three edges, eps 0.2, delta 0.25
    assert sample_count(3**6, "0.2", "0.25") == 113694
    c = 2 * 3**12
    assert c == 1062882
    m = sample_count(c, Fraction(1, 5), Fraction(1, 4))
    assert m == -(-c * 3 * ln_upper(Fraction(8)) * 25 // 1)


@given(st.integers(1, 10**6), st.fractions(Fraction(1, 100), Fraction(99, 100)),
       st.fractions(Fraction(1, 100), Fraction(99, 100)))
def test_sample_count_bound_and_monotone(c, eps, delta):
    m = sample_count(c, eps, delta)
    assert m >= c * 3 * log(2 / delta) / eps**2 - 1e-6
    assert sample_count(c + 1, eps, delta) >= m
    assert sample_count(c, eps / 2, delta) >= m
    assert sample_count(c, eps, delta / 2) >= m


def test_sample_count_rejects_bad_accuracy():
    for eps, dl in [(0, "0.5"), (1, "0.5"), ("0.5", 0), ("0.5", 1)]:
        with pytest.raises(PreconditionError):
            sample_count(10, eps, dl)


def test_streams_are_independent_and_reproducible():
    a = stream_generator(5, 0, 0).integers(0, 2**62, 8)
    assert (a == stream_generator(5, 0, 0).integers(0, 2**62, 8)).all()
    for other in [(5, 1, 0), (5, 0, 1), (6, 0, 0)]:
        assert not (a == stream_generator(*other).integers(0, 2**62, 8)).all()


def test_estimator_deterministic_per_seed():
    a = mc_estimate_comp(path_graph(4), RK3, "0.2", "0.25", 11)
    b = mc_estimate_comp(path_graph(4), RK3, "0.2", "0.25", 11)
    c = mc_estimate_comp(path_graph(4), RK3, "0.2", "0.25", 12)
    assert a.value == b.value and a.m == 113694 and a.c == 729
    assert a.case == "clique" and a.calls == 1
    assert c.value != a.value


def test_case_selection_and_constants():
    r = mc_estimate_comp(cycle_graph(6), K23, "0.2", "0.25", 0, m_override=10)
    assert r.case == "biclique-few-components" and r.c == 3**12
    assert r.delta_call == Fraction(1, 8) and r.value == 0
    G = disjoint_union(*[complete_graph(2)] * 6)
    r = mc_estimate_comp(G, K23, "0.2", "0.25", 0, m_override=10)
    assert r.case == "biclique-many-components" and r.c == 2 * 3**12
    assert r.m == 10


def test_exact_shortcuts():
    assert mc_estimate_comp(empty_graph(3), Graph(1), "0.2", "0.25", 0).value == 1
    assert mc_estimate_comp(empty_graph(3), complete_graph(2), "0.2", "0.25", 0).value == 0
    assert mc_estimate_comp(path_graph(3), Graph(1, frozenset({(0, 0)})), "0.2", "0.25", 0).value == 1
    assert mc_estimate_comp(path_graph(3), Graph(1), "0.2", "0.25", 0).value == 0
    assert mc_estimate_comp(path_graph(2), RK3, "0.2", "0.25", 0).value == 0
    r = mc_estimate_comp(disjoint_union(complete_graph(3), cycle_graph(6)), K23, "0.2", "0.25", 0)
    assert r.value == 0 and r.case == "non-bipartite"


def test_isolated_vertices_scale_estimate():
    G = disjoint_union(path_graph(4), empty_graph(2))
    r = mc_estimate_comp(G, RK3, "0.2", "0.25", 3, m_override=1000)
    base = mc_estimate_comp(path_graph(4), RK3, "0.2", "0.25", 3, m_override=1000)
    assert r.isolated_factor == 9 and r.value == 9 * base.value


def test_refusals():
    with pytest.raises(NotTractableError):
        mc_estimate_comp(path_graph(3), disjoint_union(RK3, RK3), "0.2", "0.25", 0)
    with pytest.raises(NotTractableError):
        mc_estimate_comp(path_graph(3), path_graph(4), "0.2", "0.25", 0)
    with pytest.raises(NotTractableError):
        mc_estimate_comp(path_graph(3), complete_graph(3), "0.2", "0.25", 0)
    with pytest.raises(PreconditionError):
        mc_estimate_comp(Graph(1, frozenset({(0, 0)})), RK3, "0.2", "0.25", 0)
    with pytest.raises(PreconditionError):
        mc_estimate_comp(path_graph(3), RK3, "1.5", "0.25", 0)


def _chi2(counts: Counter, support: list, total: int) -> float:
    e = total / len(support)
    return sum((counts.get(s, 0) - e) ** 2 / e for s in support)


def test_uniform_hom_sampler_chi_square():
    G, H = path_graph(3), complete_graph(2, True)
    rng = np.random.Generator(np.random.Philox(2024))
    n = 100_000
    counts = Counter(sample_uniform_hom(G, H, rng=rng) for _ in range(n))
    support = list(product(range(2), repeat=3))
    assert set(counts) == set(support)
    # 7 degrees of freedom; 24.32 is the 0.999 quantile
    assert _chi2(counts, support, n) < 24.32


def test_uniform_hom_sampler_biclique():
    G, H = path_graph(3), star(2)
    rng = np.random.Generator(np.random.Philox(7))
    n = 30_000
    counts = Counter(sample_uniform_hom(G, H, rng=rng) for _ in range(n))
    support = [f for f in product(range(3), repeat=3)
               if all((f[a], f[b]) in H.edges or (f[b], f[a]) in H.edges for a, b in G.non_loop_edges)]
    assert len(support) == count_hom(G, H) == 6
    assert set(counts) == set(support)
    # 5 degrees of freedom; 20.52 is the 0.999 quantile
    assert _chi2(counts, support, n) < 20.52


def test_restricted_sampler_stays_in_space():
    G, H = path_graph(4), K23
    rng = np.random.Generator(np.random.Philox(1))
    omega = SideAssignment((True,))
    size = restricted_space_size(G, H, omega)
    assert size == 2**2 * 3**2
    seen = {sample_uniform_hom(G, H, omega, rng) for _ in range(2000)}
    assert len(seen) == size
    for f in seen:
        assert {f[0], f[2]} <= {0, 1} or {f[1], f[3]} <= {0, 1}


def test_sampler_preconditions():
    with pytest.raises(PreconditionError):
        sample_uniform_hom(disjoint_union(path_graph(2), empty_graph(1)), K23)
    with pytest.raises(PreconditionError):
        sample_uniform_hom(complete_graph(3), K23)
    with pytest.raises(PreconditionError):
        sample_uniform_hom(path_graph(2), RK3, SideAssignment((True,)))
    with pytest.raises(PreconditionError):
        sample_uniform_hom(path_graph(2), K23, SideAssignment((True, False)))


def test_rejection_blocks_agree_with_table_blocks(monkeypatch):
    G = disjoint_union(*[path_graph(3)] * 6)
    truth = count_comp(G, K23)
    table = mc_estimate_comp(G, K23, "0.2", "0.25", 5, m_override=400_000).value
    monkeypatch.setattr(approx, "_TABLE_LIMIT", 1)
    reject = mc_estimate_comp(G, K23, "0.2", "0.25", 5, m_override=400_000).value
    assert table != reject
    for v in (table, reject):
        assert abs(v - truth) <= Fraction(1, 50) * truth


def test_rejection_blocks_cover_both_orientations(monkeypatch):
    monkeypatch.setattr(approx, "_TABLE_LIMIT", 1)
    G = matching(6)
    truth = count_comp(G, K23)
    r = mc_estimate_comp(G, K23, "0.2", "0.25", 9, m_override=300_000)
    assert abs(r.value - truth) <= Fraction(1, 20) * truth


@pytest.mark.parametrize("G,H", [
    (cycle_graph(4), complete_bipartite(2, 2)),
    (matching(4), complete_bipartite(2, 2)),
    (path_graph(4), RK3),
    (path_graph(3), star(2)),
])
def test_small_m_estimator_is_unbiased(G, H):
    truth = count_comp(G, H)
    runs = 600
    vals = [float(mc_estimate_comp(G, H, "0.2", "0.25", s, m_override=64).value) for s in range(runs)]
    se = pstdev(vals) / runs**0.5
    assert abs(fmean(vals) - truth) <= 4 * se


def test_full_estimator_within_epsilon():
    truth = count_comp(path_graph(4), RK3)
    for s in range(5):
        v = mc_estimate_comp(path_graph(4), RK3, "0.2", "0.25", s).value
        assert abs(v - truth) <= Fraction(1, 5) * truth


def test_sur_padding_inequality():
    for n in range(0, 6):
        for q in range(2, 6):
            t = sur_padding(n, q)
            assert q**t >= 5 * q**n * 2**q * (q - 1) ** t
            assert t == 0 or q ** (t - 1) < 5 * q**n * 2**q * (q - 1) ** (t - 1)
    with pytest.raises(PreconditionError):
        sur_padding(3, 1)


def test_comp_padding_without_loops_is_surjection_constant():
    for n, q, p in [(2, 2, 1), (3, 3, 2), (4, 4, 3), (3, 5, 6)]:
        t, d = comp_padding(n, q, p, 0)
        assert d == 2**t * surjections_count(t, p)
        assert t >= p


@pytest.mark.parametrize("H", [RK3, complete_graph(2, True), Graph(2, frozenset({(0, 1), (0, 0)})), K23])
def test_comp_padding_counts_edge_maps(H):
    # the padding constant counts maps of t disjoint edges onto H using every non-loop edge
    p, loops = len(H.non_loop_edges), len(H.loops)
    t, d = comp_padding(2, H.n, p, loops)
    assert 4 * ((2 * p + loops) ** t - d) * H.n**2 <= d
    for tt in range(1, 4):
        direct = sum(comb(tt, j) * loops ** (tt - j) * 2**j * surjections_count(j, p) for j in range(tt + 1))
        maps = count_hom(matching(tt), H)
        used = sum(
            1 for f in product(range(H.n), repeat=2 * tt)
            if all(H.has_edge(f[2 * i], f[2 * i + 1]) for i in range(tt))
            and {frozenset((f[2 * i], f[2 * i + 1])) for i in range(tt)} >= {frozenset(x) for x in H.non_loop_edges}
        )
        assert direct == used <= maps


@given(graphs(max_n=4), graphs(min_n=2, max_n=3, loops=True))
@settings(max_examples=40)
def test_floor_recovery_via_sur(G, H):
    est = exact_estimator(count_sur)
    assert ap_hom_via_sur(G, H, est, "0.2") == count_hom(G, H)


@given(graphs(max_n=4), graphs(min_n=1, max_n=3, loops=True, connected=True))
@settings(max_examples=40)
def test_floor_recovery_via_comp(G, H):
    est = exact_estimator(count_comp)
    assert ap_hom_via_comp(G, H, est, "0.2") == count_hom(G, H)


def test_floor_recovery_sandwich():
    G, H = path_graph(3), RK3
    p = len(H.non_loop_edges)
    t, d = comp_padding(G.n, H.n, p, len(H.loops))
    hom = count_hom(G, H)
    exact = count_comp(disjoint_union(G, matching(t)), H)
    e = 2 * p + len(H.loops)
    assert d * hom <= exact <= d * hom + (e**t - d) * H.n**G.n
    assert 4 * (exact - d * hom) <= d
    assert floor(Fraction(exact, d)) == hom
    # a skewed estimate within eps/21 gives an eps-approximation of hom
    eps = Fraction(1, 5)
    for scale in [eps / 21, -eps / 21, Fraction(0)]:
        skewed = lambda g, h, e, s=scale: Fraction(count_comp(g, h)) * (1 + s)
        got = ap_hom_via_comp(G, H, skewed, eps)
        assert abs(got - hom) <= eps * hom
        got = ap_hom_via_sur(G, H, lambda g, h, e, s=scale: Fraction(count_sur(g, h)) * (1 + s), eps)
        assert abs(got - hom) <= eps * hom


def test_sur_sandwich_without_loops():
    G, H = path_graph(3), complete_graph(2)
    for t in range(1, 7):
        lo = surjections_count(t, 2) * count_hom(G, H)
        hi = lo + (2**t - surjections_count(t, 2)) * 2**G.n
        assert lo <= count_sur(disjoint_union(G, empty_graph(t)), H) <= hi


def test_floor_recovery_small_cases():
    est = exact_estimator(count_comp)
    assert ap_hom_via_comp(Graph(1), complete_graph(2), est, "0.2") == 2
    assert ap_hom_via_comp(path_graph(2), Graph(1), est, "0.2") == 0
    assert ap_hom_via_comp(path_graph(2), Graph(1, frozenset({(0, 0)})), est, "0.2") == 1
    assert ap_hom_via_sur(path_graph(2), Graph(1), exact_estimator(count_sur), "0.2") == 0
    with pytest.raises(PreconditionError):
        ap_hom_via_comp(path_graph(2), disjoint_union(RK3, RK3), est, "0.2")


def test_floor_recovery_with_monte_carlo_estimator():
    est = mc_comp_estimator(seed=3)
    got = ap_hom_via_comp(Graph(1), complete_graph(2, True), est, "0.5")
    assert abs(got - 2) <= 1


@given(graphs(max_n=4), graphs(min_n=1, max_n=3, loops=True))
@settings(max_examples=40)
def test_hom_via_ret_matches_hom(G, H):
    assert hom_via_ret(G, H, count_ret) == count_hom(G, H)
