"""Self-check batteries behind ``surjcount verify``.

Each suite runs a family of exact cross-checks between independent routes
and reports one line per property.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product

from .approx import (
    ap_hom_via_comp,
    ap_hom_via_sur,
    exact_estimator,
    hom_via_ret,
    mc_estimate_comp,
)
from .brute import ListAssignment, count_comp, count_hom, count_ret, count_sur
from .classifier import FP, classify_exact, count_problem
from .decomposition import (
    WeightedGraphSet,
    build_table,
    comp_via_decomposition,
    comp_via_moebius,
    isomorphic_entry,
)
from .errors import NotTractableError, PreconditionError
from .graph import (
    Graph,
    all_graphs,
    complete_graph,
    connected_graphs,
    delete_edge,
)
from .interpolation import (
    ReductionTrace,
    comp_call_budget,
    hom_via_z_search,
    recover_hom_via_comp,
    recover_hom_via_sur,
    size1_split,
    strip_size1_interpolation,
)
from .polyalgo import (
    SubsetSumInstance,
    count_hom_tractable,
    sur_via_configurations,
    sur_via_inclusion_exclusion,
    subset_sum_via_sur,
    surjections_count,
)

SUITES = ("decomposition", "interpolation", "formulas", "approx", "appendix")

# The ten connected subgraph classes of K_{2,3}. Vertices 0, 1 form the
# two-vertex side and 2, 3, 4 the three-vertex side.
K23_CLASSES = {
    1: [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)],
    2: [(0, 2), (0, 3), (1, 3), (1, 4), (0, 4)],
    3: [(0, 2), (0, 3), (1, 3), (1, 4)],
    4: [(0, 3), (1, 3), (1, 4), (0, 4)],
    5: [(0, 2), (0, 3), (1, 4), (0, 4)],
    6: [(0, 2), (0, 3), (0, 4)],
    7: [(0, 3), (0, 4), (1, 4)],
    8: [(0, 2), (0, 3)],
    9: [(0, 2)],
    10: [],
}

# Per class: (member class, multiplicity, weight) for every row of its table.
K23_TABLES = {
    10: [(10, 1, 1)],
    9: [(9, 1, 1), (10, 2, -2)],
    8: [(8, 1, 1), (9, 2, -2), (10, 3, 1)],
    7: [(7, 1, 1), (8, 2, -2), (9, 3, 1), (10, 4, 0)],
    6: [(6, 1, 1), (8, 3, -3), (9, 3, 3), (10, 4, -1)],
    5: [(5, 1, 1), (6, 1, -1), (7, 2, -2), (8, 4, 3), (9, 4, -1), (10, 5, 0)],
    4: [(4, 1, 1), (7, 4, -4), (8, 4, 4), (9, 4, 0), (10, 4, 0)],
    3: [(3, 1, 1), (7, 2, -2), (8, 3, 1), (9, 4, 0), (10, 5, 0)],
    2: [(2, 1, 1), (3, 2, -2), (4, 1, -1), (5, 2, -2), (6, 1, 1),
        (7, 6, 6), (8, 6, -3), (9, 5, 0), (10, 5, 0)],
    1: [(1, 1, 1), (2, 6, -6), (3, 6, 6), (4, 3, 3), (5, 6, 6),
        (6, 2, -2), (7, 12, -12), (8, 9, 3), (9, 6, 0), (10, 5, 0)],
}


def k23_class(i: int) -> Graph:
    """Class i on its own vertices, relabelled to 0..k-1."""
    edges = K23_CLASSES[i]
    used = sorted({x for e in edges for x in e}) or [0]
    pos = {v: j for j, v in enumerate(used)}
    return Graph.from_edges(len(used), [(pos[a], pos[b]) for a, b in edges])


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class SuiteResult:
    suite: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }


def _irreflexive_graphs(max_n: int, min_n: int = 0):
    for n in range(min_n, max_n + 1):
        yield from all_graphs(n, loops=False)


def _connected_inputs(max_n: int):
    for n in range(1, max_n + 1):
        yield from connected_graphs(n)


def _connected_targets(max_n: int):
    for n in range(1, max_n + 1):
        for H in all_graphs(n, loops=True):
            if H.is_connected:
                yield H


def _first_failure(pairs, fn):
    """Run fn over pairs; return (count, first mismatch or None)."""
    k = 0
    for args in pairs:
        k += 1
        bad = fn(*args)
        if bad:
            return k, bad
    return k, None


def suite_appendix(max_n: int | None = None, seed: int = 0) -> SuiteResult:
    res = SuiteResult("appendix")
    for i in sorted(K23_TABLES, reverse=True):
        table = build_table(k23_class(i))
        rows = K23_TABLES[i]
        wrong = []
        for j, mu, lam in rows:
            e = isomorphic_entry(table, k23_class(j))
            if (e.mu, e.lam) != (mu, lam):
                wrong.append(f"class {j}: got ({e.mu}, {e.lam}), want ({mu}, {lam})")
        if len(table.entries) != len(rows):
            wrong.append(f"{len(table.entries)} rows, want {len(rows)}")
        res.add(f"table of class {i}", not wrong, "; ".join(wrong))
    return res


def suite_decomposition(max_n: int | None = None, seed: int = 0) -> SuiteResult:
    max_n = 4 if max_n is None else max_n
    res = SuiteResult("decomposition")
    h_max = min(max_n, 4)

    def check(G, H):
        table = build_table(H)
        a = comp_via_decomposition(G, table)
        b = count_comp(G, H)
        c = comp_via_moebius(G, H)
        if not a == b == c:
            return f"G={G.edges} H={H.edges}: {a}, {b}, {c}"
        return None

    pairs = [(G, H) for G in _connected_inputs(max_n) for H in _connected_targets(h_max)]
    k, bad = _first_failure(pairs, check)
    res.add(f"decomposition = brute = moebius on {k} pairs", bad is None, bad or "")

    bad = []
    for H in _connected_targets(h_max):
        if not H.loops:
            continue
        for u, v in H.non_loop_edges:
            Hm = delete_edge(H, u, v)
            if Hm.is_connected and H.n == 3 and H.is_reflexive:
                w = build_table(H).weight(Hm)
                if w != -3:
                    bad.append(f"{H.edges}: {w}")
    res.add("reflexive triangle minus an edge has weight -3", not bad, "; ".join(bad))
    return res


def suite_interpolation(max_n: int | None = None, seed: int = 0) -> SuiteResult:
    max_n = 4 if max_n is None else max_n
    res = SuiteResult("interpolation")
    h_max = min(max_n, 3)
    targets = list(_connected_targets(h_max))
    inputs = list(_connected_inputs(max_n))

    def via_comp(G, H):
        tr = ReductionTrace()
        got = recover_hom_via_comp(G, H, count_comp, tr)
        want = count_hom(G, H)
        budget = comp_call_budget(G, H)
        if got != want or tr.count() != budget:
            return f"G={G.edges} H={H.edges}: {got} vs {want}, {tr.count()} calls"
        return None

    def via_sur(G, H):
        tr = ReductionTrace()
        got = recover_hom_via_sur(G, H, count_sur, tr)
        want = count_hom(G, H)
        if got != want or tr.count() != H.n + 1:
            return f"G={G.edges} H={H.edges}: {got} vs {want}, {tr.count()} calls"
        return None

    def strip(G, H):
        tr = ReductionTrace()
        got = strip_size1_interpolation(G, H, count_comp, tr)
        Hp, q, _ = size1_split(H)
        want = count_comp(G, Hp) if q else count_comp(G, H)
        if got != want or tr.count() != q + 1:
            return f"G={G.edges} H={H.edges}: {got} vs {want}"
        return None

    pairs = [(G, H) for G in inputs for H in targets]
    for name, fn in (("hom via compactions", via_comp), ("hom via surjections", via_sur),
                     ("size-1 stripping", strip)):
        k, bad = _first_failure(pairs, fn)
        res.add(f"{name} on {k} pairs", bad is None, bad or "")

    # targets with single-vertex components go through the stripping path
    padded = [Graph.from_edges(3, [(0, 1)]), Graph.from_edges(4, [(0, 1), (2, 2)]),
              Graph.from_edges(4, [(0, 1), (1, 2)])]
    pairs = [(G, H) for G in _irreflexive_graphs(min(max_n, 3), 1) for H in padded]

    def padded_hom(G, H):
        got = recover_hom_via_comp(G, H, count_comp)
        want = count_hom(G, H)
        return None if got == want else f"G={G.edges} H={H.edges}: {got} vs {want}"

    k, bad = _first_failure(pairs, padded_hom)
    res.add(f"hom via compactions with isolated targets on {k} pairs", bad is None, bad or "")

    H = complete_graph(3, reflexive=True)
    target = delete_edge(H, 0, 1)
    ws = WeightedGraphSet.from_table(build_table(H))
    bad = None
    k = 0
    for G in _connected_inputs(min(max_n, 4)):
        k += 1
        got, _ = hom_via_z_search(G, 0, ws, target, lambda X: count_comp(X, H))
        want = count_hom(G, target)
        if got != want:
            bad = f"G={G.edges}: {got} vs {want}"
            break
    res.add(f"weighted-sum recovery for the reflexive triangle on {k} inputs",
            bad is None, bad or "")
    return res


def _tractable_targets(max_n: int):
    for n in range(1, max_n + 1):
        for H in all_graphs(n, loops=True):
            if classify_exact(H).labels["hom"] == FP:
                yield H


def _random_lists(rng: random.Random, G: Graph, H: Graph) -> ListAssignment:
    return ListAssignment(tuple(
        frozenset(v for v in range(H.n) if rng.random() < 0.6) for _ in range(G.n)
    ))


def suite_formulas(max_n: int | None = None, seed: int = 0) -> SuiteResult:
    max_n = 5 if max_n is None else max_n
    res = SuiteResult("formulas")
    rng = random.Random(seed)
    h_max = min(max_n, 4)
    g_max = min(max_n, 4)

    def tractable(G, H):
        want = count_hom(G, H)
        got = count_hom_tractable(G, H)
        if got != want:
            return f"G={G.edges} H={H.edges}: {got} vs {want}"
        for _ in range(3):
            L = _random_lists(rng, G, H)
            a, b = count_hom_tractable(G, H, L), count_hom(G, H, L)
            if a != b:
                return f"G={G.edges} H={H.edges} lists={L.lists}: {a} vs {b}"
        return None

    pairs = [(G, H) for G in _irreflexive_graphs(g_max) for H in _tractable_targets(h_max)]
    k, bad = _first_failure(pairs, tractable)
    res.add(f"tractable formula = brute on {k} pairs", bad is None, bad or "")

    def sur_routes(G, H):
        want = count_sur(G, H)
        a = sur_via_inclusion_exclusion(G, H)
        b = sur_via_configurations(G, H)
        return None if a == b == want else f"G={G.edges} H={H.edges}: {a}, {b}, {want}"

    pairs = [(G, H) for G in _connected_inputs(min(max_n, 4))
             for H in _connected_targets(min(max_n, 3))]
    k, bad = _first_failure(pairs, sur_routes)
    res.add(f"surjection routes agree on {k} pairs", bad is None, bad or "")

    bad = []
    for t in range(7):
        for q in range(7):
            direct = sum(1 for f in product(range(q), repeat=t) if len(set(f)) == q)
            if surjections_count(t, q) != direct:
                bad.append(f"s({t},{q})")
            # the bound concerns a non-empty target and positive t
            if t >= 1 and q >= 1 and surjections_count(t, q) < q**t - 2**q * (q - 1) ** t:
                bad.append(f"bound({t},{q})")
    res.add("surjection numbers", not bad, " ".join(bad))

    bad = []
    for size in range(1, 4):
        for a in combinations_with_replacement(range(1, 6), size):
            if sum(a) > 8:
                continue
            for b in range(1, sum(a) + 1):
                inst = SubsetSumInstance(a, b)
                direct = sum(
                    1 for mask in range(1 << len(a))
                    if sum(x for i, x in enumerate(a) if mask >> i & 1) == b
                )
                if subset_sum_via_sur(inst, count_sur) != direct:
                    bad.append(f"{a},{b}")
    res.add("subset-sum bridge", not bad, " ".join(bad))

    bad = None
    for H in _tractable_targets(min(max_n, 3)):
        for G in _irreflexive_graphs(3, 1):
            for problem in ("hom", "shom", "comp"):
                value, method = count_problem(problem, G, H)
                brute = {"hom": count_hom, "shom": count_sur, "comp": count_comp}[problem](G, H)
                if value != brute:
                    bad = f"{problem} via {method}: G={G.edges} H={H.edges}"
                    break
            if bad:
                break
        if bad:
            break
    res.add("automatic routes match the brute oracle", bad is None, bad or "")
    return res


def suite_approx(max_n: int | None = None, seed: int = 0) -> SuiteResult:
    max_n = 3 if max_n is None else max_n
    res = SuiteResult("approx")
    targets = [H for H in _connected_targets(min(max_n, 3)) if H.n >= 1]
    inputs = list(_irreflexive_graphs(min(max_n, 3), 1))
    sur_est = exact_estimator(count_sur)
    comp_est = exact_estimator(count_comp)

    def floors(G, H):
        want = count_hom(G, H)
        a = ap_hom_via_sur(G, H, sur_est, "0.1")
        b = ap_hom_via_comp(G, H, comp_est, "0.1")
        c = hom_via_ret(G, H, count_ret)
        return None if a == b == c == want else f"G={G.edges} H={H.edges}: {a}, {b}, {c}, {want}"

    pairs = [(G, H) for G in inputs for H in targets]
    k, bad = _first_failure(pairs, floors)
    res.add(f"floor recovery with exact oracles on {k} pairs", bad is None, bad or "")

    G = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    H = complete_graph(3, reflexive=True)
    truth = count_comp(G, H)
    r1 = mc_estimate_comp(G, H, "0.2", "0.25", seed)
    r2 = mc_estimate_comp(G, H, "0.2", "0.25", seed)
    res.add("same seed gives the same estimate", r1 == r2)
    inside = abs(r1.value - truth) <= Fraction(1, 5) * truth
    res.add("estimate within 20% on a path into the reflexive triangle", inside,
            f"{float(r1.value):.4f} vs {truth}")
    try:
        mc_estimate_comp(G, complete_graph(3), "0.2", "0.25", seed)
        res.add("non-tractable target refused", False)
    except NotTractableError:
        res.add("non-tractable target refused", True)
    return res


RUNNERS = {
    "appendix": suite_appendix,
    "decomposition": suite_decomposition,
    "interpolation": suite_interpolation,
    "formulas": suite_formulas,
    "approx": suite_approx,
}


def run_suite(name: str, max_n: int | None = None, seed: int = 0) -> SuiteResult:
    if name not in RUNNERS:
        raise PreconditionError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    return RUNNERS[name](max_n, seed)
