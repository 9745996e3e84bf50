"""Interpolation reductions against pluggable exact oracles.

Each reduction modifies the input graph in a controlled way (padding with
isolated vertices or edges, gluing gadgets at a vertex), queries an oracle
for each modified graph, and solves a small linear system exactly.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Callable, Sequence

from .brute import count_anchored_hom, count_comp
from .decomposition import WeightedGraphSet, comp_via_moebius
from .errors import OracleError, PreconditionError, SearchExhaustedError
from .graph import (
    Graph,
    automorphism_orbits,
    bipartition,
    canonical_form,
    classify_structure,
    connected_components,
    disjoint_union,
    empty_graph,
    enumerate_connected_graphs,
    glue,
    induced_subgraph,
    matching,
    strip_loops,
    to_edge_list,
)
from .polyalgo import count_hom_tractable

Oracle = Callable[..., int]


def graph_digest(G: Graph) -> str:
    return hashlib.sha256(to_edge_list(G).encode()).hexdigest()[:16]


@dataclass
class ReductionTrace:
    """Every oracle call and every solved system of one reduction run."""

    calls: list = field(default_factory=list)
    systems: list = field(default_factory=list)

    def wrap(self, oracle: Oracle, label: str = "oracle") -> Oracle:
        def counted(G, *args, **kwargs):
            value = oracle(G, *args, **kwargs)
            self.calls.append({
                "oracle": label,
                "graph": graph_digest(G),
                "n": G.n,
                "edges": len(G.edges),
                "count": value,
            })
            return value

        return counted

    def count(self, label: str | None = None) -> int:
        if label is None:
            return len(self.calls)
        return sum(1 for c in self.calls if c["oracle"] == label)

    def to_dict(self) -> dict:
        return {
            "calls": [dict(c, count=str(c["count"])) for c in self.calls],
            "systems": [s.to_dict() for s in self.systems],
        }


@dataclass
class LinearSystem:
    """``a @ x = b`` with an integer matrix, solved exactly."""

    a: list
    b: list
    kind: str = "triangular"
    x: list | None = None

    def solve(self) -> list[int]:
        n = len(self.a)
        if len(self.b) != n or any(len(row) != n for row in self.a):
            raise PreconditionError("system must be square")
        if self.kind == "triangular":
            sol = self._forward()
        else:
            sol = self._eliminate()
        out = []
        for v in sol:
            if v.denominator != 1:
                raise OracleError(f"non-integral solution {v}; oracle answers are inconsistent")
            out.append(int(v))
        self.x = out
        return out

    def _forward(self) -> list[Fraction]:
        x: list[Fraction] = []
        for t, row in enumerate(self.a):
            if any(row[k] for k in range(t + 1, len(row))):
                raise PreconditionError("matrix is not lower triangular")
            if row[t] == 0:
                raise OracleError(f"zero diagonal entry in row {t}")
            acc = Fraction(self.b[t]) - sum(row[k] * x[k] for k in range(t))
            x.append(acc / row[t])
        return x

    def _eliminate(self) -> list[Fraction]:
        n = len(self.a)
        m = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(self.a, self.b)]
        for col in range(n):
            piv = next((r for r in range(col, n) if m[r][col] != 0), None)
            if piv is None:
                raise OracleError("singular system")
            m[col], m[piv] = m[piv], m[col]
            for r in range(n):
                if r != col and m[r][col] != 0:
                    f = m[r][col] / m[col][col]
                    m[r] = [a - f * b for a, b in zip(m[r], m[col])]
        return [m[i][n] / m[i][i] for i in range(n)]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "a": [[str(v) for v in row] for row in self.a],
            "b": [str(v) for v in self.b],
            "x": None if self.x is None else [str(v) for v in self.x],
        }


def _check_diagonal(a: list, expected: Callable[[int], int]) -> None:
    for t in range(len(a)):
        if a[t][t] != expected(t):
            raise AssertionError(f"diagonal entry {t} is {a[t][t]}, expected {expected(t)}")


def _trace(trace: ReductionTrace | None) -> ReductionTrace:
    return trace if trace is not None else ReductionTrace()


# -- padding helpers ----------------------------------------------------------------

def size1_split(H: Graph) -> tuple[Graph, int, int]:
    """H without its single-vertex components, how many were removed, and
    how many of those carried a loop."""
    keep = []
    q = looped = 0
    for C, back in connected_components(H):
        if C.n == 1:
            q += 1
            looped += bool(C.loops)
        else:
            keep.extend(back)
    Hp, _ = induced_subgraph(H, keep)
    return Hp, q, looped


def isolated_cover_count(i: int, t: int, n_targets: int) -> int:
    """Maps of t isolated vertices into n_targets vertices hitting i fixed ones."""
    return sum((-1) ** j * comb(i, j) * (n_targets - j) ** t for j in range(i + 1))


def edge_cover_count(k: int, t: int, e_h: int) -> int:
    """Maps of t disjoint edges onto a graph with e_h oriented edge images
    (two per non-loop edge, one per loop) using k fixed non-loop edges."""
    return sum((-1) ** j * comb(k, j) * (e_h - 2 * j) ** t for j in range(k + 1))


# -- reductions ------------------------------------------------------------------------

def strip_size1_interpolation(G: Graph, H: Graph, comp_oracle: Oracle,
                              trace: ReductionTrace | None = None) -> int:
    """comp(G -> H') where H' drops the single-vertex components of H, from
    comp oracle calls on G plus t isolated vertices, t = 0..q."""
    tr = _trace(trace)
    oracle = tr.wrap(comp_oracle, "comp")
    Hp, q, _ = size1_split(H)
    if q == 0:
        return oracle(G, H)
    a = [[isolated_cover_count(i, t, H.n) for i in range(q + 1)] for t in range(q + 1)]
    _check_diagonal(a, factorial)
    b = [oracle(disjoint_union(G, empty_graph(t)), H) for t in range(q + 1)]
    system = LinearSystem(a, b)
    x = system.solve()
    tr.systems.append(system)
    return x[q]


def _hom_via_edge_padding(G: Graph, H: Graph, comp_oracle: Oracle, tr: ReductionTrace) -> int:
    """hom(G -> H) for H without single-vertex components, from comp calls
    on G plus t disjoint edges, t = 0..r."""
    r = len(H.non_loop_edges)
    e_h = 2 * r + len(H.loops)
    a = [[edge_cover_count(k, t, e_h) for k in range(r + 1)] for t in range(r + 1)]
    _check_diagonal(a, lambda t: 2**t * factorial(t))
    b = [comp_oracle(disjoint_union(G, matching(t)), H) for t in range(r + 1)]
    system = LinearSystem(a, b)
    x = system.solve()
    tr.systems.append(system)
    return sum(x)


def recover_hom_via_comp(G: Graph, H: Graph, comp_oracle: Oracle,
                         trace: ReductionTrace | None = None) -> int:
    """hom(G -> H) from a compaction oracle for H.

    Without single-vertex components in H this takes r+1 calls. Otherwise
    each distinct component C of G is handled separately: hom(C -> H') comes
    from the edge padding run against compactions onto H', each of which is
    itself recovered by stripping, and C may instead land on a single-vertex
    component of H (any of them if C is a vertex, only looped ones else).
    """
    tr = _trace(trace)
    Hp, q, looped = size1_split(H)
    if q == 0:
        return _hom_via_edge_padding(G, H, tr.wrap(comp_oracle, "comp"), tr)

    def comp_to_stripped(X, _Hp):
        return strip_size1_interpolation(X, H, comp_oracle, tr)

    cache: dict = {}
    total = 1
    for C, _ in connected_components(G):
        if C not in cache:
            inner = _hom_via_edge_padding(C, Hp, comp_to_stripped, tr)
            cache[C] = inner + (q if C.n == 1 else looped)
        total *= cache[C]
    return total


def comp_call_budget(G: Graph, H: Graph) -> int:
    """Oracle calls made by recover_hom_via_comp on (G, H)."""
    Hp, q, _ = size1_split(H)
    if q == 0:
        return len(H.non_loop_edges) + 1
    distinct = {C for C, _ in connected_components(G)}
    return len(distinct) * (q + 1) * (len(Hp.non_loop_edges) + 1)


def recover_hom_via_sur(G: Graph, H: Graph, sur_oracle: Oracle,
                        trace: ReductionTrace | None = None) -> int:
    """hom(G -> H) from q+1 surjection counts, q = |V(H)|."""
    tr = _trace(trace)
    oracle = tr.wrap(sur_oracle, "sur")
    q = H.n
    a = [[isolated_cover_count(k, t, q) for k in range(q + 1)] for t in range(q + 1)]
    _check_diagonal(a, factorial)
    b = [oracle(disjoint_union(G, empty_graph(t)), H) for t in range(q + 1)]
    system = LinearSystem(a, b)
    x = system.solve()
    tr.systems.append(system)
    return sum(x)


def replacement_choice(H: Graph) -> tuple[Graph, int, Graph, bool]:
    """Pick the component J to replace.

    Returns (J, k, H minus J, reflexive case). Reflexive components of the
    largest non-star size win; otherwise the bicliques of that size with the
    most edges.
    """
    comps = connected_components(H)
    info = []
    for C, back in comps:
        rep = classify_structure(C)
        if not (rep.is_reflexive_clique or rep.is_irreflexive_biclique):
            raise PreconditionError(
                "every component must be a reflexive clique or an irreflexive biclique"
            )
        info.append((C, back, rep))
    non_star = [x for x in info if not x[2].is_irreflexive_star]
    if not non_star:
        raise PreconditionError("every component is an irreflexive star; nothing to replace")
    j = max(x[0].n for x in non_star)
    refl = [x for x in non_star if x[0].n == j and x[2].reflexive]
    if refl:
        pool, reflexive_case = refl, True
    else:
        bic = [x for x in non_star if x[0].n == j]
        most = max(len(x[0].edges) for x in bic)
        pool, reflexive_case = [x for x in bic if len(x[0].edges) == most], False
    J, back, _ = pool[0]
    rest = [v for v in range(H.n) if v not in set(back)]
    rest_graph, _ = induced_subgraph(H, rest)
    return J, len(pool), rest_graph, reflexive_case


def component_replacement_count(G: Graph, H: Graph, comp_oracle: Oracle,
                                trace: ReductionTrace | None = None) -> tuple[Graph, int]:
    """(J, comp(G -> J)) for a suitable component J of H, using one
    compaction query on H with J swapped out for G."""
    if G.loops or G.n == 0 or not G.is_connected:
        raise PreconditionError("G must be connected, non-empty and irreflexive")
    tr = _trace(trace)
    oracle = tr.wrap(comp_oracle, "comp")
    if H.is_connected:
        replacement_choice(H)  # validates the component class
        return H, oracle(G, H)
    J, k, rest, reflexive_case = replacement_choice(H)
    if reflexive_case and J.n <= 2:
        # the replacement identity needs size >= 3; small cliques are tractable
        return J, comp_via_moebius(G, J, None, count_hom_tractable)
    Gp = strip_loops(disjoint_union(rest, G))
    whole = oracle(Gp, H)
    const = count_comp(strip_loops(rest), rest)
    d = k * const
    if d == 0 or whole % d:
        raise OracleError(f"oracle answer {whole} not divisible by {d}")
    return J, whole // d


# -- distinguishers and Vandermonde recovery -----------------------------------------------

@dataclass(frozen=True)
class Distinguisher:
    g: Graph
    v: int
    scores: tuple

    def __post_init__(self):
        if len(set(self.scores)) != len(self.scores):
            raise PreconditionError("distinguisher scores must be pairwise distinct")


def _check_targets(targets: Sequence[tuple[Graph, int]], mode: str) -> None:
    if mode not in ("reflexive", "bipartite"):
        raise PreconditionError(f"unknown mode {mode!r}")
    keys = set()
    for Hi, w in targets:
        if not Hi.is_connected:
            raise PreconditionError("targets must be connected")
        if mode == "reflexive" and not Hi.is_reflexive:
            raise PreconditionError("reflexive mode needs reflexive targets")
        if mode == "bipartite" and (
            Hi.loops or not Hi.edges or bipartition(Hi) is None
        ):
            raise PreconditionError(
                "bipartite mode needs irreflexive bipartite targets with an edge"
            )
        k = canonical_form(Hi, (w,))
        if k in keys:
            raise PreconditionError("targets must be pairwise non-isomorphic as rooted graphs")
        keys.add(k)


def anchored_scores(g: Graph, v: int, targets: Sequence[tuple[Graph, int]]) -> tuple:
    return tuple(count_anchored_hom(g, v, Hi, w) for Hi, w in targets)


def distinguisher_search(targets: Sequence[tuple[Graph, int]], mode: str,
                         max_n: int = 6) -> Distinguisher:
    """First rooted connected irreflexive graph (bipartite with an edge in
    bipartite mode) whose anchored hom counts to the targets are distinct."""
    _check_targets(targets, mode)
    constraint = "any" if mode == "reflexive" else "bipartite-with-edge"
    for g, v in enumerate_connected_graphs(max_n, constraint):
        scores = anchored_scores(g, v, targets)
        if len(set(scores)) == len(scores):
            return Distinguisher(g, v, scores)
    raise SearchExhaustedError(
        f"no separating rooted graph with at most {max_n} vertices; "
        "a larger bound may still succeed"
    )


def orbit_targets(ws: WeightedGraphSet, drop_single_vertex: bool):
    """(member index, member, orbit representative, orbit size) for every
    nonzero-weight member and every orbit of its automorphism group."""
    out = []
    for i, (J, w) in enumerate(zip(ws.members, ws.weights)):
        if not w or (drop_single_vertex and J.n == 1 and not J.loops):
            continue
        for orbit in automorphism_orbits(J).blocks:
            out.append((i, J, orbit[0], len(orbit)))
    return out


def _mode_of(ws: WeightedGraphSet) -> str:
    members = [J for J, w in ws.nonzero()]
    if all(J.is_reflexive for J in members):
        return "reflexive"
    if all(not J.loops and bipartition(J) is not None for J in members):
        return "bipartite"
    raise PreconditionError("members must be all reflexive or all irreflexive bipartite")


def recover_hom_via_z(G: Graph, v: int, ws: WeightedGraphSet, target: Graph,
                      z_oracle: Oracle, d: Distinguisher,
                      trace: ReductionTrace | None = None) -> int:
    """hom(G -> target) from weighted-sum queries on G with t copies of the
    distinguisher glued at v, t = 0..r."""
    if G.loops or G.n == 0 or not G.is_connected:
        raise PreconditionError("G must be connected, non-empty and irreflexive")
    if not 0 <= v < G.n:
        raise PreconditionError(f"vertex {v} out of range")
    tr = _trace(trace)
    oracle = tr.wrap(z_oracle, "z")
    mode = _mode_of(ws)
    tkey = canonical_form(target)
    idx = next((i for i, k in enumerate(ws.keys) if k == tkey), None)
    if idx is None or ws.weights[idx] == 0:
        raise PreconditionError("target must be a member with nonzero weight")
    if target.n == 1 and not target.loops:
        return 1 if not G.edges else 0

    bip = mode == "bipartite"
    k1_weight = 0
    if bip:
        k1_weight = sum(w for J, w in ws.nonzero() if J.n == 1)
    rooted = orbit_targets(ws, drop_single_vertex=bip)
    scores = anchored_scores(d.g, d.v, [(J, w) for _, J, w, _ in rooted])
    if len(set(scores)) != len(scores):
        raise PreconditionError("distinguisher does not separate the orbit targets")

    r = len(rooted) - 1
    lam = [size * ws.weights[i] for i, _, _, size in rooted]
    a = [[lam[c] * scores[c] ** t for c in range(r + 1)] for t in range(r + 1)]
    b = []
    for t in range(r + 1):
        Gt = glue(G, v, d.g, d.v, t)
        z = oracle(Gt)
        if k1_weight:
            z -= k1_weight * (0 if Gt.edges else 1)
        b.append(z)
    system = LinearSystem(a, b, kind="vandermonde")
    x = system.solve()
    tr.systems.append(system)
    return sum(size * x[c] for c, (i, _, _, size) in enumerate(rooted) if i == idx)


def hom_via_z_search(G: Graph, v: int, ws: WeightedGraphSet, target: Graph,
                     z_oracle: Oracle, max_n: int = 6,
                     trace: ReductionTrace | None = None) -> tuple[int, Distinguisher]:
    """Search for a distinguisher, then run the Vandermonde recovery."""
    mode = _mode_of(ws)
    rooted = orbit_targets(ws, drop_single_vertex=mode == "bipartite")
    d = distinguisher_search([(J, w) for _, J, w, _ in rooted], mode, max_n)
    return recover_hom_via_z(G, v, ws, target, z_oracle, d, trace), d
