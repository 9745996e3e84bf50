"""Subgraph decomposition of compaction counts.

For a connected target H, every homomorphism from a connected G is a
compaction onto exactly one connected loop-hereditary subgraph of H (its
image). Inverting that relation over the isomorphism classes of such
subgraphs gives integer weights ``lam`` with

    comp(G -> H) = sum over classes J of lam(J) * hom(G -> J).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .brute import count_hom, normalize_lists, restrict_lists
from .errors import GraphTooLargeError, PreconditionError
from .graph import Graph, canonical_form, canonical_graph, delete_edge, is_isomorphic

DECOMPOSITION_BOUND = 8

Solver = Callable[..., int]


def _is_connected_mask(vmask: int, emask: int, edges: tuple) -> bool:
    if not vmask:
        return False
    adj = {}
    for k, (a, b) in enumerate(edges):
        if emask >> k & 1:
            adj[a] = adj.get(a, 0) | 1 << b
            adj[b] = adj.get(b, 0) | 1 << a
    start = vmask & -vmask
    seen = start
    frontier = start
    while frontier:
        low = frontier & -frontier
        frontier ^= low
        nb = adj.get(low.bit_length() - 1, 0) & ~seen
        seen |= nb
        frontier |= nb
    return seen == vmask


def _subgraph(H: Graph, vmask: int, emask: int) -> Graph:
    """Loop-hereditary subgraph on ``vmask`` with the chosen non-loop edges,
    relabelled in increasing vertex order."""
    verts = [v for v in range(H.n) if vmask >> v & 1]
    pos = {v: i for i, v in enumerate(verts)}
    edges = {(pos[v], pos[v]) for v in verts if v in H.loops}
    for k, (a, b) in enumerate(H.non_loop_edges):
        if emask >> k & 1:
            edges.add((pos[a], pos[b]))
    return Graph(len(verts), frozenset(edges))


def _induced_edge_mask(H: Graph, vmask: int) -> int:
    m = 0
    for k, (a, b) in enumerate(H.non_loop_edges):
        if vmask >> a & 1 and vmask >> b & 1:
            m |= 1 << k
    return m


def _submasks(m: int) -> Iterator[int]:
    s = m
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & m


def loop_hereditary_masks(H: Graph, connected: bool) -> list[tuple[int, int]]:
    """All non-empty loop-hereditary subgraphs of H as (vertex mask, edge mask)."""
    out = []
    edges = H.non_loop_edges
    for vmask in range(1, 1 << H.n):
        full = _induced_edge_mask(H, vmask)
        for emask in _submasks(full):
            if not connected or _is_connected_mask(vmask, emask, edges):
                out.append((vmask, emask))
    return out


def _check_target(H: Graph, bound: int | None) -> None:
    bound = DECOMPOSITION_BOUND if bound is None else bound
    if H.n == 0:
        raise PreconditionError("target must be non-empty")
    if not H.is_connected:
        raise PreconditionError("target must be connected")
    if H.n > bound:
        raise GraphTooLargeError(
            f"target has {H.n} vertices; decomposition bound is {bound}"
        )


def enumerate_sub(H: Graph, bound: int | None = None) -> list[Graph]:
    """Every non-empty, connected, loop-hereditary subgraph of H (labelled
    copies, each relabelled to 0..k-1)."""
    _check_target(H, bound)
    return [_subgraph(H, v, e) for v, e in loop_hereditary_masks(H, connected=True)]


@dataclass(frozen=True)
class TableEntry:
    graph: Graph
    key: bytes
    mu: int
    lam: int

    def to_dict(self) -> dict:
        return {
            "graph": self.graph.to_dict(),
            "key": self.key.hex(),
            "mu": self.mu,
            "lambda": self.lam,
        }


@dataclass(frozen=True)
class DecompositionTable:
    target: Graph
    entries: tuple

    def weight(self, J: Graph) -> int:
        """lam of the class of J, 0 when J is not a member."""
        key = canonical_form(J)
        for e in self.entries:
            if e.key == key:
                return e.lam
        return 0

    def entry_for(self, J: Graph) -> TableEntry | None:
        key = canonical_form(J)
        return next((e for e in self.entries if e.key == key), None)

    def to_dict(self) -> dict:
        return {
            "target": self.target.to_dict(),
            "entries": [e.to_dict() for e in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_text(self) -> str:
        rows = [("#", "n", "|E|", "mu", "lambda", "edges")]
        for i, e in enumerate(self.entries, 1):
            rows.append((
                str(i),
                str(e.graph.n),
                str(len(e.graph.edges)),
                str(e.mu),
                str(e.lam),
                " ".join(f"{u}-{v}" for u, v in sorted(e.graph.edges)) or "-",
            ))
        widths = [max(len(r[c]) for r in rows) for c in range(5)]
        lines = []
        for r in rows:
            cells = [r[c].rjust(widths[c]) for c in range(5)]
            lines.append("  ".join(cells + [r[5]]))
        return "\n".join(lines) + "\n"


# Tables keyed by canonical form of the target; the recursion for lam
# reuses the tables of every smaller member.
_tables: dict[bytes, tuple] = {}


def _classes(H: Graph, bound: int | None):
    counts: dict[bytes, int] = {}
    reps: dict[bytes, Graph] = {}
    for J in enumerate_sub(H, bound):
        k = canonical_form(J)
        counts[k] = counts.get(k, 0) + 1
        if k not in reps:
            reps[k] = canonical_graph(J)
    return counts, reps


def _raw_table(H: Graph, bound: int | None) -> tuple:
    """(target key, [(key, rep, mu)], {key: lam}) memoized by class."""
    hkey = canonical_form(H)
    hit = _tables.get(hkey)
    if hit is not None:
        return hit
    counts, reps = _classes(H, bound)
    lam = {hkey: 1}
    for k, rep in reps.items():
        if k == hkey:
            continue
        sub_lam = _raw_table(rep, bound)[2]
        for j, v in sub_lam.items():
            lam[j] = lam.get(j, 0) - counts[k] * v
    rows = [(k, reps[k], counts[k]) for k in reps]
    rows.sort(key=lambda r: (-r[1].n, -len(r[1].edges), r[0]))
    _tables[hkey] = (hkey, rows, lam)
    return _tables[hkey]


def build_table(H: Graph, bound: int | None = None) -> DecompositionTable:
    """Isomorphism classes of connected loop-hereditary subgraphs of H with
    their multiplicities and signed weights."""
    _check_target(H, bound)
    _, rows, lam = _raw_table(H, bound)
    entries = tuple(TableEntry(rep, k, mu, lam.get(k, 0)) for k, rep, mu in rows)
    return DecompositionTable(H, entries)


def clear_table_cache() -> None:
    _tables.clear()


@dataclass(frozen=True)
class WeightedGraphSet:
    members: tuple
    weights: tuple
    keys: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if len(self.members) != len(self.weights):
            raise PreconditionError("one weight per member required")
        keys = []
        for J in self.members:
            if J.n == 0 or not J.is_connected:
                raise PreconditionError("members must be non-empty and connected")
            keys.append(canonical_form(J))
        if len(set(keys)) != len(keys):
            raise PreconditionError("members must be pairwise non-isomorphic")
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(self, "keys", tuple(keys))

    @classmethod
    def from_table(cls, table: DecompositionTable) -> "WeightedGraphSet":
        return cls(
            tuple(e.graph for e in table.entries),
            tuple(e.lam for e in table.entries),
        )

    def nonzero(self) -> list[tuple[Graph, int]]:
        return [(J, w) for J, w in zip(self.members, self.weights) if w]


def _require_connected_input(G: Graph) -> None:
    if G.loops:
        raise PreconditionError("input graph G must be irreflexive")
    if G.n == 0 or not G.is_connected:
        raise PreconditionError("input graph G must be non-empty and connected")


def comp_via_decomposition(G: Graph, table: DecompositionTable, hom_solver: Solver = count_hom) -> int:
    """Compactions from a connected G as a signed sum of hom counts."""
    _require_connected_input(G)
    return sum(e.lam * hom_solver(G, e.graph) for e in table.entries if e.lam)


def z_value(ws: WeightedGraphSet, G: Graph, hom_solver: Solver = count_hom) -> int:
    """Weighted hom sum over the members; 0 on the empty graph."""
    if G.n == 0:
        return 0
    if G.loops or not G.is_connected:
        raise PreconditionError("input graph G must be connected and irreflexive")
    return sum(w * hom_solver(G, J) for J, w in ws.nonzero())


def comp_via_moebius(G: Graph, H: Graph, lists=None, hom_solver: Solver = count_hom) -> int:
    """List compactions by inverting hom over all loop-hereditary subgraphs.

    hom(G -> H') is the sum of comp(G -> K) over the loop-hereditary
    subgraphs K of H' (the image of a homomorphism is one of them), so the
    compaction counts follow bottom-up. H may be disconnected.
    """
    if G.loops:
        raise PreconditionError("input graph G must be irreflexive")
    S = normalize_lists(lists, G, H)
    if G.n == 0:
        return 1 if H.n == 0 else 0
    if H.n == 0:
        return 0
    full = all(len(s) == H.n for s in S)
    states = loop_hereditary_masks(H, connected=False)
    states.sort(key=lambda s: (bin(s[0]).count("1") + bin(s[1]).count("1"), s))
    hom_cache: dict = {}
    comp: dict = {}
    for vmask, emask in states:
        J = _subgraph(H, vmask, emask)
        if full:
            key = canonical_form(J, bound=max(H.n, 10))
        else:
            key = (vmask, emask)
        if key not in hom_cache:
            keep = [v for v in range(H.n) if vmask >> v & 1]
            hom_cache[key] = hom_solver(G, J, restrict_lists(S, keep))
        value = hom_cache[key]
        for (kv, ke), c in comp.items():
            if c and kv & vmask == kv and ke & emask == ke:
                value -= c
        comp[(vmask, emask)] = value
    return comp[(1 << H.n) - 1, _induced_edge_mask(H, (1 << H.n) - 1)]


def edge_deleted_weight_check(H: Graph, bound: int | None = None) -> list[tuple[tuple, int]]:
    """For each non-loop edge whose removal keeps H connected, the weight of
    the edge-deleted graph in the table of H."""
    table = build_table(H, bound)
    out = []
    for u, v in H.non_loop_edges:
        Hm = delete_edge(H, u, v)
        if Hm.is_connected:
            out.append(((u, v), table.weight(Hm)))
    if not out:
        raise PreconditionError("no non-loop edge can be deleted keeping H connected")
    return out


def isomorphic_entry(table: DecompositionTable, J: Graph) -> TableEntry:
    for e in table.entries:
        if is_isomorphic(e.graph, J):
            return e
    raise KeyError("no entry isomorphic to the given graph")
