"""Small undirected graphs with optional loops.

Vertices are always ``0..n-1``. Edges are stored as ordered pairs ``(u, v)``
with ``u <= v``; ``(u, u)`` is a loop. Instances are immutable and hashable,
so they can be used freely as dictionary keys and memoization keys.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import permutations
from typing import Iterable, Iterator, Sequence

from .errors import GraphFormatError, GraphTooLargeError, PreconditionError

CANONICAL_BOUND = 10


def _norm(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        normed = frozenset(_norm(int(u), int(v)) for u, v in self.edges)
        for u, v in normed:
            if u < 0 or v >= self.n:
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
        object.__setattr__(self, "edges", normed)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        """Build a graph, rejecting duplicate edges instead of merging them."""
        seen = set()
        for e in edges:
            if len(e) != 2:
                raise GraphFormatError(f"edge {e!r} does not have two endpoints")
            u, v = _norm(int(e[0]), int(e[1]))
            if u < 0 or v >= n:
                raise GraphFormatError(f"edge ({u}, {v}) out of range for n={n}")
            if (u, v) in seen:
                raise GraphFormatError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
        return cls(n, frozenset(seen))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={sorted(self.edges)})"

    # -- basic structure -------------------------------------------------

    @cached_property
    def loops(self) -> frozenset:
        return frozenset(u for u, v in self.edges if u == v)

    @cached_property
    def non_loop_edges(self) -> tuple:
        return tuple(sorted(e for e in self.edges if e[0] != e[1]))

    @cached_property
    def adj(self) -> tuple:
        """Neighbour sets; a looped vertex is its own neighbour."""
        nb = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nb[u].add(v)
            nb[v].add(u)
        return tuple(frozenset(s) for s in nb)

    @cached_property
    def adj_mask(self) -> tuple:
        return tuple(sum(1 << w for w in s) for s in self.adj)

    def has_edge(self, u: int, v: int) -> bool:
        return _norm(u, v) in self.edges

    def degree(self, v: int) -> int:
        """Number of non-loop neighbours."""
        return len(self.adj[v] - {v})

    @property
    def is_empty(self) -> bool:
        return self.n == 0

    @property
    def is_reflexive(self) -> bool:
        return len(self.loops) == self.n

    @property
    def is_irreflexive(self) -> bool:
        return not self.loops

    @cached_property
    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        return len(_component_of(self, 0)) == self.n

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in sorted(self.edges)]}


def _component_of(G: Graph, start: int) -> list[int]:
    seen = {start}
    order = [start]
    i = 0
    while i < len(order):
        u = order[i]
        i += 1
        for w in sorted(G.adj[u]):
            if w not in seen:
                seen.add(w)
                order.append(w)
    return order


# -- constructors ----------------------------------------------------------

def empty_graph(n: int = 0) -> Graph:
    return Graph(n)


def complete_graph(n: int, reflexive: bool = False) -> Graph:
    edges = {(i, j) for i in range(n) for j in range(i + 1, n)}
    if reflexive:
        edges |= {(i, i) for i in range(n)}
    return Graph(n, frozenset(edges))


def complete_bipartite(a: int, b: int) -> Graph:
    """Irreflexive K_{a,b}; left side is ``0..a-1``."""
    return Graph(a + b, frozenset((i, a + j) for i in range(a) for j in range(b)))


def star(leaves: int) -> Graph:
    return complete_bipartite(1, leaves)


def path_graph(n: int) -> Graph:
    """Path on ``n`` vertices."""
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycles need at least 3 vertices")
    return Graph(n, frozenset(_norm(i, (i + 1) % n) for i in range(n)))


def matching(t: int) -> Graph:
    """``t`` disjoint edges."""
    return Graph(2 * t, frozenset((2 * i, 2 * i + 1) for i in range(t)))


def reflexive_closure(G: Graph) -> Graph:
    return Graph(G.n, G.edges | {(v, v) for v in range(G.n)})


# -- operations ------------------------------------------------------------

def strip_loops(H: Graph) -> Graph:
    """The loop-free graph on the same vertex set."""
    if not H.loops:
        return H
    return Graph(H.n, frozenset(e for e in H.edges if e[0] != e[1]))


def disjoint_union(*graphs: Graph) -> Graph:
    n = 0
    edges = set()
    for g in graphs:
        edges.update((u + n, v + n) for u, v in g.edges)
        n += g.n
    return Graph(n, frozenset(edges))


def relabel(G: Graph, order: Sequence[int]) -> Graph:
    """Graph whose vertex ``i`` is ``order[i]`` of ``G``."""
    pos = {v: i for i, v in enumerate(order)}
    if len(pos) != G.n or set(pos) != set(range(G.n)):
        raise PreconditionError("relabel order must be a permutation")
    return Graph(G.n, frozenset(_norm(pos[u], pos[v]) for u, v in G.edges))


def induced_subgraph(G: Graph, vertices: Iterable[int]) -> tuple[Graph, tuple]:
    """Induced (loop-preserving) subgraph on ``vertices``.

    Returns the subgraph relabelled to ``0..k-1`` in sorted order together with
    the tuple mapping new labels back to ``G``.
    """
    vs = tuple(sorted(set(vertices)))
    pos = {v: i for i, v in enumerate(vs)}
    edges = frozenset(
        (pos[u], pos[v]) for u, v in G.edges if u in pos and v in pos
    )
    return Graph(len(vs), edges), vs


def delete_edge(G: Graph, u: int, v: int) -> Graph:
    e = _norm(u, v)
    if e not in G.edges:
        raise PreconditionError(f"edge {e} not present")
    return Graph(G.n, G.edges - {e})


def connected_components(G: Graph) -> list[tuple[Graph, tuple]]:
    """Components ordered by smallest original vertex.

    Each entry is ``(component, back)`` where ``back[i]`` is the vertex of
    ``G`` labelled ``i`` in the component. Vertices inside a component are
    labelled in increasing original order.
    """
    out = []
    seen = set()
    for s in range(G.n):
        if s in seen:
            continue
        comp = _component_of(G, s)
        seen.update(comp)
        out.append(induced_subgraph(G, comp))
    return out


def glue(G: Graph, v: int, J: Graph, u: int, copies: int) -> Graph:
    """Attach ``copies`` copies of ``J`` to ``G`` by identifying ``u`` with ``v``.

    ``G`` keeps its labels; the non-root vertices of copy ``c`` follow in
    increasing order.
    """
    edges = set(G.edges)
    n = G.n
    others = [x for x in range(J.n) if x != u]
    for _ in range(copies):
        lab = {u: v}
        for x in others:
            lab[x] = n
            n += 1
        edges.update(_norm(lab[a], lab[b]) for a, b in J.edges)
    return Graph(n, frozenset(edges))


@dataclass(frozen=True)
class VertexPartition:
    blocks: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "blocks", tuple(tuple(sorted(b)) for b in self.blocks)
        )

    def validate(self, n: int) -> None:
        seen = []
        for b in self.blocks:
            if not b:
                raise PreconditionError("partition blocks must be non-empty")
            seen.extend(b)
        if sorted(seen) != list(range(n)):
            raise PreconditionError("blocks must partition the vertex set")

    def block_of(self, v: int) -> int:
        for i, b in enumerate(self.blocks):
            if v in b:
                return i
        raise KeyError(v)


def quotient_graph(G: Graph, theta: VertexPartition) -> Graph:
    """One vertex per block, adjacency lifted from ``G``; intra-block edges
    become loops."""
    theta.validate(G.n)
    where = {}
    for i, b in enumerate(theta.blocks):
        for v in b:
            where[v] = i
    return Graph(
        len(theta.blocks),
        frozenset(_norm(where[u], where[v]) for u, v in G.edges),
    )


def set_partitions(items: Sequence[int]) -> Iterator[list[list[int]]]:
    """All set partitions of ``items`` (restricted growth order)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in set_partitions(rest):
        yield [[first]] + p
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]


# -- structure recognition ---------------------------------------------------

def bipartition(G: Graph):
    """2-colouring of the loop-stripped graph as ``(U, V)`` or ``None``."""
    color = {}
    for s in range(G.n):
        if s in color:
            continue
        color[s] = 0
        stack = [s]
        while stack:
            u = stack.pop()
            for w in G.adj[u]:
                if w == u:
                    continue
                if w not in color:
                    color[w] = 1 - color[u]
                    stack.append(w)
                elif color[w] == color[u]:
                    return None
    U = frozenset(v for v, c in color.items() if c == 0)
    V = frozenset(v for v, c in color.items() if c == 1)
    return U, V


@dataclass(frozen=True)
class StructureReport:
    connected: bool
    reflexive: bool
    irreflexive: bool
    is_reflexive_clique: bool
    is_irreflexive_biclique: bool
    is_irreflexive_star: bool
    bipartition: tuple | None
    sides_sizes: tuple | None
    size1_components: int

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        if self.bipartition is not None:
            d["bipartition"] = [sorted(s) for s in self.bipartition]
        if self.sides_sizes is not None:
            d["sides_sizes"] = list(self.sides_sizes)
        return d


def _is_clique(G: Graph) -> bool:
    return all(G.has_edge(u, v) for u in range(G.n) for v in range(u + 1, G.n))


def classify_structure(H: Graph) -> StructureReport:
    bp = bipartition(H)
    comps = connected_components(H)
    reflexive = H.is_reflexive
    irreflexive = H.is_irreflexive
    biclique = False
    sides = None
    if irreflexive:
        if not H.non_loop_edges:
            # K_{n,0}; a single vertex is the one-vertex star
            biclique = True
            sides = (0, H.n)
        elif H.is_connected and bp is not None:
            U, V = bp
            if len(H.non_loop_edges) == len(U) * len(V):
                biclique = True
                sides = tuple(sorted((len(U), len(V))))
    is_star = biclique and (sides[0] == 1 or sides[1] == 1)
    if bp is not None and not H.non_loop_edges and H.n == 1:
        bp = (frozenset(), frozenset({0}))
    return StructureReport(
        connected=H.is_connected,
        reflexive=reflexive,
        irreflexive=irreflexive,
        is_reflexive_clique=reflexive and _is_clique(H),
        is_irreflexive_biclique=biclique,
        is_irreflexive_star=is_star,
        bipartition=bp,
        sides_sizes=sides,
        size1_components=sum(1 for c, _ in comps if c.n == 1),
    )


def induced_copy_check(G: Graph, anchors: Sequence[int], H: Graph) -> bool:
    """Whether ``anchors`` induce a copy of ``H`` in ``G`` (loops ignored)."""
    if G.loops:
        raise PreconditionError("G must be irreflexive")
    if len(anchors) != H.n:
        raise PreconditionError(
            f"expected {H.n} anchors, got {len(anchors)}"
        )
    if len(set(anchors)) != len(anchors):
        raise PreconditionError("anchors must be distinct")
    for a in anchors:
        if not 0 <= a < G.n:
            raise PreconditionError(f"anchor {a} out of range")
    for a in range(H.n):
        for b in range(a + 1, H.n):
            if G.has_edge(anchors[a], anchors[b]) != H.has_edge(a, b):
                return False
    return True


# -- canonical forms -----------------------------------------------------------

def _refine(G: Graph, colors: list[int]) -> list[int]:
    """Colour refinement that keeps the order of existing cells."""
    ncol = len(set(colors))
    while True:
        sigs = [
            (colors[v], tuple(sorted(colors[w] for w in G.adj[v] if w != v)))
            for v in range(G.n)
        ]
        rank = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [rank[s] for s in sigs]
        if len(rank) == ncol:
            return new
        colors, ncol = new, len(rank)


def _twins(G: Graph, u: int, v: int) -> bool:
    return (u in G.adj[u]) == (v in G.adj[v]) and (
        G.adj[u] - {u, v} == G.adj[v] - {u, v}
    )


def _certificate(G: Graph, order: Sequence[int]) -> int:
    bits = 0
    for i, a in enumerate(order):
        bits = (bits << 1) | (a in G.adj[a])
    for i in range(len(order)):
        a = order[i]
        for j in range(i + 1, len(order)):
            bits = (bits << 1) | (order[j] in G.adj[a])
    return bits


def _canonical_search(G: Graph, colors: list[int]):
    best = None
    stack = [_refine(G, colors)]
    while stack:
        cols = stack.pop()
        counts = {}
        for c in cols:
            counts[c] = counts.get(c, 0) + 1
        split = min((c for c, k in counts.items() if k > 1), default=None)
        if split is None:
            order = sorted(range(G.n), key=cols.__getitem__)
            cert = _certificate(G, order)
            if best is None or cert < best[0]:
                best = (cert, order)
            continue
        cell = [v for v in range(G.n) if cols[v] == split]
        reps = []
        for v in cell:
            if not any(_twins(G, r, v) for r in reps):
                reps.append(v)
        for v in reps:
            new = [
                2 * c + (1 if c == split and x != v else 0)
                for x, c in enumerate(cols)
            ]
            stack.append(_refine(G, new))
    return best


def _check_bound(G: Graph, bound: int | None) -> None:
    bound = CANONICAL_BOUND if bound is None else bound
    if G.n > bound:
        raise GraphTooLargeError(
            f"graph has {G.n} vertices; canonicalization bound is {bound}"
        )


@lru_cache(maxsize=200_000)
def _canon(G: Graph, roots: tuple) -> tuple[bytes, tuple]:
    rank = {r: i for i, r in enumerate(roots)}
    init = [
        (rank.get(v, len(roots)), v in G.adj[v], G.degree(v)) for v in range(G.n)
    ]
    ranks = {s: i for i, s in enumerate(sorted(set(init)))}
    cert, order = _canonical_search(G, [ranks[s] for s in init]) if G.n else (0, [])
    nbits = G.n + G.n * (G.n - 1) // 2
    key = (
        G.n.to_bytes(2, "big")
        + bytes(roots and [len(roots)])
        + cert.to_bytes((nbits + 7) // 8, "big")
    )
    return key, tuple(order)


def canonical_form(G: Graph, roots: Sequence[int] = (), bound: int | None = None) -> bytes:
    """Isomorphism-class key; with ``roots``, the class of the rooted graph
    (isomorphisms must map ``roots[i]`` to ``roots[i]``)."""
    _check_bound(G, bound)
    return _canon(G, tuple(roots))[0]


def canonical_labeling(G: Graph, roots: Sequence[int] = (), bound: int | None = None) -> tuple:
    """Vertex order producing the canonical representative."""
    _check_bound(G, bound)
    return _canon(G, tuple(roots))[1]


def canonical_graph(G: Graph, bound: int | None = None) -> Graph:
    return relabel(G, canonical_labeling(G, bound=bound))


def is_isomorphic(G1: Graph, G2: Graph) -> bool:
    if G1.n != G2.n or len(G1.edges) != len(G2.edges):
        return False
    return canonical_form(G1) == canonical_form(G2)


def automorphism_orbits(H: Graph, bound: int | None = None) -> VertexPartition:
    """Orbits of Aut(H) on the vertices, ordered by smallest member."""
    _check_bound(H, bound)
    groups = {}
    for v in range(H.n):
        groups.setdefault(canonical_form(H, (v,)), []).append(v)
    return VertexPartition(tuple(sorted(groups.values())))


def automorphisms(H: Graph) -> Iterator[tuple]:
    """All automorphisms as image tuples, by backtracking."""
    n = H.n
    deg = [(v in H.adj[v], H.degree(v)) for v in range(n)]
    img = [None] * n
    used = [False] * n

    def go(i):
        if i == n:
            yield tuple(img)
            return
        for c in range(n):
            if used[c] or deg[c] != deg[i]:
                continue
            if all(H.has_edge(i, j) == H.has_edge(c, img[j]) for j in range(i)):
                img[i] = c
                used[c] = True
                yield from go(i + 1)
                used[c] = False
        img[i] = None

    yield from go(0)


def brute_isomorphic(G1: Graph, G2: Graph) -> bool:
    """Isomorphism by trying every permutation (test oracle)."""
    if G1.n != G2.n or len(G1.edges) != len(G2.edges):
        return False
    for p in permutations(range(G1.n)):
        if all(_norm(p[u], p[v]) in G2.edges for u, v in G1.edges):
            return True
    return False


# -- enumeration ---------------------------------------------------------------

@lru_cache(maxsize=None)
def _connected_classes(n: int) -> tuple:
    """Canonical representatives of connected irreflexive graphs on n vertices."""
    if n == 1:
        return (Graph(1),)
    found = {}
    for base in _connected_classes(n - 1):
        for mask in range(1, 1 << (n - 1)):
            extra = {(i, n - 1) for i in range(n - 1) if mask >> i & 1}
            g = Graph(n, base.edges | frozenset(extra))
            key = canonical_form(g)
            if key not in found:
                found[key] = canonical_graph(g)
    return tuple(found[k] for k in sorted(found))


def connected_graphs(n: int) -> tuple:
    """One irreflexive connected graph per isomorphism class, ``n`` vertices."""
    if n < 1:
        return ()
    if n > CANONICAL_BOUND:
        raise GraphTooLargeError(f"n={n} exceeds the canonicalization bound")
    return _connected_classes(n)


def enumerate_connected_graphs(max_n: int, constraint: str = "any") -> Iterator[tuple[Graph, int]]:
    """Rooted connected irreflexive graphs up to isomorphism.

    ``constraint`` is ``"any"`` or ``"bipartite-with-edge"``. Yields
    ``(graph, root)`` in nondecreasing vertex count, then canonical-key order.
    """
    if constraint not in ("any", "bipartite-with-edge"):
        raise PreconditionError(f"unknown constraint {constraint!r}")
    if max_n > CANONICAL_BOUND:
        raise GraphTooLargeError(f"max_n={max_n} exceeds the canonicalization bound")
    for n in range(1, max_n + 1):
        rooted = []
        for g in connected_graphs(n):
            if constraint == "bipartite-with-edge" and (
                not g.edges or bipartition(g) is None
            ):
                continue
            for orbit in automorphism_orbits(g).blocks:
                rooted.append((canonical_form(g, (orbit[0],)), g, orbit[0]))
        rooted.sort(key=lambda x: x[0])
        for _, g, r in rooted:
            yield g, r


def all_graphs(n: int, loops: bool = True) -> tuple:
    """One graph per isomorphism class on exactly ``n`` vertices (loops optional)."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    found = {}
    loop_range = range(1 << n) if loops else (0,)
    for em in range(1 << len(pairs)):
        base = {pairs[k] for k in range(len(pairs)) if em >> k & 1}
        for lm in loop_range:
            g = Graph(n, frozenset(base | {(v, v) for v in range(n) if lm >> v & 1}))
            key = canonical_form(g)
            if key not in found:
                found[key] = g
    return tuple(found[k] for k in sorted(found))


# -- text formats ---------------------------------------------------------------

def parse_graph(text: str) -> Graph:
    """Parse the edge-list format or the JSON format."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"invalid JSON: {exc}") from None
        return graph_from_obj(obj)
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "n" and len(parts) == 2:
            if n is not None:
                raise GraphFormatError(f"line {lineno}: repeated 'n' line")
            n = _int(parts[1], lineno)
            if n < 0:
                raise GraphFormatError(f"line {lineno}: negative vertex count")
        elif parts[0] == "e" and len(parts) == 3:
            if n is None:
                raise GraphFormatError(f"line {lineno}: edge before 'n' line")
            edges.append((_int(parts[1], lineno), _int(parts[2], lineno)))
        else:
            raise GraphFormatError(f"line {lineno}: cannot parse {raw!r}")
    if n is None:
        raise GraphFormatError("missing 'n <count>' line")
    return Graph.from_edges(n, edges)


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise GraphFormatError(f"line {lineno}: {tok!r} is not an integer") from None


def graph_from_obj(obj) -> Graph:
    if not isinstance(obj, dict) or "n" not in obj:
        raise GraphFormatError("graph JSON must be an object with 'n' and 'edges'")
    n = obj["n"]
    edges = obj.get("edges", [])
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise GraphFormatError("'n' must be a non-negative integer")
    if not isinstance(edges, list) or not all(
        isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)
        for e in edges
    ):
        raise GraphFormatError("'edges' must be a list of integer pairs")
    return Graph.from_edges(n, edges)


def to_edge_list(G: Graph) -> str:
    lines = [f"n {G.n}"] + [f"e {u} {v}" for u, v in sorted(G.edges)]
    return "\n".join(lines) + "\n"


def to_json(G: Graph) -> str:
    return json.dumps(G.to_dict())


def read_graph(path: str) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())
