"""Definition-level exhaustive counters.

These are the ground-truth oracles. Every count enumerates maps vertex by
vertex (BFS order inside each component of G so edge constraints prune
early). Counts over a disconnected G are assembled from per-component
enumerations: homomorphism counts multiply, and for surjections and
compactions each component contributes a table of image profiles
(vertices hit, non-loop edges hit) that is combined by OR-convolution.
"""

from __future__ import annotations

import json
import os
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    BudgetExceededError,
    GraphFormatError,
    InvalidInstanceError,
    PreconditionError,
)
from .graph import Graph, connected_components, induced_copy_check

DEFAULT_BUDGET = 10**10


def _initial_budget() -> int:
    raw = os.environ.get("SURJCOUNT_BUDGET")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_BUDGET


_budget = _initial_budget()


def get_budget() -> int:
    return _budget


def set_budget(nodes: int) -> None:
    global _budget
    if nodes < 1:
        raise PreconditionError("budget must be positive")
    _budget = int(nodes)


@contextmanager
def budget(nodes: int):
    old = _budget
    set_budget(nodes)
    try:
        yield
    finally:
        set_budget(old)


# -- list assignments ----------------------------------------------------------

@dataclass(frozen=True)
class ListAssignment:
    """Allowed targets per G-vertex. ``None`` entries mean the full list."""

    lists: tuple

    @classmethod
    def full(cls, n: int) -> "ListAssignment":
        return cls((None,) * n)

    @classmethod
    def from_json(cls, text: str, n: int) -> "ListAssignment":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"invalid lists JSON: {exc}") from None
        if not isinstance(obj, dict) or not isinstance(obj.get("lists"), dict):
            raise GraphFormatError('lists JSON must look like {"lists": {...}}')
        out = [None] * n
        for k, v in obj["lists"].items():
            try:
                idx = int(k)
            except ValueError:
                raise GraphFormatError(f"list key {k!r} is not a vertex") from None
            if not 0 <= idx < n:
                raise GraphFormatError(f"list key {idx} out of range")
            if not isinstance(v, list) or not all(isinstance(x, int) for x in v):
                raise GraphFormatError(f"list for vertex {idx} must be integers")
            out[idx] = frozenset(v)
        return cls(tuple(out))

    def to_json(self) -> str:
        return json.dumps(
            {"lists": {str(i): sorted(s) for i, s in enumerate(self.lists) if s is not None}}
        )


def normalize_lists(lists, G: Graph, H: Graph) -> tuple:
    """Return a tuple of frozensets, one per G-vertex (full lists expanded)."""
    full = frozenset(range(H.n))
    if lists is None:
        return (full,) * G.n
    if isinstance(lists, ListAssignment):
        lists = lists.lists
    if isinstance(lists, Mapping):
        seq = [lists.get(v) for v in range(G.n)]
        extra = set(lists) - set(range(G.n))
        if extra:
            raise PreconditionError(f"lists mention non-vertices {sorted(extra)}")
    else:
        seq = list(lists)
        if len(seq) != G.n:
            raise PreconditionError(
                f"expected {G.n} lists, got {len(seq)}"
            )
    out = []
    for v, s in enumerate(seq):
        if s is None:
            out.append(full)
            continue
        s = frozenset(s)
        bad = [x for x in s if not 0 <= x < H.n]
        if bad:
            raise PreconditionError(
                f"list of vertex {v} references targets {sorted(bad)} outside V(H)"
            )
        out.append(s)
    return tuple(out)


def restrict_lists(lists: tuple, keep: Sequence[int]) -> tuple:
    """Intersect lists with ``keep`` and relabel to positions in ``keep``."""
    pos = {x: i for i, x in enumerate(keep)}
    return tuple(frozenset(pos[x] for x in s if x in pos) for s in lists)


def _mask(s: Iterable[int]) -> int:
    m = 0
    for x in s:
        m |= 1 << x
    return m


# -- core enumeration ------------------------------------------------------------

def _bfs_order(C: Graph) -> list[int]:
    order = [0] if C.n else []
    seen = {0}
    i = 0
    while i < len(order):
        u = order[i]
        i += 1
        for w in sorted(C.adj[u]):
            if w not in seen:
                seen.add(w)
                order.append(w)
    return order


def _component_plan(C: Graph, masks: Sequence[int], H: Graph):
    """Per position: (vertex, list mask, earlier neighbour positions, needs loop)."""
    order = _bfs_order(C)
    pos = {v: i for i, v in enumerate(order)}
    plan = []
    for i, v in enumerate(order):
        back = tuple(pos[w] for w in C.adj[v] if w != v and pos[w] < i)
        plan.append((v, masks[v], back, v in C.adj[v]))
    return plan


def _check_budget(nodes: int) -> None:
    if nodes > _budget:
        raise BudgetExceededError(
            f"exhaustive enumeration needs up to {nodes} nodes; budget is {_budget}"
        )


def _node_bound(masks: Sequence[int]) -> int:
    total = 1
    for m in masks:
        total *= bin(m).count("1")
    return total


def _hom_component(C: Graph, masks: Sequence[int], H: Graph) -> int:
    if C.n == 0:
        return 1
    loopmask = _mask(H.loops)
    plan = _component_plan(C, masks, H)
    hadj = H.adj_mask
    img = [0] * C.n
    last = C.n - 1

    def cand(i):
        _, m, back, loop = plan[i]
        for j in back:
            m &= hadj[img[j]]
        if loop:
            m &= loopmask
        return m

    def go(i):
        m = cand(i)
        if i == last:
            return bin(m).count("1")
        total = 0
        while m:
            low = m & -m
            img[i] = low.bit_length() - 1
            total += go(i + 1)
            m ^= low
        return total

    return go(0)


def _edge_index(H: Graph) -> dict:
    idx = {}
    for k, (a, b) in enumerate(H.non_loop_edges):
        idx[(a, b)] = k
        idx[(b, a)] = k
    return idx


def _profile_component(C: Graph, masks: Sequence[int], H: Graph, track_edges: bool) -> Counter:
    """Counter of (vertex image mask, non-loop edge image mask) over all list
    homomorphisms of the component C."""
    out = Counter()
    if C.n == 0:
        out[(0, 0)] = 1
        return out
    loopmask = _mask(H.loops)
    plan = _component_plan(C, masks, H)
    hadj = H.adj_mask
    eidx = _edge_index(H)
    img = [0] * C.n
    last = C.n - 1

    def go(i, vm, em):
        _, m, back, loop = plan[i]
        for j in back:
            m &= hadj[img[j]]
        if loop:
            m &= loopmask
        while m:
            low = m & -m
            x = low.bit_length() - 1
            e2 = em
            if track_edges:
                for j in back:
                    y = img[j]
                    if y != x:
                        e2 |= 1 << eidx[(x, y)]
            if i == last:
                out[(vm | low, e2)] += 1
            else:
                img[i] = x
                go(i + 1, vm | low, e2)
            m ^= low

    go(0, 0, 0)
    return out


def _or_convolve(a: Counter, b: Counter) -> Counter:
    out = Counter()
    for (va, ea), ca in a.items():
        for (vb, eb), cb in b.items():
            out[(va | vb, ea | eb)] += ca * cb
    return out


def _split(G: Graph, lists: tuple):
    """Components of G with their relabelled list masks."""
    parts = []
    for C, back in connected_components(G):
        parts.append((C, tuple(_mask(lists[v]) for v in back)))
    return parts


def _require_irreflexive(G: Graph) -> None:
    if G.loops:
        raise PreconditionError("input graph G must be irreflexive")


def _hom(G: Graph, H: Graph, lists: tuple) -> int:
    parts = _split(G, lists)
    _check_budget(sum(_node_bound(m) for _, m in set(parts)))
    cache = {}
    total = 1
    for key in parts:
        if key not in cache:
            cache[key] = _hom_component(key[0], key[1], H)
        total *= cache[key]
        if total == 0:
            return 0
    return total


def _profile(G: Graph, H: Graph, lists: tuple, track_edges: bool) -> Counter:
    parts = _split(G, lists)
    _check_budget(sum(_node_bound(m) for _, m in set(parts)))
    cache = {}
    acc = Counter({(0, 0): 1})
    for key in parts:
        if key not in cache:
            cache[key] = _profile_component(key[0], key[1], H, track_edges)
        acc = _or_convolve(acc, cache[key])
    return acc


# -- public counters ----------------------------------------------------------------

def count_hom(G: Graph, H: Graph, lists=None) -> int:
    """Number of list homomorphisms G -> H."""
    _require_irreflexive(G)
    return _hom(G, H, normalize_lists(lists, G, H))


def count_sur(G: Graph, H: Graph, lists=None) -> int:
    """List homomorphisms whose image is all of V(H)."""
    _require_irreflexive(G)
    lists = normalize_lists(lists, G, H)
    full = (1 << H.n) - 1
    prof = _profile(G, H, lists, track_edges=False)
    return sum(c for (vm, _), c in prof.items() if vm == full)


def count_comp(G: Graph, H: Graph, lists=None) -> int:
    """List homomorphisms covering every vertex and every non-loop edge of H."""
    _require_irreflexive(G)
    lists = normalize_lists(lists, G, H)
    fullv = (1 << H.n) - 1
    fulle = (1 << len(H.non_loop_edges)) - 1
    prof = _profile(G, H, lists, track_edges=True)
    return sum(c for (vm, em), c in prof.items() if vm == fullv and em == fulle)


@dataclass(frozen=True)
class RetractionInstance:
    g: Graph
    anchors: tuple
    h: Graph

    def __post_init__(self):
        object.__setattr__(self, "anchors", tuple(int(a) for a in self.anchors))

    def validate(self) -> None:
        try:
            ok = induced_copy_check(self.g, self.anchors, self.h)
        except PreconditionError as exc:
            raise InvalidInstanceError(str(exc)) from None
        if not ok:
            raise InvalidInstanceError("anchors do not induce a copy of the target")

    def pinned_lists(self) -> tuple:
        lists = [frozenset(range(self.h.n))] * self.g.n
        for i, a in enumerate(self.anchors):
            lists[a] = frozenset({i})
        return tuple(lists)


def count_ret(inst: RetractionInstance) -> int:
    """Homomorphisms g -> h sending the i-th anchor to vertex i of h."""
    inst.validate()
    return _hom(inst.g, inst.h, inst.pinned_lists())


def _check_vertex(G: Graph, v: int, what: str) -> None:
    if not 0 <= v < G.n:
        raise PreconditionError(f"{what} {v} out of range")


def count_anchored_hom(G: Graph, v: int, H: Graph, w: int) -> int:
    """Homomorphisms sending v to w. Loops in G are allowed here (a looped
    vertex must land on a looped vertex), so quotient graphs can be counted."""
    _check_vertex(G, v, "vertex")
    _check_vertex(H, w, "target")
    lists = [frozenset(range(H.n))] * G.n
    lists[v] = frozenset({w})
    return _hom(G, H, tuple(lists))


def count_anchored_inj(G: Graph, v: int, H: Graph, w: int) -> int:
    """Injective homomorphisms sending v to w (loops in G allowed)."""
    _check_vertex(G, v, "vertex")
    _check_vertex(H, w, "target")
    if G.n > H.n:
        return 0
    _check_budget(H.n ** max(G.n - 1, 0))
    loopmask = _mask(H.loops)
    order = [v] + [x for x in range(G.n) if x != v]
    pos = {x: i for i, x in enumerate(order)}
    back = [
        tuple(pos[y] for y in G.adj[x] if y != x and pos[y] < pos[x]) for x in order
    ]
    looped = [x in G.adj[x] for x in order]
    img = [0] * G.n

    def go(i, used):
        if i == G.n:
            return 1
        m = (1 << w) if i == 0 else ((1 << H.n) - 1) & ~used
        for j in back[i]:
            m &= H.adj_mask[img[j]]
        if looped[i]:
            m &= loopmask
        total = 0
        while m:
            low = m & -m
            img[i] = low.bit_length() - 1
            total += go(i + 1, used | low)
            m ^= low
        return total

    return go(0, 0)
