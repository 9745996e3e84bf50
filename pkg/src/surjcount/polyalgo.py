"""Polynomial-time exact counting for tractable targets, surjection
combinatorics, and reductions between list/surjective counting."""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations, permutations
from math import comb, factorial, prod
from typing import Callable, Sequence

from .brute import count_hom, normalize_lists, restrict_lists
from .errors import GraphFormatError, NotTractableError, OracleError, PreconditionError
from .graph import (
    Graph,
    bipartition,
    classify_structure,
    complete_graph,
    connected_components,
    disjoint_union,
    induced_subgraph,
)

Solver = Callable[..., int]


def tractable_components(H: Graph):
    """Split H into components tagged ``("clique", vertices)`` or
    ``("biclique", left, right)``; raise if some component is neither."""
    out = []
    for C, back in connected_components(H):
        rep = classify_structure(C)
        if rep.is_reflexive_clique:
            out.append(("clique", frozenset(back)))
        elif rep.is_irreflexive_biclique:
            if C.n == 1:
                out.append(("biclique", frozenset(), frozenset(back)))
            else:
                U, V = rep.bipartition
                out.append(
                    ("biclique", frozenset(back[u] for u in U), frozenset(back[v] for v in V))
                )
        else:
            raise NotTractableError(
                "every component of the target must be a reflexive clique or an "
                "irreflexive biclique"
            )
    return out


def count_hom_tractable(G: Graph, H: Graph, lists=None) -> int:
    """List-homomorphism count for targets whose components are reflexive
    cliques or irreflexive bicliques; polynomial in |G|."""
    if G.loops:
        raise PreconditionError("input graph G must be irreflexive")
    parts = tractable_components(H)
    lists = normalize_lists(lists, G, H)
    total = 1
    for C, back in connected_components(G):
        S = [lists[v] for v in back]
        sides = bipartition(C) if C.n > 1 else None
        term = 0
        for part in parts:
            if part[0] == "clique":
                term += prod(len(s & part[1]) for s in S)
                continue
            _, U, V = part
            if C.n == 1:
                # an isolated vertex has only one orientation
                term += len(S[0] & (U | V))
            elif sides is not None:
                L, R = sides
                term += prod(len(S[v] & U) for v in L) * prod(len(S[v] & V) for v in R)
                term += prod(len(S[v] & V) for v in L) * prod(len(S[v] & U) for v in R)
        total *= term
        if total == 0:
            return 0
    return total


def surjections_count(t: int, q: int) -> int:
    """Number of surjections from a t-set onto a q-set."""
    if t < 0 or q < 0:
        raise PreconditionError("t and q must be non-negative")
    return sum((-1) ** (q - j) * comb(q, j) * j**t for j in range(q + 1))


def sur_via_inclusion_exclusion(G: Graph, H: Graph, lists=None, hom_solver: Solver = count_hom) -> int:
    """Surjective list-homomorphism count by inclusion-exclusion over the
    set of used target vertices."""
    lists = normalize_lists(lists, G, H)
    total = 0
    for k in range(H.n + 1):
        sign = -1 if (H.n - k) % 2 else 1
        for W in combinations(range(H.n), k):
            HW, keep = induced_subgraph(H, W)
            total += sign * hom_solver(G, HW, restrict_lists(lists, keep))
    return total


def configurations(n: int, q: int):
    """Yield ``(positions, images)`` pairs: strictly increasing first-use
    positions starting at 0 and a distinct target for each."""
    if q == 0:
        if n == 0:
            yield (), ()
        return
    if n < q:
        return
    for rest in combinations(range(1, n), q - 1):
        pos = (0,) + rest
        for sigma in permutations(range(q)):
            yield pos, sigma


def configuration_lists(lists: tuple, positions: Sequence[int], sigma: Sequence[int]) -> tuple:
    """Lists forcing vertex ``positions[j]`` onto ``sigma[j]`` and every other
    vertex onto a target already introduced before it."""
    out = []
    j = -1
    for p, s in enumerate(lists):
        if j + 1 < len(positions) and positions[j + 1] == p:
            j += 1
            out.append(s & {sigma[j]})
        else:
            out.append(s & frozenset(sigma[: j + 1]))
    return tuple(out)


def sur_via_configurations(G: Graph, H: Graph, lists=None, lhom_solver: Solver = count_hom) -> int:
    """Surjective list-homomorphism count as a sum of list-homomorphism
    counts, one per configuration of first uses in vertex order."""
    lists = normalize_lists(lists, G, H)
    return sum(
        lhom_solver(G, H, configuration_lists(lists, pos, sigma))
        for pos, sigma in configurations(G.n, H.n)
    )


def uniform_hom_to_cliques(g_sizes: Sequence[int], h_sizes: Sequence[int]) -> int:
    """hom from disjoint irreflexive cliques to disjoint reflexive cliques."""
    if any(a < 1 for a in g_sizes) or any(b < 1 for b in h_sizes):
        raise PreconditionError("clique sizes must be positive")
    return prod(sum(b**a for b in h_sizes) for a in g_sizes)


def cliques_graph(sizes: Sequence[int], reflexive: bool) -> Graph:
    return disjoint_union(*(complete_graph(s, reflexive) for s in sizes))


@dataclass(frozen=True)
class SubsetSumInstance:
    a: tuple
    b: int

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        if any(x < 1 for x in self.a):
            raise PreconditionError("subset-sum items must be positive")
        if self.b < 1:
            raise PreconditionError("subset-sum target must be positive")

    @property
    def total(self) -> int:
        return sum(self.a)

    @classmethod
    def from_json(cls, text: str) -> "SubsetSumInstance":
        try:
            obj = json.loads(text)
            return cls(tuple(obj["a"]), int(obj["b"]))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise GraphFormatError(f"bad subset-sum instance: {exc}") from None


def subset_sum_graphs(inst: SubsetSumInstance) -> tuple[Graph, Graph]:
    """Disjoint irreflexive cliques of the item sizes, and the reflexive
    cliques of sizes b and N-b."""
    G = cliques_graph(inst.a, reflexive=False)
    rest = inst.total - inst.b
    H = cliques_graph([inst.b] + ([rest] if rest else []), reflexive=True)
    return G, H


def subset_sum_via_sur(inst: SubsetSumInstance, sur_solver: Solver) -> int:
    """Number of sub-multisets of ``a`` summing to ``b``, from one surjection count."""
    N = inst.total
    if N < inst.b:
        return 0
    G, H = subset_sum_graphs(inst)
    s = sur_solver(G, H)
    d = factorial(inst.b) * factorial(N - inst.b)
    if s % d:
        raise OracleError(f"surjection count {s} is not divisible by {d}")
    return s // d
