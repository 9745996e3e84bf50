import itertools
import os

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from surjcount.graph import Graph

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def graphs(draw, min_n=0, max_n=5, loops=False, connected=False):
    n = draw(st.integers(min_n, max_n))
    lo = 0 if loops else 1
    pairs = [(u, v) for u in range(n) for v in range(u + lo, n)]
    chosen = draw(st.sets(st.sampled_from(pairs))) if pairs else set()
    g = Graph(n, frozenset(chosen))
    if connected:
        # chain consecutive vertices so the graph is connected
        g = Graph(n, g.edges | {(i, i + 1) for i in range(n - 1)})
    return g


@st.composite
def permutations_of(draw, n):
    return draw(st.permutations(list(range(n))))


@pytest.fixture
def tmp_graph(tmp_path):
    def write(G, name="g.txt"):
        from surjcount.graph import to_edge_list

        p = tmp_path / name
        p.write_text(to_edge_list(G))
        return str(p)

    return write


# -- independent structural checker for complexity labels ---------------------

def _components(H):
    seen, out = set(), []
    for s in range(H.n):
        if s in seen:
            continue
        comp, stack = {s}, [s]
        while stack:
            u = stack.pop()
            for v in range(H.n):
                if v not in comp and ((u, v) in H.edges or (v, u) in H.edges):
                    comp.add(v)
                    stack.append(v)
        seen |= comp
        out.append(sorted(comp))
    return out


def _adj(H, u, v):
    return (u, v) in H.edges or (v, u) in H.edges


def _kind(H, C):
    """Kind of a component, decided by trying every split of its vertices."""
    loops = [v for v in C if _adj(H, v, v)]
    if len(loops) == len(C) and all(_adj(H, u, v) for u, v in itertools.combinations(C, 2)):
        return "reflexive-clique"
    if loops:
        return "other"
    for r in range(0, len(C) + 1):
        for L in itertools.combinations(C, r):
            R = [v for v in C if v not in L]
            if all(_adj(H, u, v) == ((u in L) != (v in L)) for u, v in itertools.combinations(C, 2)):
                if len(C) == 1 or (L and R):
                    return "irreflexive-star" if min(len(L), len(R)) <= 1 else "irreflexive-biclique"
    return "other"


def structural_labels(H):
    """(hom label, comp label, approx label) from raw edge sets."""
    kinds = [(_kind(H, C), len(C)) for C in _components(H)]
    hom = all(k != "other" for k, _ in kinds)
    comp = all(k == "irreflexive-star" or (k == "reflexive-clique" and n <= 2) for k, n in kinds)
    if H.n == 0:
        approx = "FPRAS"
    elif len(kinds) > 1:
        approx = "open-disconnected"
    else:
        approx = "FPRAS" if kinds[0][0] != "other" else "#BIS-hard"
    return ("FP" if hom else "#P-complete"), ("FP" if comp else "#P-complete"), approx
