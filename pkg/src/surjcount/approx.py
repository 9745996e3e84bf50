"""Randomized compaction counting and approximation-preserving reductions.

The estimator samples homomorphisms uniformly from a product space whose
size is known exactly, counts the compactions among them and rescales.
Targets must be connected reflexive cliques or irreflexive bicliques; for
those the compactions make up at least a known fraction 1/c of the space,
which fixes the sample count.

Randomness: numpy's Philox counter-based generator. Sample chunk ``j`` of
sampler invocation ``i`` uses key ``seed + 2**64 * ((i << 32) | j)``, so
every chunk has its own stream and results do not depend on chunk
evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import ceil, comb, floor, prod
from typing import Callable, Sequence

import mpmath
import numpy as np

from . import _kernel
from .brute import RetractionInstance
from .errors import NotTractableError, PreconditionError
from .graph import (
    Graph,
    bipartition,
    classify_structure,
    connected_components,
    disjoint_union,
    empty_graph,
    induced_subgraph,
    matching,
    strip_loops,
)
from .polyalgo import surjections_count

CHUNK = 1 << 20
_TABLE_LIMIT = 1 << 16


def as_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction or decimal string/float literal."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def ln_upper(x: Fraction) -> Fraction:
    """A rational upper bound on ln(x), tight to about 30 digits."""
    with mpmath.workprec(128):
        iv = mpmath.iv.log(mpmath.iv.mpf(x.numerator) / x.denominator)
        hi = iv.b
    man, exp = mpmath.mpf(hi).man_exp
    return Fraction(int(man)) * Fraction(2) ** exp


def sample_count(c: int, epsilon, delta) -> int:
    """m = ceil(c * 3 * ln(2/delta) / epsilon^2), never rounding below."""
    eps = as_fraction(epsilon)
    dl = as_fraction(delta)
    if not (0 < eps < 1 and 0 < dl < 1):
        raise PreconditionError("epsilon and delta must lie in (0, 1)")
    return int(ceil(c * 3 * ln_upper(2 / dl) / (eps * eps)))


def stream_generator(seed: int, call_index: int, chunk_index: int) -> np.random.Generator:
    stream = (call_index << 32) | chunk_index
    return np.random.Generator(np.random.Philox(key=(seed % 2**64) + (stream << 64)))


# -- sample spaces ---------------------------------------------------------------

@dataclass(frozen=True)
class SideAssignment:
    """Per component of G, whether its smaller side goes to the smaller
    side of the biclique (True) or to the larger one (False)."""

    omega: tuple

    def __post_init__(self):
        object.__setattr__(self, "omega", tuple(bool(x) for x in self.omega))


@dataclass
class _Block:
    """A group of G-vertices drawn together.

    A table block lists every joint image of its vertices, one row each. A
    rejection block covers one component of G sampled against a biclique;
    ``on_small`` marks the vertices of its smaller side.
    """

    verts: list
    table: np.ndarray | None = None
    on_small: list | None = None


@dataclass
class _Space:
    """Product of blocks; ``size`` is the exact number of maps it contains."""

    n: int
    q: int
    edges: list
    blocks: list
    size: int
    lut: np.ndarray
    full: int
    small: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    large: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __post_init__(self):
        btype, bk, bthr, bv0, verts, btab0, tabs, vflag = [], [], [], [0], [], [], [], []
        off = 0
        for blk in self.blocks:
            if blk.table is not None:
                k = blk.table.shape[0]
                btype.append(_kernel.TABLE)
                btab0.append(off)
                tabs.append(blk.table.reshape(-1))
                off += blk.table.size
                vflag.extend([0] * len(blk.verts))
            else:
                k = len(self.large)
                btype.append(_kernel.REJECT)
                btab0.append(0)
                vflag.extend(1 if s else 0 for s in blk.on_small)
            bk.append(k)
            bthr.append((1 << 32) % k)
            verts.extend(blk.verts)
            bv0.append(len(verts))
        i64 = lambda x: np.asarray(x, dtype=np.int64)
        self._args = (
            self.n, i64(btype), np.asarray(bk, dtype=np.uint64),
            np.asarray(bthr, dtype=np.uint64), i64(bv0), i64(verts), i64(btab0),
            np.concatenate(tabs) if tabs else np.zeros(1, dtype=np.int64), i64(vflag),
            i64(self.small), i64(self.large),
            i64([a for a, _ in self.edges]), i64([b for _, b in self.edges]),
            self.lut, self.q, np.uint64(self.full),
        )
        # 32-bit words per sample without rejections
        self._words = sum(
            1 if b.table is not None else 1 + len(b.verts) for b in self.blocks
        )

    def hits(self, gen: np.random.Generator, B: int) -> int:
        """Count compactions among B samples drawn from the generator."""
        bits = gen.bit_generator
        words = bits.random_raw((B * self._words + 1) // 2 + 16).view(np.uint32)
        hits, start = 0, 0
        while B:
            h, d, start = _kernel.sample_hits(words, start, B, *self._args)
            hits += h
            B -= d
            if B:
                more = bits.random_raw((B * self._words + 1) // 2 + 16).view(np.uint32)
                words = np.concatenate((words[start:], more))
                start = 0
        return int(hits)


def _table_blocks(cand: list, verts: list) -> list:
    """Pack vertices with independent candidate arrays into table blocks
    of at most _TABLE_LIMIT rows."""
    blocks, cur, size = [], [], 1
    for v in verts:
        k = len(cand[v])
        if cur and size * k > _TABLE_LIMIT:
            blocks.append(_product_block(cand, cur))
            cur, size = [], 1
        cur.append(v)
        size *= k
    if cur:
        blocks.append(_product_block(cand, cur))
    return blocks


def _product_block(cand: list, verts: list) -> _Block:
    rows = np.array(list(product(*(cand[v] for v in verts))), dtype=np.int64)
    return _Block(list(verts), rows.reshape(-1, len(verts)))


def _edge_lut(H: Graph) -> tuple[np.ndarray, int]:
    nl = H.non_loop_edges
    if len(nl) > 64:
        raise PreconditionError("targets with more than 64 non-loop edges are not supported")
    lut = np.zeros(H.n * H.n, dtype=np.uint64)
    for k, (a, b) in enumerate(nl):
        lut[a * H.n + b] = np.uint64(1 << k)
        lut[b * H.n + a] = np.uint64(1 << k)
    return lut, (1 << len(nl)) - 1


def estimate_over_space(space: _Space, m: int, seed: int, call_index: int) -> tuple[Fraction, int]:
    """Draw m samples from the space; return (|space| * hits / m, hits)."""
    hits = 0
    done = 0
    chunk = 0
    while done < m:
        B = min(CHUNK, m - done)
        hits += space.hits(stream_generator(seed, call_index, chunk), B)
        done += B
        chunk += 1
    return Fraction(space.size * hits, m), hits


# -- structure of the instance ---------------------------------------------------------

def _target_kind(H: Graph):
    if H.n == 0 or not H.is_connected:
        raise NotTractableError(
            "approximate counting needs a connected target; the disconnected case is open"
        )
    rep = classify_structure(H)
    if rep.is_reflexive_clique:
        return "clique", None
    if rep.is_irreflexive_biclique:
        if H.n == 1:
            return "biclique", (np.array([], dtype=np.int64), np.array([0], dtype=np.int64))
        U, V = rep.bipartition
        small, large = sorted((sorted(U), sorted(V)), key=len)
        return "biclique", (np.array(small, dtype=np.int64), np.array(large, dtype=np.int64))
    raise NotTractableError("target is neither a reflexive clique nor an irreflexive biclique")


def _drop_isolated(G: Graph) -> tuple[Graph, int]:
    keep = [v for v in range(G.n) if G.degree(v) > 0]
    Gp, _ = induced_subgraph(G, keep)
    return Gp, G.n - len(keep)


def _component_sides(G: Graph):
    """Per component: (small side, large side) in G's labels, or None if
    some component is not bipartite."""
    out = []
    for C, back in connected_components(G):
        bp = bipartition(C)
        if bp is None:
            return None
        A, B = sorted((sorted(back[x] for x in bp[0]), sorted(back[x] for x in bp[1])), key=len)
        out.append((A, B))
    return out


def _uniform_below(rng: np.random.Generator, bound: int) -> int:
    """Exactly uniform integer in [0, bound) for arbitrary-size bounds."""
    nbytes = (bound.bit_length() + 7) // 8
    span = 1 << (8 * nbytes)
    limit = span - span % bound
    while True:
        x = int.from_bytes(rng.bytes(nbytes), "little")
        if x < limit:
            return x % bound


def sample_uniform_hom(G: Graph, H: Graph, restriction: SideAssignment | None = None,
                       rng: np.random.Generator | None = None) -> tuple:
    """One uniformly random homomorphism G -> H (from the restricted set
    when a side assignment is given)."""
    if rng is None:
        rng = np.random.Generator(np.random.Philox(0))
    if G.loops:
        raise PreconditionError("input graph G must be irreflexive")
    kind, sides = _target_kind(H)
    if kind == "clique":
        if restriction is not None:
            raise PreconditionError("side assignments apply to biclique targets only")
        return tuple(int(rng.integers(0, H.n)) for _ in range(G.n))
    if any(G.degree(v) == 0 for v in range(G.n)):
        raise PreconditionError("biclique sampling needs G without isolated vertices")
    comps = _component_sides(G)
    if comps is None:
        raise PreconditionError("G must be bipartite for a biclique target")
    small, large = sides
    ls, ll = len(small), len(large)
    if restriction is not None and len(restriction.omega) != len(comps):
        raise PreconditionError("one side choice per component required")
    img = [0] * G.n
    for i, (A, B) in enumerate(comps):
        if restriction is not None:
            orient = restriction.omega[i]
        else:
            w1 = ls ** len(A) * ll ** len(B)
            w2 = ll ** len(A) * ls ** len(B)
            orient = _uniform_below(rng, w1 + w2) < w1
        sa, sb = (small, large) if orient else (large, small)
        for v in A:
            img[v] = int(sa[rng.integers(0, len(sa))])
        for v in B:
            img[v] = int(sb[rng.integers(0, len(sb))])
    return tuple(img)


def restricted_space_size(G: Graph, H: Graph, restriction: SideAssignment) -> int:
    _, (small, large) = _target_kind(H)
    comps = _component_sides(G)
    total = 1
    for (A, B), o in zip(comps, restriction.omega):
        a, b = (len(small), len(large)) if o else (len(large), len(small))
        total *= a ** len(A) * b ** len(B)
    return total


# -- estimator ----------------------------------------------------------------------------

@dataclass
class EstimateResult:
    value: Fraction
    m: int
    c: int
    epsilon: Fraction
    delta: Fraction
    seed: int
    case: str
    delta_call: Fraction | None = None
    calls: int = 0
    samples: int = 0
    exact: bool = False
    isolated_factor: int = 1
    parts: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "value": str(self.value),
            "value_float": float(self.value),
            "m": self.m,
            "c": str(self.c),
            "epsilon": str(self.epsilon),
            "delta": str(self.delta),
            "delta_call": None if self.delta_call is None else str(self.delta_call),
            "seed": self.seed,
            "case": self.case,
            "calls": self.calls,
            "samples": self.samples,
            "exact": self.exact,
            "isolated_factor": str(self.isolated_factor),
        }


def _clique_space(Gp: Graph, H: Graph) -> _Space:
    lut, full = _edge_lut(H)
    cand = [np.arange(H.n, dtype=np.int64)] * Gp.n
    return _Space(
        n=Gp.n, q=H.n, edges=list(Gp.non_loop_edges),
        blocks=_table_blocks(cand, list(range(Gp.n))),
        size=H.n ** Gp.n, lut=lut, full=full,
    )


def _omega_space(Gp: Graph, H: Graph, comps, small, large, omega) -> _Space:
    lut, full = _edge_lut(H)
    cand = [None] * Gp.n
    size = 1
    for (A, B), o in zip(comps, omega):
        sa, sb = (small, large) if o else (large, small)
        for v in A:
            cand[v] = sa
        for v in B:
            cand[v] = sb
        size *= len(sa) ** len(A) * len(sb) ** len(B)
    return _Space(
        n=Gp.n, q=H.n, edges=list(Gp.non_loop_edges),
        blocks=_table_blocks(cand, list(range(Gp.n))),
        size=size, lut=lut, full=full,
    )


def _mixed_space(Gp: Graph, H: Graph, comps, small, large) -> _Space:
    """Uniform homomorphisms G -> biclique, one block per component."""
    lut, full = _edge_lut(H)
    ls, ll = len(small), len(large)
    blocks = []
    size = 1
    for A, B in comps:
        w1 = ls ** len(A) * ll ** len(B)
        w2 = ll ** len(A) * ls ** len(B)
        size *= w1 + w2
        verts = list(A) + list(B)
        if w1 + w2 <= _TABLE_LIMIT:
            rows = [
                r for sa, sb in ((small, large), (large, small))
                for r in product(*([sa] * len(A) + [sb] * len(B)))
            ]
            blocks.append(_Block(verts, np.array(rows, dtype=np.int64)))
        else:
            blocks.append(_Block(verts, on_small=[True] * len(A) + [False] * len(B)))
    return _Space(
        n=Gp.n, q=H.n, edges=list(Gp.non_loop_edges), blocks=blocks,
        size=size, lut=lut, full=full, small=small, large=large,
    )


def _omega_feasible(comps, omega, ls: int, ll: int) -> bool:
    """Necessary condition: enough G-vertices land on each side of H."""
    on_small = sum(len(A) if o else len(B) for (A, B), o in zip(comps, omega))
    on_large = sum(len(B) if o else len(A) for (A, B), o in zip(comps, omega))
    return on_small >= ls and on_large >= ll


def mc_estimate_comp(G: Graph, H: Graph, epsilon, delta, seed: int,
                     m_override: int | None = None) -> EstimateResult:
    """(epsilon, delta)-approximation of comp(G -> H).

    ``m_override`` replaces the sample count per sampler call; it exists
    for statistical tests of the estimator and voids the accuracy guarantee.
    """
    if G.loops:
        raise PreconditionError("input graph G must be irreflexive")
    eps, dl = as_fraction(epsilon), as_fraction(delta)
    if not (0 < eps < 1 and 0 < dl < 1):
        raise PreconditionError("epsilon and delta must lie in (0, 1)")
    kind, sides = _target_kind(H)
    q = H.n
    p = len(H.non_loop_edges)
    Gp, iso = _drop_isolated(G)
    base = dict(epsilon=eps, delta=dl, seed=seed)

    def exact(value, case):
        return EstimateResult(Fraction(value), 0, 0, case=case, exact=True, **base)

    if Gp.n == 0:
        # only isolated vertices: a compaction exists only onto an edgeless target
        return exact(surjections_count(G.n, q) if p == 0 else 0, "trivial")
    if p == 0:
        # a single vertex; a loop absorbs every edge
        return exact(1 if H.loops else 0, "trivial")
    factor = q**iso
    if Gp.n < q or len(Gp.non_loop_edges) < p:
        return exact(0, "infeasible")

    if kind == "clique":
        c = q ** (2 * p)
        m = m_override or sample_count(c, eps, dl)
        space = _clique_space(Gp, H)
        y, _ = estimate_over_space(space, m, seed, 0)
        return EstimateResult(factor * y, m, c, case="clique", delta_call=dl,
                              calls=1, samples=m, isolated_factor=factor, **base)

    comps = _component_sides(Gp)
    if comps is None:
        return exact(0, "non-bipartite")
    small, large = sides
    ls, ll = len(small), len(large)
    kappa = len(comps)
    if kappa >= p:
        c = 2 * ll ** (2 * p)
        m = m_override or sample_count(c, eps, dl)
        space = _mixed_space(Gp, H, comps, small, large)
        y, _ = estimate_over_space(space, m, seed, 0)
        return EstimateResult(factor * y, m, c, case="biclique-many-components",
                              delta_call=dl, calls=1, samples=m,
                              isolated_factor=factor, **base)

    c = ll ** (2 * p)
    d_call = dl / 2**kappa
    m = m_override or sample_count(c, eps, d_call)
    total = Fraction(0)
    calls = samples = 0
    parts = []
    for idx, omega in enumerate(product((True, False), repeat=kappa)):
        if not _omega_feasible(comps, omega, ls, ll):
            parts.append({"omega": list(omega), "value": "0", "sampled": False})
            continue
        space = _omega_space(Gp, H, comps, small, large, omega)
        y, _ = estimate_over_space(space, m, seed, idx)
        total += y
        calls += 1
        samples += m
        parts.append({"omega": list(omega), "value": str(y), "sampled": True})
    return EstimateResult(factor * total, m, c, case="biclique-few-components",
                          delta_call=d_call, calls=calls, samples=samples,
                          exact=calls == 0, isolated_factor=factor, parts=parts, **base)


# -- approximation-preserving reductions -------------------------------------------------------

Estimator = Callable[..., object]


def exact_estimator(counter: Callable[..., int]) -> Estimator:
    """Wrap an exact counter as an estimator that ignores the accuracy."""
    return lambda G, H, epsilon=None: counter(G, H)


def _hom_single_vertex(G: Graph, H: Graph) -> int:
    if H.n == 0:
        return 1 if G.n == 0 else 0
    return 1 if (H.loops or not G.edges) else 0


def sur_padding(n: int, q: int) -> int:
    """Least t with (q/(q-1))^t >= 5 q^n 2^q, compared exactly."""
    if q < 2:
        raise PreconditionError("padding needs at least two target vertices")
    rhs = 5 * q**n * 2**q
    t = 0
    while q**t < rhs * (q - 1) ** t:
        t += 1
    return t


def comp_padding(n: int, q: int, p: int, loops: int) -> tuple[int, int]:
    """(t, D_t) for padding with t disjoint edges.

    Each new edge has e = 2p + loops images; D_t counts the maps of the t
    edges that use every non-loop edge. t is the least value (and at least
    p) with e^t >= 5 q^n 2^p (e-2)^t, which bounds the error term by 1/4.
    Without loops this is the surjection-based constant 2^t s_{t,p}.
    """
    if p < 1:
        raise PreconditionError("padding needs at least one non-loop edge")
    e = 2 * p + loops
    rhs = 5 * q**n * 2**p
    t = p
    while e**t < rhs * (e - 2) ** t:
        t += 1
    d = sum(comb(t, j) * loops ** (t - j) * 2**j * surjections_count(j, p) for j in range(t + 1))
    if 4 * (e**t - d) * q**n > d:
        raise AssertionError("padding does not reach the 1/4 gap")
    return t, d


def ap_hom_via_sur(G: Graph, H: Graph, sur_estimator: Estimator, epsilon) -> int:
    """hom(G -> H) as the floor of a surjection estimate on G plus t
    isolated vertices divided by s_{t,q}."""
    q = H.n
    if q <= 1:
        return _hom_single_vertex(G, H)
    t = sur_padding(G.n, q)
    est = as_fraction(sur_estimator(disjoint_union(G, empty_graph(t)), H,
                                    as_fraction(epsilon) / 21))
    return floor(est / surjections_count(t, q))


def ap_hom_via_comp(G: Graph, H: Graph, comp_estimator: Estimator, epsilon) -> int:
    """hom(G -> H) for connected H as the floor of a compaction estimate on
    G plus t disjoint edges divided by the padding constant."""
    if H.n > 0 and not H.is_connected:
        raise PreconditionError("target must be connected")
    if H.n <= 1:
        return _hom_single_vertex(G, H)
    t, d = comp_padding(G.n, H.n, len(H.non_loop_edges), len(H.loops))
    est = as_fraction(comp_estimator(disjoint_union(G, matching(t)), H,
                                     as_fraction(epsilon) / 21))
    return floor(est / d)


def hom_via_ret(G: Graph, H: Graph, ret_oracle: Callable[[RetractionInstance], int]) -> int:
    """hom(G -> H) as a retraction count of G plus a loop-free copy of H."""
    g = disjoint_union(G, strip_loops(H))
    inst = RetractionInstance(g, tuple(range(G.n, G.n + H.n)), H)
    return ret_oracle(inst)


def mc_comp_estimator(seed: int, delta=Fraction(1, 4)) -> Estimator:
    """Estimator backed by the Monte Carlo compaction counter."""
    return lambda G, H, epsilon: mc_estimate_comp(G, H, epsilon, delta, seed).value
