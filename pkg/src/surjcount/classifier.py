"""Complexity labels for counting problems, read off the target graph alone,
and the choice of exact counting route."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .brute import (
    RetractionInstance,
    count_comp,
    count_hom,
    count_ret,
    count_sur,
    normalize_lists,
)
from . import decomposition
from .decomposition import build_table, comp_via_decomposition, comp_via_moebius
from .errors import PreconditionError
from .graph import Graph, classify_structure, connected_components
from .polyalgo import count_hom_tractable, sur_via_configurations, sur_via_inclusion_exclusion

PROBLEMS = ("hom", "lhom", "shom", "lshom", "comp", "lcomp", "ret")
LIST_PROBLEMS = frozenset({"lhom", "lshom", "lcomp"})

FP = "FP"
SHARP_P = "#P-complete"
FPRAS = "FPRAS"
BIS_HARD = "#BIS-hard"
OPEN_DISCONNECTED = "open-disconnected"

CITATIONS = {
    "hom": "hom-dichotomy",
    "lhom": "list-hom-dichotomy",
    "shom": "surjective-hom-dichotomy",
    "lshom": "surjective-hom-dichotomy",
    "ret": "retraction-dichotomy",
    "comp": "compaction-dichotomy",
    "lcomp": "compaction-dichotomy",
    "approx": "approximate-compaction-dichotomy",
    "empty": "empty-target",
}

METHODS = {
    "hom": ("tractable-formula", "brute"),
    "lhom": ("tractable-formula", "brute"),
    "shom": ("inclusion-exclusion", "configurations", "brute"),
    "lshom": ("inclusion-exclusion", "configurations", "brute"),
    "comp": ("decomposition", "moebius", "brute"),
    "lcomp": ("moebius", "brute"),
    "ret": ("tractable-formula", "brute"),
}


@dataclass(frozen=True)
class ComponentInfo:
    vertices: tuple
    n: int
    loops: int
    edges: int
    kind: str  # reflexive-clique, irreflexive-star, irreflexive-biclique, other
    sides: tuple | None = None

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "n": self.n,
            "loops": self.loops,
            "edges": self.edges,
            "kind": self.kind,
            "sides": None if self.sides is None else list(self.sides),
        }


def component_inventory(H: Graph) -> tuple:
    out = []
    for C, back in connected_components(H):
        rep = classify_structure(C)
        if rep.is_reflexive_clique:
            kind = "reflexive-clique"
        elif rep.is_irreflexive_star:
            kind = "irreflexive-star"
        elif rep.is_irreflexive_biclique:
            kind = "irreflexive-biclique"
        else:
            kind = "other"
        out.append(ComponentInfo(
            tuple(back), C.n, len(C.loops), len(C.non_loop_edges), kind, rep.sides_sizes,
        ))
    return tuple(out)


def _hom_tractable(inv) -> bool:
    return all(c.kind != "other" for c in inv)


def _comp_tractable(inv) -> bool:
    return all(
        c.kind == "irreflexive-star" or (c.kind == "reflexive-clique" and c.n <= 2)
        for c in inv
    )


@dataclass(frozen=True)
class ClassificationReport:
    labels: dict
    approx: str
    inventory: tuple
    citations: dict

    def to_dict(self) -> dict:
        return {
            "labels": dict(self.labels),
            "approx": self.approx,
            "inventory": [c.to_dict() for c in self.inventory],
            "citations": dict(self.citations),
        }


def classify_approx(H: Graph) -> str:
    if H.n == 0:
        return FPRAS
    if not H.is_connected:
        return OPEN_DISCONNECTED
    rep = classify_structure(H)
    return FPRAS if rep.is_reflexive_clique or rep.is_irreflexive_biclique else BIS_HARD


def classify_exact(H: Graph) -> ClassificationReport:
    inv = component_inventory(H)
    if H.n == 0:
        labels = {p: FP for p in PROBLEMS}
        cites = {p: CITATIONS["empty"] for p in PROBLEMS}
    else:
        hom = FP if _hom_tractable(inv) else SHARP_P
        comp = FP if _comp_tractable(inv) else SHARP_P
        labels = {p: comp if p in ("comp", "lcomp") else hom for p in PROBLEMS}
        cites = {p: CITATIONS[p] for p in PROBLEMS}
    approx = classify_approx(H)
    cites["approx"] = CITATIONS["empty"] if H.n == 0 else CITATIONS["approx"]
    return ClassificationReport(labels, approx, inv, cites)


def _check_problem(problem: str) -> None:
    if problem not in PROBLEMS:
        raise PreconditionError(f"unknown problem {problem!r}; expected one of {', '.join(PROBLEMS)}")


def select_method(problem: str, G: Graph, H: Graph, lists=None) -> str:
    """Cheapest exact route for the instance; 'brute' when nothing better applies."""
    _check_problem(problem)
    labels = classify_exact(H).labels
    if problem in ("hom", "lhom", "ret"):
        return "tractable-formula" if labels[problem] == FP else "brute"
    if problem in ("shom", "lshom"):
        return "inclusion-exclusion" if labels[problem] == FP else "brute"
    if H.n == 0 or H.n > decomposition.DECOMPOSITION_BOUND:
        return "brute"
    if (problem == "comp" and lists is None and G.n > 0 and G.is_connected
            and H.is_connected):
        return "decomposition"
    return "moebius"


def best_hom_solver(H: Graph) -> Callable[..., int]:
    """Tractable formula when H allows it, else the brute oracle."""
    return count_hom_tractable if _hom_tractable(component_inventory(H)) else count_hom


def _hom_any(G: Graph, H: Graph, lists=None) -> int:
    return best_hom_solver(H)(G, H, lists)


def count_problem(problem: str, G: Graph, H: Graph, lists=None, anchors=None,
                  method: str = "auto") -> tuple[int, str]:
    """Exact count for one of the problems; returns (value, method used)."""
    _check_problem(problem)
    if problem not in LIST_PROBLEMS and problem != "ret" and lists is not None:
        raise PreconditionError(f"problem {problem} takes no lists; use l{problem}")
    if problem == "ret":
        if anchors is None:
            raise PreconditionError("retraction counting needs anchors")
        inst = RetractionInstance(G, tuple(anchors), H)
        inst.validate()
        lists = inst.pinned_lists()
    elif anchors is not None:
        raise PreconditionError("anchors apply to retraction counting only")
    if method == "auto":
        method = select_method(problem, G, H, None if problem == "ret" else lists)
    if method not in METHODS[problem]:
        raise PreconditionError(
            f"method {method!r} not available for {problem}; choose from {', '.join(METHODS[problem])}"
        )
    if G.loops:
        raise PreconditionError("input graph G must be irreflexive")
    normalize_lists(lists, G, H)

    if problem in ("hom", "lhom"):
        solver = count_hom_tractable if method == "tractable-formula" else count_hom
        return solver(G, H, lists), method
    if problem == "ret":
        if method == "brute":
            return count_ret(inst), method
        return count_hom_tractable(G, H, lists), method
    if problem in ("shom", "lshom"):
        if method == "brute":
            return count_sur(G, H, lists), method
        if method == "inclusion-exclusion":
            return sur_via_inclusion_exclusion(G, H, lists, hom_solver=_hom_any), method
        return sur_via_configurations(G, H, lists, lhom_solver=best_hom_solver(H)), method
    if method == "brute":
        return count_comp(G, H, lists), method
    if method == "decomposition":
        if lists is not None:
            raise PreconditionError("the decomposition route does not take lists")
        if G.n == 0 or not G.is_connected or not H.is_connected:
            raise PreconditionError("the decomposition route needs connected G and H")
        return comp_via_decomposition(G, build_table(H), hom_solver=_hom_any), method
    return comp_via_moebius(G, H, lists, hom_solver=_hom_any), method
