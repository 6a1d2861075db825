"""Polynomial-time reconstruction from binets alone.

The recursion mirrors the triplet BUILD algorithm: split at the root when the
graph of reticulate binets is disconnected, otherwise hang a closed set of
same-height classes on the side of a new 3-cycle and the rest below it.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable

import networkx as nx

from .decomposition import Cycle, Decomposition, Leaf, LeafPaths, caterpillar, to_network
from .network import Network
from .smallnets import SmallNet, SmallNetSet, classify_paths

__all__ = ["build_rb", "build_kb", "build_omegab", "closed_union", "solve_binets"]


def _binets(bs: SmallNetSet | Iterable[SmallNet]) -> list[SmallNet]:
    items = list(bs.items if isinstance(bs, SmallNetSet) else bs)
    for b in items:
        if not b.is_binet:
            raise ValueError(f"{b} is not a binet")
    return items


def build_rb(bs: SmallNetSet) -> nx.Graph:
    """Taxa, with an edge for every pair carrying an N binet."""
    g = nx.Graph()
    g.add_nodes_from(bs.taxa)
    g.add_edges_from(b.taxa for b in _binets(bs) if b.shape == "N")
    return g


def build_kb(bs: SmallNetSet) -> nx.Graph:
    """Taxa, with an edge for every T binet."""
    g = nx.Graph()
    g.add_nodes_from(bs.taxa)
    g.add_edges_from(b.taxa for b in _binets(bs) if b.shape == "T")
    return g


def build_omegab(bs: SmallNetSet, kb: nx.Graph) -> nx.DiGraph:
    """Components of ``kb`` (as frozensets), with an arc high -> low for each N binet."""
    comp_of = {}
    g = nx.DiGraph()
    for comp in nx.connected_components(kb):
        comp = frozenset(comp)
        g.add_node(comp)
        for x in comp:
            comp_of[x] = comp
    for b in _binets(bs):
        if b.shape == "N":
            low, high = b.taxa
            g.add_edge(comp_of[high], comp_of[low])
    return g


def closed_union(omega: nx.DiGraph) -> frozenset[str] | None:
    """Taxa of a nonempty strict vertex subset with no arc entering it.

    Takes every source component of the condensation; if those are all the
    vertices, only the one holding the smallest taxon.  ``None`` when no such
    subset exists.
    """
    if omega.number_of_nodes() < 2:
        return None
    dag = nx.condensation(omega)
    sources = [n for n in dag if dag.in_degree(n) == 0]
    if len(sources) == len(dag):
        if len(dag) < 2:
            return None
        sources = [min(sources, key=lambda n: min(min(c) for c in dag.nodes[n]["members"]))]
    if len(sources) == len(dag):
        return None
    members = [c for n in sources for c in dag.nodes[n]["members"]]
    return frozenset().union(*members)


def _solve(taxa: frozenset[str], items: list[SmallNet]) -> Decomposition | None:
    if len(taxa) == 1:
        return Leaf(next(iter(taxa)))
    bs = SmallNetSet._trusted(frozenset(items), taxa)
    rb = build_rb(bs)
    comps = sorted((frozenset(c) for c in nx.connected_components(rb)), key=min)
    if len(comps) > 1:
        parts = []
        for comp, sub in zip(comps, _split(items, comps)):
            t = _solve(comp, sub)
            if t is None:
                return None
            parts.append(t)
        return caterpillar(parts)
    high = closed_union(build_omegab(bs, build_kb(bs)))
    if high is None:
        return None
    low = taxa - high
    high_items, low_items = _split(items, [high, low])
    h = _solve(high, high_items)
    if h is None:
        return None
    lo = _solve(low, low_items)
    if lo is None:
        return None
    return Cycle((h,), (), lo)


def _split(items: list[SmallNet], parts: list[frozenset[str]]) -> list[list[SmallNet]]:
    where = {x: i for i, p in enumerate(parts) for x in p}
    out: dict[int, list[SmallNet]] = defaultdict(list)
    for b in items:
        i, j = where[b.taxa[0]], where[b.taxa[1]]
        if i == j:
            out[i].append(b)
    return [out[i] for i in range(len(parts))]


def solve_binets(bs: SmallNetSet) -> Network | None:
    """A binary level-1 network displaying every binet in ``bs``, or ``None`` if none exists."""
    items = _binets(bs)
    if not bs.taxa:
        raise ValueError("empty taxa set")
    tree = _solve(bs.taxa, items)
    if tree is None:
        return None
    paths = LeafPaths(tree)
    for b in items:
        if classify_paths(paths, b.taxa) != b:
            raise AssertionError(f"constructed network does not display {b}")
    return to_network(tree)
