"""Rooted binary level-1 phylogenetic networks as plain labelled DAGs.

A :class:`Network` is a thin immutable wrapper around a vertex set, an arc set
and a leaf labelling.  It does not insist on being valid; :func:`validate`
reports which of the level-1 invariants fail.  The graph-level operations in
this module (LSA, restriction, equivalence) follow the textbook definitions
directly and are deliberately independent of the recursive decomposition in
:mod:`level1nets.decomposition`, which is the fast path used by the solvers.
"""

from __future__ import annotations

import re
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import networkx as nx
from networkx.algorithms import isomorphism

__all__ = [
    "Network",
    "RootKind",
    "SideDecomposition",
    "check_taxon",
    "validate",
    "lsa",
    "restrict",
    "is_equivalent",
    "canonical_code",
    "displays",
    "root_kind",
    "side_decomposition",
    "tinyfy",
]

# whitespace plus everything that has a meaning in the text formats
_BAD_TAXON = re.compile(r"[\s(),;:#\[\]']")


def check_taxon(name: str) -> str:
    if not isinstance(name, str) or not name:
        raise ValueError(f"taxon must be a nonempty string, got {name!r}")
    if _BAD_TAXON.search(name):
        raise ValueError(f"taxon {name!r} contains a reserved character")
    return name


class Network:
    """Immutable directed graph with labelled sinks.

    ``arcs`` is an iterable of ``(u, v)`` pairs over integer vertex ids and
    ``labels`` maps leaf vertices to taxon names.  Vertices that occur only in
    ``labels`` or ``vertices`` (e.g. the single vertex of a one-leaf network)
    are included as well.
    """

    __slots__ = ("vertices", "arcs", "labels", "_children", "_parents", "_by_taxon", "_cache")

    def __init__(
        self,
        arcs: Iterable[tuple[int, int]],
        labels: Mapping[int, str],
        vertices: Iterable[int] = (),
    ) -> None:
        arcs = frozenset((u, v) for u, v in arcs)
        verts = set(vertices) | set(labels)
        for u, v in arcs:
            verts.add(u)
            verts.add(v)
        self.vertices = frozenset(verts)
        self.arcs = arcs
        self.labels = dict(labels)
        children: dict[int, list[int]] = {v: [] for v in verts}
        parents: dict[int, list[int]] = {v: [] for v in verts}
        for u, v in sorted(arcs):
            children[u].append(v)
            parents[v].append(u)
        self._children = {v: tuple(c) for v, c in children.items()}
        self._parents = {v: tuple(p) for v, p in parents.items()}
        by_taxon: dict[str, int] = {}
        for v, name in self.labels.items():
            if name in by_taxon:
                raise ValueError(f"taxon {name!r} labels more than one vertex")
            by_taxon[name] = v
        self._by_taxon = by_taxon
        self._cache: dict[str, object] = {}

    def children(self, v: int) -> tuple[int, ...]:
        return self._children[v]

    def parents(self, v: int) -> tuple[int, ...]:
        return self._parents[v]

    @property
    def roots(self) -> list[int]:
        return sorted(v for v in self.vertices if not self._parents[v])

    @property
    def root(self) -> int:
        roots = self.roots
        if len(roots) != 1:
            raise ValueError(f"network has {len(roots)} indegree-0 vertices")
        return roots[0]

    @property
    def taxa(self) -> frozenset[str]:
        return frozenset(self._by_taxon)

    def vertex_of(self, taxon: str) -> int:
        try:
            return self._by_taxon[taxon]
        except KeyError:
            raise KeyError(f"unknown taxon {taxon!r}") from None

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        for v in self.vertices:
            g.add_node(v, label=self.labels.get(v))
        g.add_edges_from(self.arcs)
        return g

    def relabel(self, mapping: Mapping[str, str]) -> "Network":
        """Rename taxa; names missing from ``mapping`` are kept."""
        return Network(self.arcs, {v: mapping.get(t, t) for v, t in self.labels.items()}, self.vertices)

    @property
    def decomposition(self):
        """Recursive cycle/join decomposition (valid networks only), cached."""
        if "decomposition" not in self._cache:
            from .decomposition import from_network

            self._cache["decomposition"] = from_network(self)
        return self._cache["decomposition"]

    def __repr__(self) -> str:
        return f"Network(|V|={len(self.vertices)}, |A|={len(self.arcs)}, taxa={sorted(self.taxa)})"


class RootKind:
    NOT_CYCLE_ROOTED = "NotCycleRooted"
    TINY = "TinyCycleRooted"
    LARGISH = "LargishCycleRooted"


@dataclass(frozen=True)
class SideDecomposition:
    high: frozenset[str]
    low: frozenset[str]
    left_blocks: tuple[frozenset[str], ...] = field(default=())
    right_blocks: tuple[frozenset[str], ...] = field(default=())

    @property
    def sides(self) -> tuple[frozenset[str], frozenset[str]]:
        left = frozenset().union(*self.left_blocks)
        right = frozenset().union(*self.right_blocks)
        return left, right


# ---------------------------------------------------------------------------
# validation


def _blobs(net: Network) -> list[set[int]]:
    """Vertex sets of the nontrivial biconnected components."""
    und = nx.Graph()
    und.add_nodes_from(net.vertices)
    und.add_edges_from(net.arcs)
    return [b for b in nx.biconnected_components(und) if len(b) > 2]


def validate(net: Network) -> list[str]:
    """Return the violated network invariants; an empty list means valid."""
    problems: list[str] = []
    if not net.vertices:
        return ["empty graph"]
    roots = net.roots
    if len(roots) != 1:
        problems.append(f"single root: found {len(roots)} indegree-0 vertices")
    if not nx.is_directed_acyclic_graph(net.to_networkx()):
        problems.append("acyclic: graph has a directed cycle")
        return problems
    for v in sorted(net.vertices):
        indeg, outdeg = len(net.parents(v)), len(net.children(v))
        if indeg == 1 and outdeg == 1:
            problems.append(f"no indegree-1 outdegree-1 vertices: vertex {v}")
        if indeg > 2 or outdeg > 2:
            problems.append(f"binary: vertex {v} has indegree {indeg}, outdegree {outdeg}")
        if indeg == 2 and outdeg != 1:
            problems.append(f"binary: reticulation {v} has outdegree {outdeg}")
        if outdeg == 0 and v not in net.labels:
            problems.append(f"leaf labelling: leaf {v} is unlabelled")
        if outdeg > 0 and v in net.labels:
            problems.append(f"leaf labelling: internal vertex {v} is labelled")
    # with a single root every blob has one source, so a blob holds exactly one
    # cycle iff it is a simple cycle; cycles in different blobs meet at most in
    # a cut vertex
    seen: Counter[int] = Counter()
    for blob in _blobs(net):
        seen.update(blob)
        inner = sum(1 for u, v in net.arcs if u in blob and v in blob)
        if inner != len(blob):
            problems.append(f"level-1: cycles sharing vertices {sorted(blob)}")
    shared = sorted(v for v, k in seen.items() if k > 1)
    if shared:
        problems.append(f"level-1: cycles meet at vertices {shared}")
    return problems


# ---------------------------------------------------------------------------
# stable ancestors and restriction


def _check_sub(net: Network, sub: Iterable[str]) -> frozenset[str]:
    sub = frozenset(sub)
    if not sub:
        raise ValueError("taxon subset must be nonempty")
    unknown = sub - net.taxa
    if unknown:
        raise KeyError(f"unknown taxa {sorted(unknown)}")
    return sub


def _dominator_chain(idom: Mapping[int, int], v: int) -> list[int]:
    chain = [v]
    while idom[v] != v:
        v = idom[v]
        chain.append(v)
    chain.reverse()
    return chain


def lsa(net: Network, sub: Iterable[str]) -> int:
    """Lowest stable ancestor of ``sub``.

    A vertex is a stable ancestor of a leaf exactly when it dominates that
    leaf from the root, so the LSA is the deepest common vertex of the
    dominator-tree chains of the leaves.
    """
    sub = _check_sub(net, sub)
    root = net.root
    idom = nx.immediate_dominators(net.to_networkx(), root)
    idom[root] = root
    chains = [_dominator_chain(idom, net.vertex_of(x)) for x in sorted(sub)]
    best = root
    for level in zip(*chains):
        if all(v == level[0] for v in level):
            best = level[0]
        else:
            break
    return best


def _reach(start: Iterable[int], step) -> set[int]:
    seen = set(start)
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for w in step(v):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def restrict(net: Network, sub: Iterable[str]) -> Network:
    """The network ``net|sub``.

    Keeps the vertices on directed paths from the LSA of ``sub`` to the
    leaves in ``sub``, then alternately suppresses indegree-1 outdegree-1
    vertices and merges parallel arcs until neither applies.
    """
    sub = _check_sub(net, sub)
    top = lsa(net, sub)
    targets = {net.vertex_of(x) for x in sub}
    keep = _reach(targets, net.parents) & _reach([top], net.children)
    arcs: Counter[tuple[int, int]] = Counter(
        (u, v) for u, v in net.arcs if u in keep and v in keep
    )
    changed = True
    while changed:
        changed = False
        for a in [a for a, k in arcs.items() if k > 1]:
            arcs[a] = 1
            changed = True
        indeg: Counter[int] = Counter()
        outdeg: Counter[int] = Counter()
        for (u, v), k in arcs.items():
            outdeg[u] += k
            indeg[v] += k
        for v in sorted(keep):
            if v in targets or indeg[v] != 1 or outdeg[v] != 1:
                continue
            (p, _), = [a for a in arcs if a[1] == v]
            (_, c), = [a for a in arcs if a[0] == v]
            del arcs[(p, v)]
            del arcs[(v, c)]
            arcs[(p, c)] += 1
            keep.discard(v)
            changed = True
            break
    return Network(arcs.keys(), {v: net.labels[v] for v in targets}, keep)


# ---------------------------------------------------------------------------
# equivalence and display


def is_equivalent(a: Network, b: Network) -> bool:
    """Labelled isomorphism test fixing every leaf label."""
    if a.taxa != b.taxa or len(a.vertices) != len(b.vertices) or len(a.arcs) != len(b.arcs):
        return False
    matcher = isomorphism.DiGraphMatcher(
        a.to_networkx(),
        b.to_networkx(),
        node_match=lambda x, y: x["label"] == y["label"],
    )
    return matcher.is_isomorphic()


def canonical_code(net: Network) -> str:
    """Text token that is equal for two valid networks iff they are equivalent."""
    from .decomposition import code

    return code(net.decomposition)


def displays(host: Network, guest: Network) -> bool:
    missing = guest.taxa - host.taxa
    if missing:
        raise ValueError(f"guest taxa {sorted(missing)} are not leaves of the host")
    return is_equivalent(restrict(host, guest.taxa), guest)


# ---------------------------------------------------------------------------
# root cycle structure


def root_kind(net: Network) -> str:
    from .decomposition import Cycle

    top = net.decomposition
    if not isinstance(top, Cycle):
        return RootKind.NOT_CYCLE_ROOTED
    return RootKind.TINY if top.size == 3 else RootKind.LARGISH


def side_decomposition(net: Network) -> SideDecomposition:
    """High/low leaves and the pendant sidenetwork blocks, root-nearest first.

    For a network that is not cycle-rooted every leaf is high and the whole
    leaf set is reported as a single left block.
    """
    from .decomposition import Cycle, leaves

    top = net.decomposition
    if not isinstance(top, Cycle):
        return SideDecomposition(net.taxa, frozenset(), (net.taxa,), ())
    left = tuple(leaves(t) for t in top.left)
    right = tuple(leaves(t) for t in top.right)
    high = frozenset().union(*left, *right)
    return SideDecomposition(high, leaves(top.low), left, right)


def tinyfy(net: Network) -> Network:
    """Rewrite every largish cycle into a tiny one.

    Each cycle with paths ``(s, v1..vn, t)`` and ``(s, w1..wm, t)``, n+m >= 2,
    loses the arcs into ``t``; a new 3-cycle ``q -> r -> t, q -> t`` takes the
    place of ``s`` with ``r -> s`` carrying what is left of the old cycle.
    Cycles are processed deepest first.
    """
    children = {v: list(net.children(v)) for v in net.vertices}
    parents = {v: list(net.parents(v)) for v in net.vertices}
    next_id = max(net.vertices) + 1
    root = net.root

    depth = {v: 0 for v in net.vertices}
    for v in nx.topological_sort(net.to_networkx()):
        for c in net.children(v):
            depth[c] = max(depth[c], depth[v] + 1)

    cycles = []
    for blob in _blobs(net):
        t = next(v for v in blob if sum(p in blob for p in net.parents(v)) == 2)
        s = next(v for v in blob if not any(p in blob for p in net.parents(v)))
        if len(blob) > 3:
            cycles.append((depth[t], s, t))
    cycles.sort(reverse=True)

    def add_arc(u: int, v: int) -> None:
        children[u].append(v)
        parents[v].append(u)

    def del_arc(u: int, v: int) -> None:
        children[u].remove(v)
        parents[v].remove(u)

    for _, s, t in cycles:
        for last in list(parents[t]):
            del_arc(last, t)
        q, r = next_id, next_id + 1
        next_id += 2
        children[q], parents[q], children[r], parents[r] = [], [], [], []
        if parents[s]:
            (p,) = parents[s]
            del_arc(p, s)
            add_arc(p, q)
        else:
            root = q
        add_arc(q, r)
        add_arc(r, t)
        add_arc(q, t)
        add_arc(r, s)

    # suppress the vertices left with indegree 1 and outdegree 1
    for v in list(children):
        if len(parents[v]) == 1 and len(children[v]) == 1:
            (p,), (c,) = parents[v], children[v]
            del_arc(p, v)
            del_arc(v, c)
            add_arc(p, c)
            del children[v], parents[v]
    arcs = [(u, v) for u, cs in children.items() for v in cs]
    return Network(arcs, net.labels, children.keys() | {root})
