"""Reconstruction from binets and trinets.

The search works top-down on the taxa set ``X``:

* if the graph ``R`` is disconnected the root is a tree vertex and each
  component is solved on its own;
* otherwise the root lies on a cycle.  A tiny root cycle needs no guessing:
  any closed set of the dagger graphs is a valid high set.  A largish root
  cycle is found by guessing a closed high set of ``Omega`` and a proper
  2-colouring of ``W``, after which the pendant sidenetworks on each side are
  peeled off greedily through the digraph ``D``.

Subproblems only depend on their taxa set, so they are memoised.  An
unsolvable subproblem makes the whole instance unsolvable, because a network
displaying the instance restricts to one displaying the subproblem.
"""

from __future__ import annotations

import itertools
import random
import sys
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import networkx as nx

from .binets import closed_union
from .decomposition import Cycle, Decomposition, Leaf, LeafPaths, caterpillar, to_network
from .network import Network, validate
from .smallnets import (
    LARGISH,
    SmallNet,
    SmallNetSet,
    classify_paths,
    extract_all,
    is_semi_dense,
    restrict_smallnet,
    shape_info,
)

__all__ = [
    "SolverConfig",
    "DecompositionGuess",
    "SearchBudgetExceeded",
    "build_r",
    "build_k",
    "build_omega",
    "build_kdagger",
    "build_omegadagger",
    "enumerate_high_sets",
    "build_m",
    "build_w",
    "enumerate_feasible_bipartitions",
    "build_o",
    "build_d",
    "partition_side",
    "assemble",
    "solve",
    "solve_tiny",
    "solve_supernetwork",
]

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class SearchBudgetExceeded(RuntimeError):
    """The guess budget ran out before the search space was exhausted."""


@dataclass(frozen=True)
class SolverConfig:
    guess_budget: int = 100_000  # per recursion node
    deterministic_seed: int = 0  # 0 keeps the canonical guess order
    explore_tiny_first: bool = True

    def __post_init__(self) -> None:
        if self.guess_budget < 1:
            raise ValueError("guess_budget must be at least 1")


@dataclass(frozen=True)
class DecompositionGuess:
    high: frozenset[str]
    low: frozenset[str]
    parts: tuple[frozenset[str], frozenset[str]]
    left_blocks: tuple[frozenset[str], ...] = field(default=())
    right_blocks: tuple[frozenset[str], ...] = field(default=())


def _items(ts: SmallNetSet | Iterable[SmallNet]) -> Iterable[SmallNet]:
    return ts.items if isinstance(ts, SmallNetSet) else ts


def _pairs(sn: SmallNet, slot_pairs) -> Iterator[tuple[str, str]]:
    for i, j in slot_pairs:
        yield sn.taxa[i], sn.taxa[j]


_ALL_PAIRS = {2: ((0, 1),), 3: ((0, 1), (0, 2), (1, 2))}


# ---------------------------------------------------------------------------
# root: cycle or not


def build_r(ts: SmallNetSet) -> nx.Graph:
    """Edge {a,b} when some item is cycle-rooted or has a non-root common ancestor of a and b."""
    edges = set()
    for sn in ts.items:
        info = shape_info(sn.shape)
        edges.update(_pairs(sn, _ALL_PAIRS[len(sn.taxa)] if info.cycle_rooted else info.nonroot_ancestor))
    g = nx.Graph()
    g.add_nodes_from(ts.taxa)
    g.add_edges_from(edges)
    return g


# ---------------------------------------------------------------------------
# high and low leaves


def build_k(ts: SmallNetSet) -> nx.Graph:
    """Edge {a,b} when a and b are at the same height in some item."""
    edges = set()
    for sn in ts.items:
        high = shape_info(sn.shape).high
        edges.update((sn.taxa[i], sn.taxa[j]) for i, j in _ALL_PAIRS[len(sn.taxa)] if (i in high) == (j in high))
    g = nx.Graph()
    g.add_nodes_from(ts.taxa)
    g.add_edges_from(edges)
    return g


def build_kdagger(ts: SmallNetSet) -> nx.Graph:
    """``build_k`` plus all pairs inside S1/S2 trinets."""
    g = build_k(ts)
    g.add_edges_from(p for sn in ts.items if sn.shape in LARGISH for p in _pairs(sn, _ALL_PAIRS[3]))
    return g


def build_omega(ts: SmallNetSet, k: nx.Graph) -> nx.DiGraph:
    """Components of ``k`` (frozensets); arc from the component of a high leaf to that of a low leaf."""
    comp_of: dict[str, frozenset[str]] = {}
    g = nx.DiGraph()
    for comp in nx.connected_components(k):
        comp = frozenset(comp)
        g.add_node(comp)
        comp_of.update(dict.fromkeys(comp, comp))
    arcs = set()
    for sn in ts.items:
        info = shape_info(sn.shape)
        if info.cycle_rooted:
            arcs.update(
                (comp_of[sn.taxa[i]], comp_of[sn.taxa[j]])
                for i in info.high
                for j in range(len(sn.taxa))
                if j not in info.high
            )
    g.add_edges_from(arcs)
    return g


def build_omegadagger(ts: SmallNetSet) -> nx.DiGraph:
    return build_omega(ts, build_kdagger(ts))


def _unique_source(omega: nx.DiGraph) -> frozenset[str] | None:
    sources = [n for n in omega if all(p == n for p in omega.predecessors(n))]
    return sources[0] if len(sources) == 1 else None


def enumerate_high_sets(
    omega: nx.DiGraph, semi_dense: bool = False, limit: int | None = None
) -> list[frozenset[str]]:
    """Candidate high sets: unions of nonempty strict vertex sets of ``omega`` with no entering arc.

    With ``semi_dense`` only the unique source component is returned (or
    nothing if the source is not unique).  Otherwise all candidates are
    returned, largest first; at most ``limit + 1`` are produced, so a caller
    can tell that the list was cut short.
    """
    everything = frozenset().union(*omega.nodes) if omega.number_of_nodes() else frozenset()
    if semi_dense:
        src = _unique_source(omega)
        return [src] if src is not None and src != everything else []
    dag = nx.condensation(omega)
    order = list(nx.topological_sort(dag))
    members = {n: frozenset().union(*dag.nodes[n]["members"]) for n in order}
    preds = {n: set(dag.predecessors(n)) for n in order}
    found: list[frozenset[str]] = []
    cap = None if limit is None else limit + 1

    # include/exclude each condensed vertex in topological order; a vertex can
    # only join once all of its predecessors have
    def walk(i: int, chosen: set[int], acc: frozenset[str]) -> bool:
        if cap is not None and len(found) >= cap:
            return False
        if i == len(order):
            if acc and acc != everything:
                found.append(acc)
            return True
        n = order[i]
        if preds[n] <= chosen:
            chosen.add(n)
            ok = walk(i + 1, chosen, acc | members[n])
            chosen.discard(n)
            if not ok:
                return False
        return walk(i + 1, chosen, acc)

    walk(0, set(), frozenset())
    found.sort(key=lambda h: (-len(h), sorted(h)))
    return found


# ---------------------------------------------------------------------------
# left and right


def build_m(ts: SmallNetSet, high: frozenset[str]) -> nx.Graph:
    """Graph on ``high``; edge when some item has a non-root common ancestor of the pair."""
    g = nx.Graph()
    g.add_nodes_from(high)
    for sn in ts.items:
        g.add_edges_from(
            (a, b) for a, b in _pairs(sn, shape_info(sn.shape).nonroot_ancestor) if a in high and b in high
        )
    return g


def build_w(ts: SmallNetSet, high: frozenset[str], m: nx.Graph) -> nx.Graph:
    """Components of ``m``; edge for every S1(x,y;z) with x, y high and z low."""
    comp_of: dict[str, frozenset[str]] = {}
    g = nx.Graph()
    for comp in nx.connected_components(m):
        comp = frozenset(comp)
        g.add_node(comp)
        comp_of.update(dict.fromkeys(comp, comp))
    for sn in ts.items:
        if sn.shape == "S1":
            x, y, z = sn.taxa
            if x in high and y in high and z not in high:
                g.add_edge(comp_of[x], comp_of[y])
    return g


def enumerate_feasible_bipartitions(w: nx.Graph) -> Iterator[tuple[frozenset[str], frozenset[str]]]:
    """Every proper 2-colouring of ``w``, as unordered pairs of taxa sets.

    The component holding the smallest taxon always lands in the first part;
    one part may come out empty.  Nothing is produced if ``w`` is not bipartite.
    """
    if nx.number_of_selfloops(w):
        return
    comps = []
    for comp in nx.connected_components(w):
        colour: dict[frozenset[str], int] = {}
        start = min(comp, key=min)
        colour[start] = 0
        queue = [start]
        while queue:
            v = queue.pop()
            for u in w[v]:
                if u not in colour:
                    colour[u] = 1 - colour[v]
                    queue.append(u)
                elif colour[u] == colour[v]:
                    return
        sides = [frozenset(), frozenset()]
        for v, c in colour.items():
            sides[c] = sides[c] | v
        comps.append((min(min(v) for v in comp), sides[0], sides[1]))
    comps.sort(key=lambda c: c[0])
    if not comps:
        return
    for mask in range(1 << (len(comps) - 1)):
        left, right = set(comps[0][1]), set(comps[0][2])
        for i, (_, a, b) in enumerate(comps[1:]):
            if mask >> i & 1:
                a, b = b, a
            left |= a
            right |= b
        yield frozenset(left), frozenset(right)


# ---------------------------------------------------------------------------
# pendant sidenetworks


def build_o(ts: SmallNetSet, side_sub: frozenset[str], high: frozenset[str]) -> nx.Graph:
    """Graph on ``side_sub`` whose components must share a pendant sidenetwork."""
    side_sub = frozenset(side_sub)
    g = nx.Graph()
    g.add_nodes_from(side_sub)
    for sn in ts.items:
        r = restrict_smallnet(sn, side_sub)
        if r is not None:
            g.add_edges_from(_pairs(r, shape_info(r.shape).cycle_ancestor))
            if r.shape == "T1":
                g.add_edge(r.taxa[0], r.taxa[1])
        if len(sn.taxa) == 3:
            info = shape_info(sn.shape)
            for i, j in info.same_pendant:
                (k,) = {0, 1, 2} - {i, j}
                a, b, c = sn.taxa[i], sn.taxa[j], sn.taxa[k]
                if c not in high and k not in info.high and a in side_sub and b in side_sub:
                    g.add_edge(a, b)
    return g


def build_d(ts: SmallNetSet, side_sub: frozenset[str], high: frozenset[str], o: nx.Graph) -> nx.DiGraph:
    """Components of ``o``; arc (possibly a loop) for every S2(x;y;z) with x, y in ``side_sub``, z low."""
    comp_of: dict[str, frozenset[str]] = {}
    g = nx.DiGraph()
    for comp in nx.connected_components(o):
        comp = frozenset(comp)
        g.add_node(comp)
        comp_of.update(dict.fromkeys(comp, comp))
    for sn in ts.items:
        if sn.shape == "S2":
            x, y, z = sn.taxa
            if x in comp_of and y in comp_of and z not in high:
                g.add_edge(comp_of[x], comp_of[y])
    return g


def partition_side(ts: SmallNetSet, side: frozenset[str], high: frozenset[str]) -> list[frozenset[str]] | None:
    """Leaf sets of the pendant sidenetworks on one side, root-nearest first.

    Repeatedly takes the source of ``D`` holding the smallest taxon; ``None``
    when some ``D`` has no source.
    """
    remaining = frozenset(side)
    blocks: list[frozenset[str]] = []
    while remaining:
        d = build_d(ts, remaining, high, build_o(ts, remaining, high))
        sources = [n for n in d if d.in_degree(n) == 0]
        if not sources:
            return None
        block = min(sources, key=min)
        blocks.append(block)
        remaining -= block
    return blocks


def assemble(
    guess: DecompositionGuess,
    subnets: Mapping[frozenset[str], Network],
    low_net: Network,
) -> Network:
    """Root cycle with the block networks pendant on its two sides and ``low_net`` below."""
    def tree(block: frozenset[str]) -> Decomposition:
        net = subnets[block]
        if net.taxa != block:
            raise ValueError(f"network on {sorted(net.taxa)} does not match block {sorted(block)}")
        return net.decomposition

    if low_net.taxa != guess.low:
        raise ValueError("low network does not match the low taxa")
    left = tuple(tree(b) for b in guess.left_blocks)
    right = tuple(tree(b) for b in guess.right_blocks)
    return to_network(Cycle(left, right, low_net.decomposition))


# ---------------------------------------------------------------------------
# the search


class _Unknown:
    def __repr__(self) -> str:
        return "UNKNOWN"


UNKNOWN = _Unknown()


def _split(items: Sequence[SmallNet], parts: Sequence[frozenset[str]]) -> list[list[SmallNet]]:
    """Restrict ``items`` to each part; items spread over parts go where two of their taxa are."""
    where = {x: i for i, p in enumerate(parts) for x in p}
    out: dict[int, set[SmallNet]] = defaultdict(set)
    for sn in items:
        idx = [where[t] for t in sn.taxa]
        if idx[0] == idx[1] or (len(idx) == 3 and idx[0] == idx[2]):
            home = idx[0]
        elif len(idx) == 3 and idx[1] == idx[2]:
            home = idx[1]
        else:
            continue
        r = restrict_smallnet(sn, parts[home])
        if r is not None:
            out[home].add(r)
    return [list(out[i]) for i in range(len(parts))]


def _spanning(items: Sequence[SmallNet], parts: Sequence[frozenset[str]]) -> list[SmallNet]:
    where = {x: i for i, p in enumerate(parts) for x in p}
    return [sn for sn in items if len({where[t] for t in sn.taxa}) > 1]


def _displays_all(tree: Decomposition, items: Iterable[SmallNet]) -> bool:
    paths = None
    for sn in items:
        if paths is None:
            paths = LeafPaths(tree)
        if classify_paths(paths, sn.taxa) != sn:
            return False
    return True


class _Search:
    def __init__(self, cfg: SolverConfig, allow_largish: bool = True) -> None:
        self.cfg = cfg
        self.allow_largish = allow_largish
        self.rng = random.Random(cfg.deterministic_seed) if cfg.deterministic_seed else None
        self.memo: dict[frozenset[str], object] = {}

    def solve(self, taxa: frozenset[str], items: list[SmallNet]):
        if len(taxa) == 1:
            return Leaf(next(iter(taxa)))
        if taxa not in self.memo:
            self.memo[taxa] = self._solve(taxa, items)
        return self.memo[taxa]

    def _children(self, parts: Sequence[frozenset[str]], items: list[SmallNet]):
        """Solve every part; None if one is unsolvable, UNKNOWN if one is undecided."""
        out, unknown = [], False
        for part, sub in zip(parts, _split(items, parts)):
            t = self.solve(part, sub)
            if t is None:
                return None
            if t is UNKNOWN:
                unknown = True
            out.append(t)
        return UNKNOWN if unknown else out

    def _solve(self, taxa: frozenset[str], items: list[SmallNet]):
        ts = SmallNetSet._trusted(frozenset(items), taxa)
        comps = sorted((frozenset(c) for c in nx.connected_components(build_r(ts))), key=min)
        if len(comps) > 1:
            subs = self._children(comps, items)
            if subs is None or subs is UNKNOWN:
                return subs
            tree = caterpillar(subs)
            if not _displays_all(tree, _spanning(items, comps)):
                raise AssertionError("root join does not display the instance")
            return tree

        largish_items = any(sn.shape in LARGISH for sn in items)
        options = [self._tiny]
        if largish_items and self.allow_largish:
            options = [self._tiny, self._largish] if self.cfg.explore_tiny_first else [self._largish, self._tiny]
        unknown = False
        for option in options:
            result = option(taxa, items, ts)
            if result is UNKNOWN:
                unknown = True
            elif result is not False:
                return result  # a tree, or None for a definitive refutation
        return UNKNOWN if unknown else None

    def _tiny(self, taxa, items, ts):
        high = closed_union(build_omegadagger(ts))
        if high is None:
            return False
        parts = [high, taxa - high]
        subs = self._children(parts, items)
        if subs is None or subs is UNKNOWN:
            return subs
        tree = Cycle((subs[0],), (), subs[1])
        return tree if _displays_all(tree, _spanning(items, parts)) else False

    def _largish(self, taxa, items, ts):
        budget = self.cfg.guess_budget
        omega = build_omega(ts, build_k(ts))
        candidates: list[frozenset[str]] = []
        if is_semi_dense(ts):
            candidates = enumerate_high_sets(omega, semi_dense=True)
        rest = enumerate_high_sets(omega, limit=budget)
        truncated = len(rest) > budget
        candidates += [h for h in rest[:budget] if h not in candidates]
        if self.rng is not None:
            self.rng.shuffle(candidates)
        guesses, unknown = 0, truncated
        for high in candidates:
            low = taxa - high
            w = build_w(ts, high, build_m(ts, high))
            splits = enumerate_feasible_bipartitions(w)
            if self.rng is not None:
                splits = list(itertools.islice(splits, budget + 1))
                self.rng.shuffle(splits)
            for left, right in splits:
                guesses += 1
                if guesses > budget:
                    return UNKNOWN
                left_blocks = partition_side(ts, left, high)
                if left_blocks is None:
                    continue
                right_blocks = partition_side(ts, right, high)
                if right_blocks is None:
                    continue
                parts = left_blocks + right_blocks + [low]
                subs = self._children(parts, items)
                if subs is None:
                    return None
                if subs is UNKNOWN:
                    unknown = True
                    continue
                q = len(left_blocks)
                tree = Cycle(tuple(subs[:q]), tuple(subs[q:-1]), subs[-1])
                if _displays_all(tree, _spanning(items, parts)):
                    return tree
        return UNKNOWN if unknown else False


def _run(ts: SmallNetSet, cfg: SolverConfig, allow_largish: bool) -> Network | None:
    if not ts.taxa:
        raise ValueError("empty taxa set")
    items = list(ts.items)
    result = _Search(cfg, allow_largish).solve(ts.taxa, items)
    if result is UNKNOWN:
        raise SearchBudgetExceeded(f"guess budget {cfg.guess_budget} exhausted")
    if result is None:
        return None
    # every input item was checked, unrestricted, at the node where its taxa
    # separate; that node's subtree is a pendant subnetwork of the result
    return to_network(result)


def solve(ts: SmallNetSet, cfg: SolverConfig | None = None) -> Network | None:
    """A binary level-1 network displaying every item of ``ts``, or ``None`` if none exists.

    Raises :class:`SearchBudgetExceeded` when the guess budget runs out before
    the answer is known.
    """
    return _run(ts, cfg or SolverConfig(), allow_largish=True)


def solve_tiny(ts: SmallNetSet, cfg: SolverConfig | None = None) -> Network | None:
    """Polynomial-time variant for inputs without S1/S2 trinets."""
    bad = sorted(str(sn) for sn in ts.items if sn.shape in LARGISH)
    if bad:
        raise ValueError(f"largish-cycle trinets are not allowed here: {', '.join(bad[:5])}")
    return _run(ts, cfg or SolverConfig(), allow_largish=False)


def solve_supernetwork(nets: Sequence[Network], cfg: SolverConfig | None = None) -> Network | None:
    """A network displaying every network in ``nets``, via their binets and trinets."""
    items: set[SmallNet] = set()
    taxa: set[str] = set()
    tiny = True
    for net in nets:
        problems = validate(net)
        if problems:
            raise ValueError("invalid input network: " + "; ".join(problems))
        if len(net.taxa) < 2:
            raise ValueError("input networks need at least two leaves")
        sub = extract_all(net)
        items |= sub.items
        taxa |= net.taxa
        tiny = tiny and not any(sn.shape in LARGISH for sn in sub.items)
    if not taxa:
        raise ValueError("no input networks")
    ts = SmallNetSet(frozenset(items), frozenset(taxa))
    return solve_tiny(ts, cfg) if tiny else solve(ts, cfg)
