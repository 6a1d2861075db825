"""Recursive decomposition of binary level-1 networks.

Every binary level-1 network is exactly one of

* a single leaf,
* a :class:`Join` -- the root is a tree vertex with two pendant subnetworks, or
* a :class:`Cycle` -- the root lies on a cycle; each internal vertex of the two
  root-to-reticulation paths carries one pendant sidenetwork and the
  reticulation carries the low subnetwork.

The decomposition is unique up to swapping the two children of a join and the
two sides of a cycle, which makes it the natural carrier for canonical codes,
serialization, fast small-net extraction and network assembly in the solvers.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Union

from .network import Network, _blobs

__all__ = [
    "Leaf",
    "Join",
    "Cycle",
    "Decomposition",
    "leaves",
    "code",
    "canonical",
    "from_network",
    "to_network",
    "caterpillar",
    "chain",
    "restrict_tree",
    "tinyfy_tree",
    "LeafPaths",
]


@dataclass(frozen=True, eq=False)
class Leaf:
    taxon: str


@dataclass(frozen=True, eq=False)
class Join:
    first: "Decomposition"
    second: "Decomposition"


@dataclass(frozen=True, eq=False)
class Cycle:
    left: tuple["Decomposition", ...]
    right: tuple["Decomposition", ...]
    low: "Decomposition"

    def __post_init__(self) -> None:
        if not self.left and not self.right:
            raise ValueError("a cycle needs at least one pendant sidenetwork")

    @property
    def size(self) -> int:
        return len(self.left) + len(self.right) + 2


Decomposition = Union[Leaf, Join, Cycle]


def leaves(t: Decomposition) -> frozenset[str]:
    out: list[str] = []
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            out.append(node.taxon)
        elif isinstance(node, Join):
            stack += (node.first, node.second)
        else:
            stack += (*node.left, *node.right, node.low)
    return frozenset(out)


def _side_key(codes: list[str]) -> tuple:
    # longer side first, then lexicographic
    return (-len(codes), codes)


def code(t: Decomposition) -> str:
    """Canonical code.

    Leaves are their taxon, joins ``(a,b)`` with sorted children, cycles
    ``(l1,l2;r1;low)`` with the two sides in canonical order.  Taxa never
    contain ``(),;`` so the code parses back unambiguously.
    """
    if isinstance(t, Leaf):
        return t.taxon
    if isinstance(t, Join):
        a, b = sorted((code(t.first), code(t.second)))
        return f"({a},{b})"
    left = [code(x) for x in t.left]
    right = [code(x) for x in t.right]
    first, second = sorted((left, right), key=_side_key)
    return f"({','.join(first)};{','.join(second)};{code(t.low)})"


def canonical(t: Decomposition) -> Decomposition:
    """Same network with join children and cycle sides in canonical order."""
    return _canonical(t)[0]


def _canonical(t: Decomposition) -> tuple[Decomposition, str]:
    if isinstance(t, Leaf):
        return t, t.taxon
    if isinstance(t, Join):
        (ca, a), (cb, b) = sorted((_canonical(t.first), _canonical(t.second)), key=lambda p: p[1])
        return Join(ca, cb), f"({a},{b})"
    left = [_canonical(x) for x in t.left]
    right = [_canonical(x) for x in t.right]
    low, low_code = _canonical(t.low)
    first, second = sorted((left, right), key=lambda side: _side_key([c for _, c in side]))
    node = Cycle(tuple(n for n, _ in first), tuple(n for n, _ in second), low)
    text = f"({','.join(c for _, c in first)};{','.join(c for _, c in second)};{low_code})"
    return node, text


def chain(parts: Iterable[Decomposition]) -> Decomposition:
    """Right-nested chain ``(p1,(p2,(...,pk)))``: what a cycle side becomes without its reticulation."""
    parts = list(parts)
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Join(p, out)
    return out


def caterpillar(parts: Iterable[Decomposition]) -> Decomposition:
    """Left-leaning caterpillar ``(((p1,p2),p3),...)`` used to refine a multifurcating root."""
    parts = list(parts)
    out = parts[0]
    for p in parts[1:]:
        out = Join(out, p)
    return out


# ---------------------------------------------------------------------------
# conversion to and from graphs


def to_network(t: Decomposition) -> Network:
    arcs: list[tuple[int, int]] = []
    labels: dict[int, str] = {}
    counter = iter(range(1 << 62))

    def build(node: Decomposition) -> int:
        v = next(counter)
        if isinstance(node, Leaf):
            labels[v] = node.taxon
        elif isinstance(node, Join):
            arcs.append((v, build(node.first)))
            arcs.append((v, build(node.second)))
        else:
            r = next(counter)
            for side in (node.left, node.right):
                prev = v
                for pendant in side:
                    u = next(counter)
                    arcs.append((prev, u))
                    arcs.append((u, build(pendant)))
                    prev = u
                arcs.append((prev, r))
            arcs.append((r, build(node.low)))
        return v

    root = build(t)
    return Network(arcs, labels, [root])


def from_network(net: Network) -> Decomposition:
    """Decompose a valid binary level-1 network (raises ``ValueError`` otherwise)."""
    from .network import validate

    problems = validate(net)
    if problems:
        raise ValueError("not a binary level-1 network: " + "; ".join(problems))
    cycles: dict[int, set[int]] = {}
    for blob in _blobs(net):
        source = next(v for v in blob if not any(p in blob for p in net.parents(v)))
        cycles[source] = blob

    def walk(v: int) -> Decomposition:
        if v in net.labels:
            return Leaf(net.labels[v])
        if v in cycles:
            blob = cycles[v]
            sides = []
            retic = None
            for first in net.children(v):
                side = []
                u = first
                while sum(p in blob for p in net.parents(u)) < 2:
                    (out,) = [c for c in net.children(u) if c not in blob]
                    (nxt,) = [c for c in net.children(u) if c in blob]
                    side.append(walk(out))
                    u = nxt
                retic = u
                sides.append(tuple(side))
            (low,) = net.children(retic)
            return Cycle(sides[0], sides[1], walk(low))
        kids = net.children(v)
        if len(kids) != 2:
            raise ValueError(f"vertex {v} is not a binary tree vertex")
        return Join(walk(kids[0]), walk(kids[1]))

    return walk(net.root)


# ---------------------------------------------------------------------------
# restriction on the decomposition


def restrict_tree(t: Decomposition, sub: Iterable[str]) -> Decomposition | None:
    """``t|sub`` computed on the decomposition; ``None`` when ``sub`` misses ``t``."""
    sub = frozenset(sub)

    def go(node: Decomposition) -> Decomposition | None:
        if isinstance(node, Leaf):
            return node if node.taxon in sub else None
        if isinstance(node, Join):
            a, b = go(node.first), go(node.second)
            if a is None or b is None:
                return a if b is None else b
            return Join(a, b)
        left = [x for x in map(go, node.left) if x is not None]
        right = [x for x in map(go, node.right) if x is not None]
        low = go(node.low)
        if low is None:
            # reticulation unused: the cycle collapses into two chains
            sides = [chain(s) for s in (left, right) if s]
            if not sides:
                return None
            return sides[0] if len(sides) == 1 else Join(sides[0], sides[1])
        if not left and not right:
            return low
        return Cycle(tuple(left), tuple(right), low)

    return go(t)


def tinyfy_tree(t: Decomposition) -> Decomposition:
    if isinstance(t, Leaf):
        return t
    if isinstance(t, Join):
        return Join(tinyfy_tree(t.first), tinyfy_tree(t.second))
    left = [tinyfy_tree(x) for x in t.left]
    right = [tinyfy_tree(x) for x in t.right]
    low = tinyfy_tree(t.low)
    if len(left) + len(right) == 1:
        return Cycle(tuple(left), tuple(right), low)
    sides = [chain(s) for s in (left, right) if s]
    side = sides[0] if len(sides) == 1 else Join(sides[0], sides[1])
    return Cycle((side,), (), low)


# ---------------------------------------------------------------------------
# root paths for constant-time pair and triple queries

JOIN, CYCLE = 0, 1
LEFT, RIGHT, LOW = 1, 2, 3


class LeafPaths:
    """Root-to-leaf paths through the decomposition.

    A path entry stands for ``(node_id, side, position)`` where ``side`` is 0
    for a join child, LEFT/RIGHT for a cycle side (position counted from the
    root) and LOW for the subnetwork below the reticulation.  Entries are
    packed into single ints so that common prefixes are cheap to find.
    """

    def __init__(self, t: Decomposition) -> None:
        self.kind: list[int] = []
        self.paths: dict[str, list[int]] = {}
        stack: list[tuple[Decomposition, list[int]]] = [(t, [])]
        while stack:
            node, prefix = stack.pop()
            if isinstance(node, Leaf):
                self.paths[node.taxon] = prefix
                continue
            nid = len(self.kind) << 32
            if isinstance(node, Join):
                self.kind.append(JOIN)
                stack.append((node.first, prefix + [nid]))
                stack.append((node.second, prefix + [nid | 1]))
            else:
                self.kind.append(CYCLE)
                for i, x in enumerate(node.left):
                    stack.append((x, prefix + [nid | LEFT << 24 | i]))
                for i, x in enumerate(node.right):
                    stack.append((x, prefix + [nid | RIGHT << 24 | i]))
                stack.append((node.low, prefix + [nid | LOW << 24]))

    @property
    def taxa(self) -> frozenset[str]:
        return frozenset(self.paths)

    def split(self, x: str, y: str) -> tuple[int, int, tuple[int, int], tuple[int, int]]:
        """Where the paths to ``x`` and ``y`` part: (depth, node, slot of x, slot of y)."""
        px, py = self.paths[x], self.paths[y]
        k = len(os.path.commonprefix([px, py]))
        ex, ey = px[k], py[k]
        return k, ex >> 32, (ex >> 24 & 0xFF, ex & 0xFFFFFF), (ey >> 24 & 0xFF, ey & 0xFFFFFF)
