"""Binets and trinets: the catalog, classification and extraction.

There are two binary level-1 binets and eight binary level-1 trinets up to
relabelling.  A :class:`SmallNet` names one of them together with its taxa in
slot order; the slot conventions are::

    T(x,y)      cherry                      N(x;y)      3-cycle, x low, y on the side
    T1(x,y;z)   tree with cluster {x,y}     N3(x;y;z)   root joins N(x;y) and z
    N1(x,y;z)   3-cycle, side T(x,y), z low N4(x;y;z)   3-cycle, side N(x;y), z low
    N2(x,y;z)   3-cycle, side z, low T(x,y) N5(x;y;z)   3-cycle, side z, low N(x;y)
    S1(x,y;z)   4-cycle, x and y on opposite sides, z low
    S2(x;y;z)   4-cycle, x above y on the same side, z low
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .decomposition import CYCLE, JOIN, LOW, Cycle, Decomposition, Join, Leaf, LeafPaths, code, to_network
from .network import Network, _blobs, check_taxon, restrict, side_decomposition

__all__ = [
    "SHAPES",
    "BINET_SHAPES",
    "SYMMETRIC",
    "SmallNet",
    "SmallNetSet",
    "realize",
    "realize_tree",
    "classify",
    "classify_paths",
    "extract_all",
    "restrict_smallnet",
    "restrict_set",
    "is_dense",
    "is_semi_dense",
    "shape_info",
]

SHAPES = ("T", "N", "T1", "S1", "S2", "N1", "N2", "N3", "N4", "N5")
BINET_SHAPES = frozenset({"T", "N"})
SYMMETRIC = frozenset({"T", "T1", "S1", "N1", "N2"})
LARGISH = frozenset({"S1", "S2"})
_ORDER = {s: i for i, s in enumerate(SHAPES)}


@dataclass(frozen=True, order=False)
class SmallNet:
    """A binet or trinet; symmetric slot pairs are stored sorted."""

    shape: str
    taxa: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.shape not in _ORDER:
            raise ValueError(f"unknown shape {self.shape!r}")
        taxa = tuple(self.taxa)
        want = 2 if self.shape in BINET_SHAPES else 3
        if len(taxa) != want:
            raise ValueError(f"{self.shape} takes {want} taxa, got {len(taxa)}")
        if len(set(taxa)) != want:
            raise ValueError(f"repeated taxon in {self.shape}{taxa}")
        for t in taxa:
            check_taxon(t)
        if self.shape in SYMMETRIC and taxa[0] > taxa[1]:
            taxa = (taxa[1], taxa[0]) + taxa[2:]
        object.__setattr__(self, "taxa", taxa)

    @classmethod
    def _trusted(cls, shape: str, taxa: tuple[str, ...]) -> "SmallNet":
        """Skip validation; ``taxa`` must already be valid and normalised."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "shape", shape)
        object.__setattr__(obj, "taxa", taxa)
        return obj

    @property
    def leaves(self) -> frozenset[str]:
        return frozenset(self.taxa)

    @property
    def is_binet(self) -> bool:
        return self.shape in BINET_SHAPES

    def sort_key(self) -> tuple:
        return (len(self.taxa), _ORDER[self.shape], self.taxa)

    def __str__(self) -> str:
        t = self.taxa
        if self.shape == "T":
            return f"T({t[0]},{t[1]})"
        if self.shape == "N":
            return f"N({t[0]};{t[1]})"
        if self.shape in SYMMETRIC:
            return f"{self.shape}({t[0]},{t[1]};{t[2]})"
        return f"{self.shape}({t[0]};{t[1]};{t[2]})"


@dataclass(frozen=True)
class SmallNetSet:
    """A set of small nets over a declared taxa set (which may exceed their union)."""

    items: frozenset[SmallNet]
    taxa: frozenset[str]

    def __post_init__(self) -> None:
        items = frozenset(self.items)
        taxa = frozenset(self.taxa)
        for t in taxa:
            check_taxon(t)
        stray = frozenset().union(*(i.leaves for i in items)) - taxa
        if stray:
            raise ValueError(f"small nets use undeclared taxa {sorted(stray)}")
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "taxa", taxa)

    @classmethod
    def _trusted(cls, items: frozenset[SmallNet], taxa: frozenset[str]) -> "SmallNetSet":
        obj = object.__new__(cls)
        object.__setattr__(obj, "items", items)
        object.__setattr__(obj, "taxa", taxa)
        return obj

    @classmethod
    def of(cls, items: Iterable[SmallNet], taxa: Iterable[str] | None = None) -> "SmallNetSet":
        items = frozenset(items)
        if taxa is None:
            taxa = frozenset().union(*(i.leaves for i in items))
        return cls(items, frozenset(taxa))

    def __iter__(self):
        return iter(sorted(self.items, key=SmallNet.sort_key))

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, item: object) -> bool:
        return item in self.items

    def restrict(self, sub: Iterable[str]) -> "SmallNetSet":
        return restrict_set(self, sub)

    @property
    def binets(self) -> "SmallNetSet":
        return SmallNetSet(frozenset(i for i in self.items if i.is_binet), self.taxa)


# ---------------------------------------------------------------------------
# realization and classification


def realize_tree(sn: SmallNet) -> Decomposition:
    x, y = Leaf(sn.taxa[0]), Leaf(sn.taxa[1])
    if sn.shape == "T":
        return Join(x, y)
    if sn.shape == "N":
        return Cycle((y,), (), x)
    z = Leaf(sn.taxa[2])
    return {
        "T1": lambda: Join(Join(x, y), z),
        "N3": lambda: Join(Cycle((y,), (), x), z),
        "N1": lambda: Cycle((Join(x, y),), (), z),
        "N4": lambda: Cycle((Cycle((y,), (), x),), (), z),
        "N2": lambda: Cycle((z,), (), Join(x, y)),
        "N5": lambda: Cycle((z,), (), Cycle((y,), (), x)),
        "S1": lambda: Cycle((x,), (y,), z),
        "S2": lambda: Cycle((x, y), (), z),
    }[sn.shape]()


def realize(sn: SmallNet) -> Network:
    return to_network(realize_tree(sn))


_PLACEHOLDERS = ("0", "1", "2")


@lru_cache(maxsize=None)
def _code_table() -> dict[str, tuple[str, tuple[int, ...]]]:
    """Canonical code over placeholder taxa -> (shape, slot -> placeholder index)."""
    table = {}
    for shape in SHAPES:
        k = 2 if shape in BINET_SHAPES else 3
        for perm in itertools.permutations(range(k)):
            sn = SmallNet(shape, tuple(_PLACEHOLDERS[i] for i in perm))
            table.setdefault(code(realize_tree(sn)), (shape, perm))
    return table


def classify(net: Network) -> SmallNet:
    """The catalog entry equivalent to a 2- or 3-leaf binary level-1 network."""
    taxa = sorted(net.taxa)
    if len(taxa) not in (2, 3):
        raise ValueError(f"expected 2 or 3 leaves, got {len(taxa)}")
    tree = net.decomposition  # raises for invalid networks
    renamed = _rename(tree, {t: _PLACEHOLDERS[i] for i, t in enumerate(taxa)})
    shape, perm = _code_table()[code(renamed)]
    return SmallNet(shape, tuple(taxa[i] for i in perm))


def _rename(t: Decomposition, mapping: dict[str, str]) -> Decomposition:
    if isinstance(t, Leaf):
        return Leaf(mapping[t.taxon])
    if isinstance(t, Join):
        return Join(_rename(t.first, mapping), _rename(t.second, mapping))
    return Cycle(
        tuple(_rename(x, mapping) for x in t.left),
        tuple(_rename(x, mapping) for x in t.right),
        _rename(t.low, mapping),
    )


def _binet_at(paths: LeafPaths, x: str, y: str) -> tuple[int, int, tuple, tuple, str, tuple[str, str]]:
    depth, node, sx, sy = paths.split(x, y)
    if paths.kind[node] == CYCLE and sx[0] == LOW:
        return depth, node, sx, sy, "N", (x, y)
    if paths.kind[node] == CYCLE and sy[0] == LOW:
        return depth, node, sx, sy, "N", (y, x)
    return depth, node, sx, sy, "T", (x, y) if x < y else (y, x)


def classify_paths(paths: LeafPaths, taxa: Iterable[str]) -> SmallNet:
    """Small net displayed on ``taxa`` (2 or 3 leaves), read off the root paths."""
    taxa = tuple(taxa)
    if len(taxa) == 2:
        b = _binet_at(paths, *taxa)
        return SmallNet._trusted(b[4], b[5])
    x, y, z = taxa
    dxy, dxz = _binet_at(paths, x, y), _binet_at(paths, x, z)
    # when two pairs part at different depths the deeper pair is the inner one
    if dxy[0] > dxz[0]:
        pair, o = dxy, z
        node, shared, oslot = dxz[1], dxz[2], dxz[3]
    elif dxz[0] > dxy[0]:
        pair, o = dxz, y
        node, shared, oslot = dxy[1], dxy[2], dxy[3]
    else:
        dyz = _binet_at(paths, y, z)
        if dyz[0] == dxy[0]:
            return _three_way({x: dxy[2], y: dxy[3], z: dxz[3]})
        pair, o = dyz, x
        node, shared, oslot = dxy[1], dxy[3], dxy[2]
    tree = pair[4] == "T"
    if paths.kind[node] == JOIN or (shared[0] != LOW and oslot[0] != LOW):
        shape = "T1" if tree else "N3"
    elif shared[0] == LOW:
        shape = "N2" if tree else "N5"
    else:
        shape = "N1" if tree else "N4"
    return SmallNet._trusted(shape, pair[5] + (o,))


def _three_way(slots: dict[str, tuple[int, int]]) -> SmallNet:
    lows = [t for t, s in slots.items() if s[0] == LOW]
    if lows:
        (w,) = lows
        a, b = sorted((t for t in slots if t != w), key=lambda t: slots[t])
        if slots[a][0] == slots[b][0]:
            return SmallNet("S2", (a, b, w))
        return SmallNet("S1", (a, b, w))
    by_side: dict[int, list[str]] = {}
    for t, s in slots.items():
        by_side.setdefault(s[0], []).append(t)
    if len(by_side) == 1:
        top, b, c = sorted(slots, key=lambda t: slots[t])
        return SmallNet("T1", (b, c, top))
    pair = next(v for v in by_side.values() if len(v) == 2)
    (single,) = (v[0] for v in by_side.values() if len(v) == 1)
    return SmallNet("T1", (pair[0], pair[1], single))


# ---------------------------------------------------------------------------
# extraction and restriction


def extract_all(net: Network, binets_only: bool = False) -> SmallNetSet:
    """Every binet and trinet displayed by ``net`` (only the binets if asked)."""
    taxa = sorted(net.taxa)
    if len(taxa) < 2:
        raise ValueError("need at least two leaves")
    paths = LeafPaths(net.decomposition)
    items = [classify_paths(paths, p) for p in itertools.combinations(taxa, 2)]
    if not binets_only:
        items += [classify_paths(paths, t) for t in itertools.combinations(taxa, 3)]
    return SmallNetSet._trusted(frozenset(items), frozenset(taxa))


@lru_cache(maxsize=None)
def _drop_table() -> dict[tuple[str, int], tuple[str, tuple[int, ...]]]:
    """(trinet shape, dropped slot) -> (binet shape, kept slot indices in binet order)."""
    out = {}
    for shape in SHAPES:
        if shape in BINET_SHAPES:
            continue
        sn = SmallNet(shape, _PLACEHOLDERS)
        net = realize(sn)
        for drop in range(3):
            keep = [t for i, t in enumerate(_PLACEHOLDERS) if i != drop]
            b = classify(restrict(net, keep))
            out[(shape, drop)] = (b.shape, tuple(_PLACEHOLDERS.index(t) for t in b.taxa))
    return out


def restrict_smallnet(sn: SmallNet, sub: Iterable[str] | frozenset[str]) -> SmallNet | None:
    """``sn`` restricted to ``sub``; ``None`` if fewer than two of its taxa survive."""
    kept = [i for i, t in enumerate(sn.taxa) if t in sub]
    if len(kept) == len(sn.taxa):
        return sn
    if len(kept) < 2:
        return None
    (drop,) = {0, 1, 2} - set(kept)
    shape, idx = _drop_table()[(sn.shape, drop)]
    a, b = sn.taxa[idx[0]], sn.taxa[idx[1]]
    if shape == "T" and a > b:
        a, b = b, a
    return SmallNet._trusted(shape, (a, b))


def restrict_set(ts: SmallNetSet, sub: Iterable[str]) -> SmallNetSet:
    sub = frozenset(sub)
    if not sub:
        raise ValueError("taxon subset must be nonempty")
    items = (restrict_smallnet(i, sub) for i in ts.items)
    return SmallNetSet(frozenset(i for i in items if i is not None), ts.taxa & sub)


def _pairs(ts: SmallNetSet) -> set[frozenset[str]]:
    return {frozenset(p) for i in ts.items for p in itertools.combinations(i.taxa, 2)}


def is_dense(ts: SmallNetSet) -> bool:
    """A trinet on every 3-subset of the declared taxa."""
    triples = {i.leaves for i in ts.items if not i.is_binet}
    return all(frozenset(c) in triples for c in itertools.combinations(sorted(ts.taxa), 3))


def is_semi_dense(ts: SmallNetSet) -> bool:
    """Some small net on every pair of the declared taxa."""
    pairs = _pairs(ts)
    return all(frozenset(c) in pairs for c in itertools.combinations(sorted(ts.taxa), 2))


# ---------------------------------------------------------------------------
# per-shape structural facts, read off the realized graphs


@dataclass(frozen=True)
class ShapeInfo:
    cycle_rooted: bool
    largish: bool
    high: frozenset[int]
    # slot pairs (i, j), i < j
    nonroot_ancestor: frozenset[tuple[int, int]]  # share an ancestor other than the root
    cycle_ancestor: frozenset[tuple[int, int]]  # some cycle holds the root or a common ancestor
    same_pendant: frozenset[tuple[int, int]]  # both high, same pendant sidenetwork


@lru_cache(maxsize=None)
def shape_info(shape: str) -> ShapeInfo:
    k = 2 if shape in BINET_SHAPES else 3
    net = realize(SmallNet(shape, _PLACEHOLDERS[:k]))
    root = net.root
    anc: dict[int, set[int]] = {}
    for slot in range(k):
        v = net.vertex_of(_PLACEHOLDERS[slot])
        seen, todo = set(), [v]
        while todo:
            u = todo.pop()
            if u not in seen:
                seen.add(u)
                todo.extend(net.parents(u))
        anc[slot] = seen - {v}
    cycles = _blobs(net)
    sides = side_decomposition(net)
    cycle_rooted = any(root in c for c in cycles)
    high = frozenset(i for i in range(k) if _PLACEHOLDERS[i] in sides.high)
    nonroot, cyc, pend = set(), set(), set()
    for i, j in itertools.combinations(range(k), 2):
        common = anc[i] & anc[j]
        if common - {root}:
            nonroot.add((i, j))
        if any(root in c or common & c for c in cycles):
            cyc.add((i, j))
        if cycle_rooted:
            blocks = sides.left_blocks + sides.right_blocks
            if any({_PLACEHOLDERS[i], _PLACEHOLDERS[j]} <= b for b in blocks):
                pend.add((i, j))
    return ShapeInfo(
        cycle_rooted=cycle_rooted,
        largish=shape in LARGISH,
        high=high,
        nonroot_ancestor=frozenset(nonroot),
        cycle_ancestor=frozenset(cyc),
        same_pendant=frozenset(pend),
    )
