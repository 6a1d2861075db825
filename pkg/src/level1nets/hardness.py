"""SetSplitting as trinet displayability.

Every triple ``{u, v, w}`` (listed in universe order) with index ``i``
contributes nine trinets over the taxa ``u_0``, ``u_i``, ``u_ip`` (and the
same for ``v`` and ``w``) plus the shared taxon ``b``.  A network displaying
the result hangs the ``u_0`` taxa on the two sides of a root cycle, and the
sides are a set splitting.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .decomposition import LeafPaths, restrict_tree
from .network import Network, check_taxon
from .decomposition import Cycle
from .smallnets import SmallNet, SmallNetSet, classify_paths

__all__ = [
    "SetSplittingInstance",
    "MAX_UNIVERSE",
    "reduce",
    "brute_setsplitting",
    "is_splitting",
    "extract_splitting",
    "parse_instance",
    "serialize_instance",
    "random_instance",
]

MAX_UNIVERSE = 20
Splitting = tuple[frozenset[str], frozenset[str]]


@dataclass(frozen=True)
class SetSplittingInstance:
    universe: tuple[str, ...]
    triples: tuple[tuple[str, str, str], ...]

    def __post_init__(self) -> None:
        universe = tuple(self.universe)
        if len(set(universe)) != len(universe):
            raise ValueError("universe has repeated elements")
        for u in universe:
            check_taxon(u)
        rank = {u: i for i, u in enumerate(universe)}
        triples = []
        for c in self.triples:
            c = tuple(c)
            if len(c) != 3 or len(set(c)) != 3:
                raise ValueError(f"not a 3-subset: {c}")
            missing = [u for u in c if u not in rank]
            if missing:
                raise ValueError(f"triple {c} uses elements outside the universe: {missing}")
            triples.append(tuple(sorted(c, key=rank.__getitem__)))
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "triples", tuple(triples))


def _names(inst: SetSplittingInstance) -> dict[tuple[str, int, bool], str]:
    """Taxon for (element, triple index or 0, primed)."""
    if "b" in inst.universe:
        raise ValueError("the element name 'b' is reserved for the shared low taxon")
    names = {(u, 0, False): f"{u}_0" for u in inst.universe}
    for i, c in enumerate(inst.triples, 1):
        for u in c:
            names[(u, i, False)] = f"{u}_{i}"
            names[(u, i, True)] = f"{u}_{i}p"
    taken = list(names.values()) + ["b"]
    if len(set(taken)) != len(taken):
        dup = sorted(n for n in set(taken) if taken.count(n) > 1)
        raise ValueError(f"generated taxon names collide: {dup}")
    return names


def reduce(inst: SetSplittingInstance) -> SmallNetSet:
    """Trinet set that some level-1 network displays iff ``inst`` has a splitting."""
    if not inst.triples:
        raise ValueError("the reduction needs at least one triple")
    n = _names(inst)
    items = []
    for i, (u, v, w) in enumerate(inst.triples, 1):
        def t(e: str, primed: bool = False) -> str:
            return n[(e, i, primed)]

        items += [
            SmallNet("T1", (t(v), t(v, True), t(u))),
            SmallNet("T1", (t(w), t(w, True), t(v))),
            SmallNet("T1", (t(u), t(u, True), t(w))),
            SmallNet("S2", (t(v), t(v, True), "b")),
            SmallNet("S2", (t(w), t(w, True), "b")),
            SmallNet("S2", (t(u), t(u, True), "b")),
            SmallNet("S1", (t(u), n[(u, 0, False)], "b")),
            SmallNet("S1", (t(v), n[(v, 0, False)], "b")),
            SmallNet("S1", (t(w), n[(w, 0, False)], "b")),
        ]
    return SmallNetSet(frozenset(items), frozenset(n.values()) | {"b"})


def is_splitting(inst: SetSplittingInstance, a: frozenset[str], b: frozenset[str]) -> bool:
    universe = set(inst.universe)
    if a & b or (a | b) != universe:
        return False
    return all(set(c) & a and set(c) & b for c in inst.triples)


def brute_setsplitting(inst: SetSplittingInstance) -> Splitting | None:
    """First splitting in a scan with the first element fixed in ``A``, else ``None``."""
    u = inst.universe
    if len(u) > MAX_UNIVERSE:
        raise ValueError(f"brute force supports at most {MAX_UNIVERSE} elements")
    if not u:
        return frozenset(), frozenset()
    rest = u[1:]
    for mask in range(1 << len(rest)):
        a = frozenset([u[0]] + [x for j, x in enumerate(rest) if mask >> j & 1])
        b = frozenset(u) - a
        if is_splitting(inst, a, b):
            return a, b
    return None


def extract_splitting(net: Network, inst: SetSplittingInstance) -> Splitting:
    """Read a splitting off the two sides of the root cycle of ``net``.

    ``net`` must display ``reduce(inst)``.  Elements in no triple do not
    constrain the network and are put in ``A``.
    """
    ts = reduce(inst)
    if not ts.taxa <= net.taxa:
        raise ValueError("network misses taxa of the reduction")
    used = frozenset().union(*(sn.leaves for sn in ts.items))
    tree = restrict_tree(net.decomposition, used)
    paths = LeafPaths(tree)
    bad = [sn for sn in ts if classify_paths(paths, sn.taxa) != sn]
    if bad:
        raise ValueError(f"network does not display the reduction, e.g. {bad[0]}")
    if not isinstance(tree, Cycle):
        raise ValueError("network is not cycle-rooted on the reduction taxa")
    side_of = {}
    for side, blocks in (("A", tree.left), ("B", tree.right)):
        for block in blocks:
            for leaf in LeafPaths(block).taxa:
                side_of[leaf] = side
    a, b = set(), set()
    used_elems = {u for c in inst.triples for u in c}
    for u in inst.universe:
        if u not in used_elems:
            a.add(u)
            continue
        side = side_of.get(f"{u}_0")
        if side is None:
            raise ValueError(f"{u}_0 is not high in the network")
        (a if side == "A" else b).add(u)
    a, b = frozenset(a), frozenset(b)
    if not is_splitting(inst, a, b):
        raise ValueError("the sides of the root cycle do not split every triple")
    return a, b


# ---------------------------------------------------------------------------
# instance files and generation


def parse_instance(text: str) -> SetSplittingInstance:
    """First line: the ordered universe; each further line: one triple.

    Tokens are separated by whitespace or commas; lines starting with ``#``
    and blank lines are ignored.
    """
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        rows.append((lineno, line.replace(",", " ").split()))
    if not rows:
        raise ValueError("instance file is empty")
    universe = rows[0][1]
    triples = []
    for lineno, toks in rows[1:]:
        if len(toks) != 3:
            raise ValueError(f"line {lineno}: expected 3 elements, got {len(toks)}")
        triples.append(tuple(toks))
    try:
        return SetSplittingInstance(tuple(universe), tuple(triples))
    except ValueError as exc:
        raise ValueError(f"invalid instance: {exc}") from None


def serialize_instance(inst: SetSplittingInstance) -> str:
    lines = [" ".join(inst.universe)] + [" ".join(c) for c in inst.triples]
    return "\n".join(lines) + "\n"


def random_instance(n: int, k: int, rng: random.Random) -> SetSplittingInstance:
    """``k`` random 3-subsets of the universe ``e1..en``."""
    if n < 3 and k:
        raise ValueError("triples need at least three elements")
    universe = tuple(f"e{i}" for i in range(1, n + 1))
    options = list(itertools.combinations(universe, 3))
    return SetSplittingInstance(universe, tuple(rng.choice(options) for _ in range(k)))
