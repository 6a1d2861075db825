"""Brute-force ground truth for small taxa sets.

Networks are generated from the recursive join/cycle decomposition, which
covers every binary level-1 network exactly once up to equivalence.  The
catalog keeps, for every small net, a bitmask of the catalog networks that
display it, so a brute-force solve is a handful of integer ANDs.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .decomposition import Cycle, Decomposition, Join, Leaf, LeafPaths, code, to_network
from .network import Network, check_taxon
from .smallnets import SmallNet, SmallNetSet, classify_paths

__all__ = [
    "MAX_TAXA",
    "NetworkCatalog",
    "enumerate_trees",
    "enumerate_networks",
    "brute_solve",
    "random_tree",
    "random_network",
]

MAX_TAXA = 6


def _bipartitions(s: tuple[str, ...]) -> Iterator[tuple[tuple[str, ...], tuple[str, ...]]]:
    """Unordered splits of ``s`` into two nonempty parts."""
    first, rest = s[0], s[1:]
    for mask in range(1 << len(rest)):
        a = (first,) + tuple(x for i, x in enumerate(rest) if mask >> i & 1)
        b = tuple(x for i, x in enumerate(rest) if not mask >> i & 1)
        if b:
            yield a, b


def _ordered_partitions(s: tuple[str, ...]) -> Iterator[list[tuple[str, ...]]]:
    if not s:
        yield []
        return
    for r in range(1, len(s) + 1):
        for block in itertools.combinations(s, r):
            rest = tuple(x for x in s if x not in block)
            for tail in _ordered_partitions(rest):
                yield [block] + tail


@lru_cache(maxsize=None)
def _trees(s: tuple[str, ...]) -> tuple[Decomposition, ...]:
    if len(s) == 1:
        return (Leaf(s[0]),)
    found: dict[str, Decomposition] = {}
    for a, b in _bipartitions(s):
        for x in _trees(a):
            for y in _trees(b):
                t = Join(x, y)
                found.setdefault(code(t), t)
    for r in range(1, len(s)):
        for low in itertools.combinations(s, r):
            high = tuple(x for x in s if x not in low)
            for blocks in _ordered_partitions(high):
                for cut in range(len(blocks) + 1):
                    if cut < len(blocks) - cut:
                        continue  # the mirror image is generated too
                    options = [_trees(b) for b in blocks]
                    for low_t in _trees(low):
                        for pendants in itertools.product(*options):
                            t = Cycle(pendants[:cut], pendants[cut:], low_t)
                            found.setdefault(code(t), t)
    return tuple(found[c] for c in sorted(found))


def enumerate_trees(taxa: Iterable[str]) -> tuple[Decomposition, ...]:
    """Decompositions of all binary level-1 networks on ``taxa``, one per class."""
    s = tuple(sorted(set(taxa)))
    if not 1 <= len(s) <= MAX_TAXA:
        raise ValueError(f"enumeration supports 1..{MAX_TAXA} taxa, got {len(s)}")
    for t in s:
        check_taxon(t)
    return _trees(s)


@dataclass
class NetworkCatalog:
    taxa: frozenset[str]
    trees: tuple[Decomposition, ...]
    _displayed_by: dict[SmallNet, int] = field(default_factory=dict, repr=False)

    @property
    def networks(self) -> list[Network]:
        return [to_network(t) for t in self.trees]

    def __len__(self) -> int:
        return len(self.trees)

    def mask(self, sn: SmallNet) -> int:
        """Bitmask over catalog positions of the networks displaying ``sn``."""
        if not self._displayed_by:
            taxa = sorted(self.taxa)
            subsets = list(itertools.combinations(taxa, 2)) + list(itertools.combinations(taxa, 3))
            table: dict[SmallNet, int] = {}
            for pos, t in enumerate(self.trees):
                paths = LeafPaths(t)
                for sub in subsets:
                    key = classify_paths(paths, sub)
                    table[key] = table.get(key, 0) | (1 << pos)
            self._displayed_by = table
        return self._displayed_by.get(sn, 0)

    def solutions(self, ts: SmallNetSet) -> int:
        m = (1 << len(self.trees)) - 1
        for sn in ts.items:
            m &= self.mask(sn)
            if not m:
                break
        return m


@lru_cache(maxsize=8)
def _catalog(taxa: tuple[str, ...]) -> NetworkCatalog:
    return NetworkCatalog(frozenset(taxa), enumerate_trees(taxa))


def enumerate_networks(taxa: Iterable[str]) -> NetworkCatalog:
    return _catalog(tuple(sorted(set(taxa))))


def brute_solve(ts: SmallNetSet) -> Network | None:
    """First catalog network on ``ts.taxa`` displaying every item, else ``None``."""
    if len(ts.taxa) > MAX_TAXA:
        raise ValueError(f"brute force supports at most {MAX_TAXA} taxa")
    if len(ts.taxa) == 1:
        return to_network(Leaf(next(iter(ts.taxa))))
    cat = enumerate_networks(ts.taxa)
    m = cat.solutions(ts)
    if not m:
        return None
    pos = (m & -m).bit_length() - 1
    return to_network(cat.trees[pos])


# ---------------------------------------------------------------------------
# random generation


def random_tree(
    taxa: Sequence[str],
    rng: random.Random,
    *,
    cycle_prob: float = 0.5,
    tiny_only: bool = False,
) -> Decomposition:
    """Random binary level-1 decomposition over ``taxa``.

    At every split a cycle is used with probability ``cycle_prob``; cycle
    sides get a random number of pendant blocks (one block when ``tiny_only``).
    """
    taxa = list(taxa)
    rng.shuffle(taxa)

    def build(xs: list[str]) -> Decomposition:
        if len(xs) == 1:
            return Leaf(xs[0])
        if rng.random() >= cycle_prob:
            cut = rng.randint(1, len(xs) - 1)
            return Join(build(xs[:cut]), build(xs[cut:]))
        n_low = rng.randint(1, len(xs) - 1)
        low, high = xs[:n_low], xs[n_low:]
        n_blocks = 1 if tiny_only else rng.randint(1, len(high))
        cuts = sorted(rng.sample(range(1, len(high)), n_blocks - 1))
        blocks = [high[i:j] for i, j in zip([0] + cuts, cuts + [len(high)])]
        n_left = rng.randint(0, n_blocks)
        pend = [build(b) for b in blocks]
        return Cycle(tuple(pend[:n_left]), tuple(pend[n_left:]), build(low))

    return build(taxa)


def random_network(taxa: Sequence[str], rng: random.Random, **kwargs) -> Network:
    return to_network(random_tree(taxa, rng, **kwargs))
