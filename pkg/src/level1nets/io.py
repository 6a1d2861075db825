"""Text formats: small-net files, extended Newick and DOT."""

from __future__ import annotations

import re
import warnings
from collections import defaultdict
from typing import Iterable

from .decomposition import Cycle, Decomposition, Join, Leaf, canonical, to_network
from .network import Network, check_taxon, validate
from .smallnets import BINET_SHAPES, SHAPES, SYMMETRIC, SmallNet, SmallNetSet

__all__ = [
    "ParseError",
    "SmallNetConflictWarning",
    "parse_smallnets",
    "serialize_smallnets",
    "conflicts",
    "serialize_network",
    "parse_network",
    "parse_networks",
    "to_dot",
]


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class SmallNetConflictWarning(UserWarning):
    """Two different small nets on the same leaf set."""


# ---------------------------------------------------------------------------
# small nets


def _separators(shape: str) -> str:
    if shape in BINET_SHAPES:
        return "," if shape == "T" else ";"
    return ",;" if shape in SYMMETRIC else ";;"


_ITEM = re.compile(r"\s*([A-Za-z][A-Za-z0-9]*)\s*\(")


def _parse_item(line: str, lineno: int) -> SmallNet:
    m = _ITEM.match(line)
    if not m:
        col = len(line) - len(line.lstrip()) + 1
        raise ParseError("expected a small net such as T1(a,b;c)", lineno, col)
    shape = m.group(1)
    if shape not in SHAPES:
        raise ParseError(f"unknown shape {shape!r}", lineno, m.start(1) + 1)
    close = line.find(")", m.end())
    if close < 0:
        raise ParseError("missing ')'", lineno, len(line) + 1)
    tail = line[close + 1 :]
    if tail.strip():
        raise ParseError("unexpected text after ')'", lineno, close + 2 + len(tail) - len(tail.lstrip()))
    body = line[m.end() : close]
    seps = _separators(shape)
    parts = re.split(r"([,;])", body)
    found = parts[1::2]
    if found != list(seps):
        positions = [m.end() + i for i, ch in enumerate(body) if ch in ",;"]
        bad = next((i for i, (a, b) in enumerate(zip(found, seps)) if a != b), min(len(found), len(seps)))
        col = positions[bad] + 1 if bad < len(positions) else close + 1
        raise ParseError(f"{shape} expects separators {' '.join(seps)}", lineno, col)
    taxa = []
    offset = m.end()
    for tok in parts[0::2]:
        name = tok.strip()
        col = offset + len(tok) - len(tok.lstrip()) + 1
        try:
            check_taxon(name)
        except ValueError as exc:
            raise ParseError(str(exc), lineno, col) from None
        taxa.append(name)
        offset += len(tok) + 1
    try:
        return SmallNet(shape, tuple(taxa))
    except ValueError as exc:
        raise ParseError(str(exc), lineno, m.start(1) + 1) from None


def conflicts(items: Iterable[SmallNet]) -> list[tuple[SmallNet, ...]]:
    """Groups of distinct small nets sharing a leaf set."""
    by_leaves: dict[frozenset[str], set[SmallNet]] = defaultdict(set)
    for sn in items:
        by_leaves[sn.leaves].add(sn)
    return [tuple(sorted(g, key=SmallNet.sort_key)) for g in by_leaves.values() if len(g) > 1]


def parse_smallnets(text: str) -> SmallNetSet:
    """Parse one small net per line, with an optional ``taxa:`` header.

    Lines starting with ``#`` are comments.  A :class:`SmallNetConflictWarning`
    is issued for every leaf set carrying two different small nets.
    """
    items: list[SmallNet] = []
    declared: set[str] = set()
    seen_item = False
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.startswith("#") or not line.strip():
            continue
        stripped = line.lstrip()
        if stripped.startswith("taxa:"):
            if seen_item:
                raise ParseError("the taxa header must precede the small nets", lineno, 1)
            start = line.index("taxa:") + 5
            for m in re.finditer(r"[^\s,]+", line[start:]):
                try:
                    declared.add(check_taxon(m.group()))
                except ValueError as exc:
                    raise ParseError(str(exc), lineno, start + m.start() + 1) from None
            continue
        items.append(_parse_item(line, lineno))
        seen_item = True
    for group in conflicts(items):
        warnings.warn(
            "conflicting small nets on the same leaves: " + ", ".join(map(str, group)),
            SmallNetConflictWarning,
            stacklevel=2,
        )
    taxa = frozenset(declared).union(*(sn.leaves for sn in items))
    return SmallNetSet(frozenset(items), taxa)


def serialize_smallnets(ts: SmallNetSet) -> str:
    lines = ["taxa: " + " ".join(sorted(ts.taxa))]
    lines += [str(sn) for sn in ts]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# extended Newick


def _newick(t: Decomposition, counter: list[int]) -> str:
    if isinstance(t, Leaf):
        return t.taxon
    if isinstance(t, Join):
        return f"({_newick(t.first, counter)},{_newick(t.second, counter)})"
    counter[0] += 1
    tag = f"#H{counter[0]}"
    first = [_newick(x, counter) for x in t.left]
    second = [_newick(x, counter) for x in t.right]
    low = f"({_newick(t.low, counter)}){tag}"

    def path(blocks: list[str], tail: str) -> str:
        out = tail
        for b in reversed(blocks):
            out = f"({b},{out})"
        return out

    return f"({path(first, low)},{path(second, tag)})"


def serialize_network(net: Network) -> str:
    """Extended Newick text (with trailing ``;``) in canonical child order."""
    return _newick(canonical(net.decomposition), [0]) + ";"


_TOKEN = re.compile(r"\s*(?:([(),;])|(#[A-Za-z]*\d+)|(:[-+0-9.eE]*)|(\[[^\]]*\])|([^\s(),;:#\[\]']+))")


class _Reader:
    def __init__(self, text: str, line: int) -> None:
        self.text = text
        self.line = line
        self.pos = 0
        self.arcs: list[tuple[int, int]] = []
        self.labels: dict[int, str] = {}
        self.hybrids: dict[str, int] = {}
        self.hybrid_has_children: set[str] = set()
        self.next_id = 0

    def error(self, message: str, pos: int | None = None) -> ParseError:
        return ParseError(message, self.line, (self.pos if pos is None else pos) + 1)

    def peek(self) -> tuple[str, str, int] | None:
        while True:
            m = _TOKEN.match(self.text, self.pos)
            if m is None:
                if self.text[self.pos :].strip():
                    start = len(self.text) - len(self.text[self.pos :].lstrip())
                    raise self.error(f"unexpected character {self.text[start]!r}", start)
                return None
            kind = m.lastindex
            if kind == 4:  # [comment]
                self.pos = m.end()
                continue
            return ("punct", "hybrid", "length", "", "name")[kind - 1], m.group(kind), m.start(kind)

    def take(self) -> tuple[str, str, int] | None:
        tok = self.peek()
        if tok is not None:
            m = _TOKEN.match(self.text, self.pos)
            self.pos = m.end()
        return tok

    def new_vertex(self) -> int:
        self.next_id += 1
        return self.next_id - 1

    def node(self) -> int:
        tok = self.peek()
        children: list[int] = []
        if tok is not None and tok[1] == "(":
            self.take()
            children.append(self.node())
            while True:
                tok = self.take()
                if tok is None:
                    raise self.error("unbalanced parentheses")
                if tok[1] == ",":
                    children.append(self.node())
                elif tok[1] == ")":
                    break
                else:
                    raise self.error(f"unexpected {tok[1]!r}", tok[2])
        name = hybrid = None
        tok = self.peek()
        if tok is not None and tok[0] == "name":
            self.take()
            name = tok
        tok = self.peek()
        if tok is not None and tok[0] == "hybrid":
            self.take()
            hybrid = tok
        tok = self.peek()
        if tok is not None and tok[0] == "length":
            self.take()
        if name is None and hybrid is None and not children:
            raise self.error("expected a taxon, a hybrid tag or '('")
        if name is not None and children:
            raise self.error("internal vertices cannot carry taxa", name[2])
        if hybrid is not None:
            key = hybrid[1]
            v = self.hybrids.get(key)
            if v is None:
                v = self.hybrids[key] = self.new_vertex()
            if children or name is not None:
                if key in self.hybrid_has_children:
                    raise self.error(f"hybrid {key} is defined twice", hybrid[2])
                self.hybrid_has_children.add(key)
        else:
            v = self.new_vertex()
        if name is not None:
            self.labels[v] = name[1]
        self.arcs.extend((v, c) for c in children)
        return v

    def network(self) -> Network:
        root = self.node()
        tok = self.take()
        if tok is None or tok[1] != ";":
            raise self.error("expected ';'")
        if self.peek() is not None:
            raise self.error("text after ';'")
        undefined = set(self.hybrids) - self.hybrid_has_children
        if undefined:
            raise self.error(f"hybrid {sorted(undefined)[0]} has no children")
        return Network(self.arcs, self.labels, [root])


def parse_network(text: str, line: int = 1) -> Network:
    """Parse one extended Newick network and check it is binary level-1."""
    net = _Reader(text.strip("\n"), line).network()
    problems = validate(net)
    if problems:
        raise ParseError("not a binary level-1 network (" + "; ".join(problems) + ")", line, 1)
    return net


def parse_networks(text: str) -> list[Network]:
    """One network per line; blank lines and lines starting with ``#`` are skipped."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.startswith("#") or not line.strip():
            continue
        out.append(parse_network(line, lineno))
    return out


# ---------------------------------------------------------------------------
# DOT


def to_dot(net: Network, name: str = "network") -> str:
    """Graphviz text; vertex ids follow the canonical decomposition."""
    net = to_network(canonical(net.decomposition))
    lines = [f"digraph {name} {{", "  node [shape=point];"]
    for v in sorted(net.vertices):
        if v in net.labels:
            lines.append(f'  v{v} [shape=plaintext, label="{net.labels[v]}"];')
        elif len(net.parents(v)) == 2:
            lines.append(f"  v{v} [shape=circle, width=0.08, style=filled, fillcolor=white];")
    for u, v in sorted(net.arcs):
        lines.append(f"  v{u} -> v{v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
