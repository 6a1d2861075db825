import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from level1nets.decomposition import Cycle, Leaf, code, restrict_tree, tinyfy_tree, to_network
from level1nets.network import (
    Network,
    RootKind,
    canonical_code,
    check_taxon,
    displays,
    is_equivalent,
    lsa,
    restrict,
    root_kind,
    side_decomposition,
    tinyfy,
    validate,
)
from level1nets.oracle import enumerate_networks, random_network
from level1nets.smallnets import SmallNet, extract_all, realize

from conftest import showcase_network

seeds = st.integers(0, 10**9)


def leaves_of(*names):
    return [Leaf(n) for n in names]


def shuffled_ids(net: Network, rng: random.Random) -> Network:
    ids = list(net.vertices)
    new = ids[:]
    rng.shuffle(new)
    m = dict(zip(ids, (1000 + v for v in new)))
    arcs = [(m[u], m[v]) for u, v in net.arcs]
    rng.shuffle(arcs)
    return Network(arcs, {m[v]: t for v, t in net.labels.items()}, [m[v] for v in net.vertices])


# ---------------------------------------------------------------------------
# validate


def test_single_vertex_is_valid():
    assert validate(Network([], {0: "a"}, [0])) == []


def test_two_roots_reported():
    net = Network([(0, 2), (1, 3)], {2: "a", 3: "b"})
    assert any(p.startswith("single root") for p in validate(net))


def test_glued_cycles_violate_level1():
    # two 3-cycles sharing the vertex 2 (the first cycle's reticulation)
    arcs = [(0, 1), (0, 2), (1, 2), (1, 5), (2, 3), (2, 4), (3, 4), (3, 6), (4, 7)]
    net = Network(arcs, {5: "a", 6: "b", 7: "c"})
    problems = validate(net)
    assert any(p.startswith("level-1") for p in problems)


def test_unlabelled_leaf_and_degree_violations():
    assert any("leaf labelling" in p for p in validate(Network([(0, 1), (0, 2)], {1: "a"})))
    assert any("indegree-1 outdegree-1" in p for p in validate(Network([(0, 1), (1, 2), (2, 3), (2, 5), (0, 4)], {3: "a", 5: "b", 4: "c"})))
    assert any(p.startswith("binary") for p in validate(Network([(0, 1), (0, 2), (0, 3)], {1: "a", 2: "b", 3: "c"})))


def test_reserved_characters_rejected():
    for bad in ["", "a b", "a,b", "a(", "x;", "h#1", "t:1"]:
        with pytest.raises(ValueError):
            check_taxon(bad)
    assert check_taxon("u_1p") == "u_1p"


def _directed_cycles(net: Network) -> list[frozenset[int]]:
    """Vertex sets of all unions of two internally disjoint directed s-t paths."""
    g = net.to_networkx()
    out = set()
    for s in g:
        for t in g:
            if s == t:
                continue
            paths = list(nx.all_simple_paths(g, s, t))
            for p, q in itertools.combinations(paths, 2):
                if not set(p[1:-1]) & set(q[1:-1]):
                    out.add(frozenset(p) | frozenset(q))
    return list(out)


def _add_random_arc(net: Network, rng: random.Random) -> Network:
    """Subdivide two arcs and join the new vertices, keeping the graph acyclic."""
    arcs = sorted(net.arcs)
    g = net.to_networkx()
    for _ in range(50):
        (u, v), (x, y) = rng.sample(arcs, 2)
        if nx.has_path(g, y, u):
            continue
        a, b = max(net.vertices) + 1, max(net.vertices) + 2
        new = set(arcs) - {(u, v), (x, y)} | {(u, a), (a, v), (x, b), (b, y), (a, b)}
        return Network(new, net.labels)
    return net


@given(seeds)
def test_level1_check_matches_cycle_definition(seed):
    rng = random.Random(seed)
    net = random_network("abcde"[: rng.randint(2, 5)], rng)
    for _ in range(rng.randint(1, 2)):
        net = _add_random_arc(net, rng)
    problems = validate(net)
    assert not [p for p in problems if not p.startswith("level-1")]
    cycles = _directed_cycles(net)
    disjoint = all(not (a & b) for a, b in itertools.combinations(cycles, 2))
    assert disjoint == (not problems)


# ---------------------------------------------------------------------------
# LSA and restriction


def test_lsa_examples():
    tree = realize(SmallNet("T1", ("x", "y", "z")))
    assert lsa(tree, {"x", "y", "z"}) == tree.root
    assert lsa(tree, {"x"}) == tree.vertex_of("x")
    n = realize(SmallNet("N", ("x", "y")))
    assert lsa(n, {"x"}) == n.vertex_of("x")
    assert lsa(n, {"x", "y"}) == n.root


def test_lsa_errors():
    n = realize(SmallNet("N", ("x", "y")))
    with pytest.raises(ValueError):
        lsa(n, set())
    with pytest.raises(KeyError):
        lsa(n, {"q"})


def test_restrict_examples():
    t1 = realize(SmallNet("T1", ("x", "y", "z")))
    assert is_equivalent(restrict(t1, {"x", "y"}), realize(SmallNet("T", ("x", "y"))))
    s2 = realize(SmallNet("S2", ("x", "y", "z")))
    assert is_equivalent(restrict(s2, {"x", "y"}), realize(SmallNet("T", ("x", "y"))))
    assert is_equivalent(restrict(s2, {"x", "z"}), realize(SmallNet("N", ("z", "x"))))
    one = restrict(s2, {"y"})
    assert len(one.vertices) == 1 and one.taxa == {"y"}


def test_restrict_to_all_leaves_drops_path_above_lsa():
    # root -> u -> cherry, written with an extra unary vertex on top
    net = Network([(9, 0), (0, 1), (0, 2)], {1: "a", 2: "b"})
    assert is_equivalent(restrict(net, {"a", "b"}), realize(SmallNet("T", ("a", "b"))))


@given(seeds)
def test_restriction_graph_and_tree_routes_agree(seed):
    rng = random.Random(seed)
    taxa = [f"t{i}" for i in range(rng.randint(2, 8))]
    net = random_network(taxa, rng)
    sub = rng.sample(taxa, rng.randint(1, len(taxa)))
    by_graph = restrict(net, sub)
    assert validate(by_graph) == []
    assert canonical_code(by_graph) == code(restrict_tree(net.decomposition, sub))


@given(seeds)
def test_restriction_idempotent_and_composes(seed):
    rng = random.Random(seed)
    taxa = [f"t{i}" for i in range(rng.randint(2, 7))]
    net = random_network(taxa, rng)
    a = rng.sample(taxa, rng.randint(1, len(taxa)))
    b = rng.sample(a, rng.randint(1, len(a)))
    once = restrict(net, a)
    assert is_equivalent(restrict(once, a), once)
    assert is_equivalent(restrict(once, b), restrict(net, b))


# ---------------------------------------------------------------------------
# equivalence and canonical codes


def test_equivalence_examples(rng):
    s1 = realize(SmallNet("S1", ("x", "y", "z")))
    assert is_equivalent(s1, s1)
    assert is_equivalent(s1, shuffled_ids(s1, rng))
    assert not is_equivalent(realize(SmallNet("T", ("x", "y"))), realize(SmallNet("N", ("x", "y"))))


def test_code_examples(rng):
    cherry = Network([(5, 1), (5, 0)], {0: "y", 1: "x"})
    assert canonical_code(cherry) == canonical_code(realize(SmallNet("T", ("x", "y"))))
    a = realize(SmallNet("S2", ("x", "y", "z")))
    b = realize(SmallNet("S2", ("y", "x", "z")))
    assert canonical_code(a) != canonical_code(b)
    assert not is_equivalent(a, b)
    assert canonical_code(shuffled_ids(a, rng)) == canonical_code(a)


def test_codes_separate_exactly_the_equivalence_classes():
    # 4 taxa: every pair of catalog networks is inequivalent.  A differing
    # labelled WL hash proves that; the rare hash collisions go to VF2.
    for taxa in ("ab", "abc", "abcd"):
        nets = enumerate_networks(taxa).networks
        assert len({canonical_code(n) for n in nets}) == len(nets)
        buckets = {}
        for n in nets:
            h = nx.weisfeiler_lehman_graph_hash(n.to_networkx(), node_attr="label", iterations=4)
            buckets.setdefault(h, []).append(n)
        for group in buckets.values():
            for x, y in itertools.combinations(group, 2):
                assert not is_equivalent(x, y)


@given(seeds)
def test_equal_codes_after_shuffling(seed):
    rng = random.Random(seed)
    net = random_network([f"t{i}" for i in range(rng.randint(1, 7))], rng)
    other = shuffled_ids(net, rng)
    assert is_equivalent(net, other)
    assert canonical_code(net) == canonical_code(other)


# ---------------------------------------------------------------------------
# display, root kinds, sides


def test_displays_examples():
    n = showcase_network()
    assert displays(n, n)
    assert displays(n, realize(SmallNet("N", ("j", "a"))))
    assert not displays(n, realize(SmallNet("N", ("a", "j"))))
    assert not displays(realize(SmallNet("T", ("x", "y"))), realize(SmallNet("N", ("x", "y"))))
    with pytest.raises(ValueError):
        displays(realize(SmallNet("T", ("x", "y"))), realize(SmallNet("T", ("x", "q"))))


def test_root_kinds():
    assert root_kind(realize(SmallNet("T", ("x", "y")))) == RootKind.NOT_CYCLE_ROOTED
    assert root_kind(realize(SmallNet("N", ("x", "y")))) == RootKind.TINY
    assert root_kind(realize(SmallNet("S1", ("x", "y", "z")))) == RootKind.LARGISH
    assert root_kind(showcase_network()) == RootKind.LARGISH


def test_showcase_side_decomposition():
    sd = side_decomposition(showcase_network())
    assert sd.high == set("abcdefghim")
    assert sd.low == set("jkl")
    assert set(sd.sides) == {frozenset("ab"), frozenset("cdefghim")}
    assert sd.right_blocks == (frozenset("cd"), frozenset("efghim"))


def test_side_decomposition_small_cases():
    sd = side_decomposition(realize(SmallNet("T1", ("x", "y", "z"))))
    assert sd.high == {"x", "y", "z"} and sd.low == set() and sd.right_blocks == ()
    sd = side_decomposition(realize(SmallNet("N", ("x", "y"))))
    assert sd.high == {"y"} and sd.low == {"x"}


@given(seeds)
def test_high_leaves_avoid_the_root_reticulation(seed):
    rng = random.Random(seed)
    net = random_network([f"t{i}" for i in range(rng.randint(2, 8))], rng)
    sd = side_decomposition(net)
    assert sd.high | sd.low == net.taxa and not sd.high & sd.low
    g = net.to_networkx()
    root = net.root
    retics = [v for v in nx.descendants(g, root) | {root} if g.in_degree(v) == 2]
    # the root reticulation is the one whose two parents are reachable from the root without another reticulation
    if root_kind(net) == RootKind.NOT_CYCLE_ROOTED:
        assert sd.high == net.taxa
        return
    blob = next(b for b in nx.biconnected_components(g.to_undirected()) if root in b and len(b) > 2)
    (r,) = [v for v in retics if v in blob]
    g.remove_node(r)
    reach = nx.descendants(g, root)
    assert sd.high == {net.labels[v] for v in reach if v in net.labels}


# ---------------------------------------------------------------------------
# tinyfy


def test_tinyfy_keeps_tiny_networks():
    net = realize(SmallNet("N4", ("x", "y", "z")))
    assert is_equivalent(tinyfy(net), net)


def test_tinyfy_cycle_with_three_and_two_side_vertices():
    a, b, c, d, e, f = leaves_of(*"abcdef")
    net = to_network(Cycle((a, b, c), (d, e), f))
    out = tinyfy(net)
    assert validate(out) == []
    assert out.taxa == net.taxa
    assert root_kind(out) == RootKind.TINY
    sd = side_decomposition(out)
    assert sd.high == set("abcde") and sd.low == {"f"}
    assert is_equivalent(out, to_network(tinyfy_tree(net.decomposition)))


@given(seeds)
def test_tinyfy_output_and_display_property(seed):
    rng = random.Random(seed)
    net = random_network([f"t{i}" for i in range(rng.randint(2, 6))], rng)
    out = tinyfy(net)
    assert validate(out) == [] and out.taxa == net.taxa
    g = out.to_networkx().to_undirected()
    assert all(len(b) == 3 for b in nx.biconnected_components(g) if len(b) > 2)
    assert is_equivalent(out, to_network(tinyfy_tree(net.decomposition)))
    kept = extract_all(out).items
    for sn in extract_all(net).items:
        if sn.shape not in {"S1", "S2"}:
            assert sn in kept
