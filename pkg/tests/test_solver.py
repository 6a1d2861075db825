import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from level1nets.decomposition import Cycle, Join, Leaf, to_network
from level1nets.network import RootKind, is_equivalent, root_kind, side_decomposition
from level1nets.oracle import brute_solve, random_network
from level1nets.smallnets import SHAPES, SmallNet, SmallNetSet, classify, extract_all, realize
from level1nets.solver import (
    DecompositionGuess,
    SearchBudgetExceeded,
    SolverConfig,
    assemble,
    build_d,
    build_k,
    build_kdagger,
    build_m,
    build_o,
    build_omega,
    build_omegadagger,
    build_r,
    build_w,
    enumerate_feasible_bipartitions,
    enumerate_high_sets,
    partition_side,
    solve,
    solve_supernetwork,
    solve_tiny,
)

from conftest import showcase_network, shows_all

seeds = st.integers(0, 10**9)
F = frozenset


def one(shape, *taxa):
    return SmallNetSet.of([SmallNet(shape, taxa)])


def edges(g):
    return {F(e) for e in g.edges}


# ---------------------------------------------------------------------------
# auxiliary graphs


def test_build_r():
    assert edges(build_r(one("T1", "x", "y", "z"))) == {F("xy")}
    for shape in ("S1", "S2", "N1", "N2", "N4", "N5"):
        assert edges(build_r(one(shape, "a", "b", "c"))) == {F("ab"), F("ac"), F("bc")}


def test_build_r_connected_for_showcase_trinets():
    ts = extract_all(showcase_network())
    assert nx.is_connected(build_r(ts))


def test_build_k():
    assert edges(build_k(one("T1", "x", "y", "z"))) == {F("xy"), F("xz"), F("yz")}
    assert edges(build_k(one("N", "x", "y"))) == set()
    assert edges(build_k(one("S2", "x", "y", "z"))) == {F("xy")}


def test_build_omega():
    ts = one("N", "x", "y")
    assert list(build_omega(ts, build_k(ts)).edges) == [(F("y"), F("x"))]
    ts = one("T1", "x", "y", "z")
    assert build_omega(ts, build_k(ts)).number_of_edges() == 0
    ts = one("S1", "x", "y", "z")
    assert list(build_omega(ts, build_k(ts)).edges) == [(F("xy"), F("z"))]


def test_dagger_graphs():
    assert edges(build_kdagger(one("S1", "x", "y", "z"))) == {F("xy"), F("xz"), F("yz")}
    ts = SmallNetSet.of([SmallNet("N4", ("a", "b", "c")), SmallNet("T1", ("a", "d", "c"))])
    assert edges(build_kdagger(ts)) == edges(build_k(ts))
    assert build_omegadagger(one("S2", "x", "y", "z")).number_of_nodes() == 1


def test_enumerate_high_sets():
    om = nx.DiGraph([(F("a"), F("b"))])
    assert enumerate_high_sets(om) == [F("a")]
    om = nx.DiGraph()
    om.add_nodes_from([F("a"), F("b")])
    assert set(enumerate_high_sets(om)) == {F("a"), F("b")}
    om = nx.DiGraph([(F("a"), F("b")), (F("a"), F("c")), (F("c"), F("b"))])
    assert enumerate_high_sets(om, semi_dense=True) == [F("a")]
    om = nx.DiGraph([(F("a"), F("c")), (F("b"), F("c"))])
    assert enumerate_high_sets(om, semi_dense=True) == []
    assert enumerate_high_sets(om) == [F("ab"), F("a"), F("b")]
    assert len(enumerate_high_sets(om, limit=1)) == 2


def test_m_and_w():
    ts = SmallNetSet.of([SmallNet("S1", ("x", "y", "z"))])
    h = F("xy")
    m = build_m(ts, h)
    assert m.number_of_edges() == 0
    assert edges(build_w(ts, h, m)) == {F([F("x"), F("y")])}
    ts = SmallNetSet.of([SmallNet("T1", ("x", "y", "z")), SmallNet("N4", ("x", "y", "z"))])
    assert build_w(ts, F("xy"), build_m(ts, F("xy"))).number_of_edges() == 0


def test_showcase_colouring():
    ts = extract_all(showcase_network())
    h = F("abcdefghim")
    w = build_w(ts, h, build_m(ts, h))
    found = list(enumerate_feasible_bipartitions(w))
    assert [set(p) for p in found] == [{F("ab"), F("cdefghim")}]


def test_bipartitions():
    w = nx.Graph([(F("a"), F("b"))])
    w.add_nodes_from([F("c"), F("d")])
    found = list(enumerate_feasible_bipartitions(w))
    assert len(found) == 4
    assert all(("a" in l) != ("b" in l) and ("a" in l or "a" in r) for l, r in found)
    assert list(enumerate_feasible_bipartitions(nx.Graph([(F("a"), F("b")), (F("b"), F("c")), (F("a"), F("c"))]))) == []
    only = nx.Graph()
    only.add_node(F("a"))
    assert list(enumerate_feasible_bipartitions(only)) == [(F("a"), F())]


def test_build_o_clauses():
    ts = SmallNetSet.of([SmallNet("N4", ("a", "b", "c"))])
    assert edges(build_o(ts, F("ab"), F("ab"))) == {F("ab")}
    ts = SmallNetSet.of([SmallNet("T1", ("a", "b", "c"))])
    assert edges(build_o(ts, F("abc"), F("abc"))) == {F("ab")}


def test_build_d():
    ts = SmallNetSet.of([SmallNet("T1", ("a", "b", "c"))])
    o = build_o(ts, F("ab"), F("ab"))
    assert build_d(ts, F("ab"), F("ab"), o).number_of_edges() == 0
    ts = SmallNetSet.of([SmallNet("S2", ("x", "y", "z")), SmallNet("T1", ("x", "y", "q"))])
    o = build_o(ts, F("xyq"), F("xyq"))
    d = build_d(ts, F("xyq"), F("xyq"), o)
    assert list(d.edges) == [(F("xy"), F("xy"))]


def test_partition_side():
    ts = extract_all(showcase_network())
    h = F("abcdefghim")
    assert partition_side(ts, F(), h) == []
    assert partition_side(ts, F("cdefghim"), h) == [F("cd"), F("efghim")]
    assert partition_side(ts, F("ab"), h) == [F("ab")]
    assert partition_side(SmallNetSet.of([], "x"), F("x"), F("x")) == [F("x")]
    # S2 both ways round: no sidenetwork can come first
    ts = SmallNetSet.of([SmallNet("S2", ("x", "y", "z")), SmallNet("S2", ("y", "x", "z"))])
    assert partition_side(ts, F("xy"), F("xy")) is None


def _leaf(x):
    return to_network(Leaf(x))


def test_assemble():
    g = DecompositionGuess(F("y"), F("x"), (F("y"), F()), (F("y"),), ())
    assert classify(assemble(g, {F("y"): _leaf("y")}, _leaf("x"))) == SmallNet("N", ("x", "y"))
    g = DecompositionGuess(F("xy"), F("z"), (F("x"), F("y")), (F("x"),), (F("y"),))
    net = assemble(g, {F("x"): _leaf("x"), F("y"): _leaf("y")}, _leaf("z"))
    assert classify(net) == SmallNet("S1", ("x", "y", "z"))
    g = DecompositionGuess(F("xy"), F("z"), (F("xy"), F()), (F("x"), F("y")), ())
    net = assemble(g, {F("x"): _leaf("x"), F("y"): _leaf("y")}, _leaf("z"))
    assert classify(net) == SmallNet("S2", ("x", "y", "z"))
    with pytest.raises(ValueError):
        assemble(g, {F("x"): _leaf("q"), F("y"): _leaf("y")}, _leaf("z"))


# ---------------------------------------------------------------------------
# solve


@pytest.mark.parametrize("shape", SHAPES)
def test_single_small_net(shape):
    taxa = ("a", "b") if shape in ("T", "N") else ("a", "b", "c")
    sn = SmallNet(shape, taxa)
    net = solve(SmallNetSet.of([sn]))
    assert is_equivalent(net, realize(sn))


def test_conflicting_trees_refused():
    ts = SmallNetSet.of([SmallNet("T1", ("a", "b", "c")), SmallNet("T1", ("b", "c", "a"))])
    assert solve(ts) is None


def test_single_taxon_and_empty_input():
    assert solve(SmallNetSet.of([], "a")).taxa == {"a"}
    with pytest.raises(ValueError):
        solve(SmallNetSet.of([], ""))


def test_disconnected_root_components():
    ts = SmallNetSet.of([SmallNet("T1", ("a", "b", "c")), SmallNet("N3", ("d", "e", "f"))], "abcdefg")
    net = solve(ts)
    assert root_kind(net) == RootKind.NOT_CYCLE_ROOTED
    assert shows_all(net, ts.items)


@given(seeds)
def test_round_trip_small(seed):
    rng = random.Random(seed)
    net = random_network([f"t{i}" for i in range(rng.randint(2, 6))], rng)
    assert is_equivalent(solve(extract_all(net)), net)


@given(seeds, st.sampled_from([1, 3, 99]), st.booleans())
def test_guess_order_does_not_change_answers(seed, order_seed, tiny_first):
    rng = random.Random(seed)
    taxa = "abcde"[: rng.randint(3, 5)]
    net = random_network(taxa, rng)
    items = list(extract_all(net).items)
    ts = SmallNetSet.of(rng.sample(items, rng.randint(1, len(items))), taxa)
    cfg = SolverConfig(deterministic_seed=order_seed, explore_tiny_first=tiny_first)
    out = solve(ts, cfg)
    assert out is not None and shows_all(out, ts.items)


def test_budget_exhaustion_reported_as_unknown():
    with pytest.raises(ValueError):
        SolverConfig(guess_budget=0)
    rng = random.Random(3)
    hits = 0
    for _ in range(400):
        taxa = [f"t{i}" for i in range(7)]
        net = random_network(taxa, rng, cycle_prob=0.9)
        items = [sn for sn in extract_all(net).items if not sn.is_binet]
        ts = SmallNetSet.of(rng.sample(items, len(items) // 4), taxa)
        try:
            solve(ts, SolverConfig(guess_budget=1))
        except SearchBudgetExceeded:
            hits += 1
            full = solve(ts)
            assert full is not None and shows_all(full, ts.items)
    assert hits > 0


# ---------------------------------------------------------------------------
# tiny-cycle path and supernetworks


def test_solve_tiny_examples():
    net = solve_tiny(one("N1", "x", "y", "z"))
    assert root_kind(net) == RootKind.TINY
    sd = side_decomposition(net)
    assert sd.high == {"x", "y"} and sd.low == {"z"}
    with pytest.raises(ValueError):
        solve_tiny(one("S1", "x", "y", "z"))


def test_tiny_solution_combines_high_and_low_parts():
    # two side trinets and a low part joined through a tiny root cycle
    ts = SmallNetSet.of(
        [SmallNet("N1", ("a", "b", "c")), SmallNet("N1", ("a", "b", "d")), SmallNet("T", ("c", "d"))]
    )
    net = solve_tiny(ts)
    assert root_kind(net) == RootKind.TINY
    sd = side_decomposition(net)
    assert sd.high == {"a", "b"} and sd.low == {"c", "d"}


@given(seeds)
def test_tiny_round_trip(seed):
    rng = random.Random(seed)
    net = random_network([f"t{i}" for i in range(rng.randint(2, 8))], rng, tiny_only=True)
    out = solve_tiny(extract_all(net))
    assert is_equivalent(out, net)


def test_supernetwork():
    rng = random.Random(5)
    net = random_network("abcdef", rng)
    assert is_equivalent(solve_supernetwork([net]), net)
    t1 = realize(SmallNet("T1", ("a", "b", "c")))
    t2 = realize(SmallNet("T1", ("d", "e", "f")))
    out = solve_supernetwork([t1, t2])
    assert shows_all(out, extract_all(t1).items | extract_all(t2).items)
    tiny = random_network("abcde", rng, tiny_only=True)
    assert is_equivalent(solve_supernetwork([tiny, tiny]), tiny)
    with pytest.raises(ValueError):
        solve_supernetwork([to_network(Leaf("a"))])


def test_supernetwork_from_overlapping_parts():
    rng = random.Random(8)
    for _ in range(30):
        net = random_network([f"t{i}" for i in range(7)], rng)
        from level1nets.network import restrict

        parts = [restrict(net, rng.sample(sorted(net.taxa), 5)) for _ in range(3)]
        parts = [p for p in parts if len(p.taxa) >= 2]
        out = solve_supernetwork(parts)
        assert out is not None
        for p in parts:
            assert shows_all(out, extract_all(p).items)
