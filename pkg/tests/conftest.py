import random

import pytest
from hypothesis import HealthCheck, settings

from level1nets.decomposition import Cycle, Join, Leaf, LeafPaths, caterpillar, to_network
from level1nets.smallnets import classify_paths

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

_RESULTS: dict[int, tuple[str, str, str]] = {}


@pytest.fixture
def criterion(request):
    """Record an acceptance criterion outcome for the end-of-run summary."""

    class Recorder:
        def __init__(self):
            self.number = None
            self.title = ""
            self.detail = ""

        def __call__(self, number: int, title: str):
            self.number, self.title = number, title
            return self

    rec = Recorder()
    yield rec
    if rec.number is None:
        return
    failed = request.node.rep_call.failed if hasattr(request.node, "rep_call") else True
    status = "FAIL" if failed else "PASS"
    _RESULTS[rec.number] = (status, rec.title, rec.detail)
    print(f"[{status}] criterion {rec.number}: {rec.title} {rec.detail}".rstrip())


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        status, title, detail = _RESULTS[n]
        terminalreporter.write_line(f"[{status}] criterion {n}: {title} {detail}".rstrip())


@pytest.fixture
def rng():
    return random.Random(20240611)


def shows_all(tree_or_net, items) -> bool:
    """Fast display check through root paths."""
    tree = getattr(tree_or_net, "decomposition", tree_or_net)
    paths = LeafPaths(tree)
    return all(classify_paths(paths, sn.taxa) == sn for sn in items)


def showcase_network():
    """High {a..i,m}; sides {a,b} and {c,d} above {e,f,g,h,i,m}; low {j,k,l}."""
    a, b, c, d, e, f, g, h, i, m, j, k, l = (Leaf(x) for x in "abcdefghimjkl")
    left = (Join(a, b),)
    right = (Join(c, d), caterpillar([e, f, Join(g, h), i, m]))
    return to_network(Cycle(left, right, caterpillar([j, k, l])))


def splitting_witness(inst, a):
    """Single-cycle network built from a splitting (``a`` holds one side).

    ``u_0`` sits on the side of ``u``; the indexed taxa of ``u`` sit on the
    other side with ``u_i`` directly above ``u_ip``.  Within one triple the
    two indexed pairs sharing a side are ordered by the cyclic outgroup rule.
    """
    side = {u: 0 if u in a else 1 for u in inst.universe}
    blocks = ([], [])
    for u in inst.universe:
        blocks[side[u]].append(Leaf(f"{u}_0"))
    for i, (u, v, w) in enumerate(inst.triples, 1):
        above = {(u, v): u, (v, w): v, (u, w): w}
        for s in (0, 1):
            mine = [e for e in (u, v, w) if side[e] != s]
            if len(mine) == 2:
                top = above[tuple(mine)]
                mine = [top] + [e for e in mine if e != top]
            for e in mine:
                blocks[s].extend([Leaf(f"{e}_{i}"), Leaf(f"{e}_{i}p")])
    return to_network(Cycle(tuple(blocks[0]), tuple(blocks[1]), Leaf("b")))
