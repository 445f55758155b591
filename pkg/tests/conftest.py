import numpy as np
import pytest

from graphglog.delaunay import delaunay
from graphglog.graph import build_graph, build_laplacian


def random_tree_graph(rng, n, extra=0, weighted=False):
    """Random spanning tree plus ``extra`` random chords; always connected."""
    edges = {}
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges[(u, v)] = None
    tries = 0
    while len(edges) < n - 1 + extra and tries < 50 * (extra + 1):
        i, j = sorted(int(x) for x in rng.integers(0, n, size=2))
        tries += 1
        if i != j:
            edges.setdefault((i, j), None)
    out = []
    for i, j in sorted(edges):
        w = float(rng.uniform(0.5, 2.0)) if weighted else 1.0
        out.append((i, j, w))
    return build_graph(n, out)


def random_delaunay_graph(rng, n):
    pts = rng.uniform(0.0, 1.0, size=(n, 2))
    return build_graph(n, delaunay(pts).tolist()), pts


def path_graph(n):
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


@pytest.fixture
def p3():
    return build_laplacian(path_graph(3))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
