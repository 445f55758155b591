import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy.sparse.csgraph import shortest_path

from graphglog.errors import ConfigError, DimensionMismatch, IndexOutOfRange
from graphglog.glog import (
    FilterMode,
    GlogDetector,
    ThresholdPolicy,
    ZeroCrossingPairs,
    edge_node_configuration,
    find_zero_crossing_pairs,
    glog_filter,
    run_glog,
    threshold_pairs,
)
from graphglog.graph import build_graph, build_laplacian, grid_graph
from graphglog.spectral import eigendecompose
from graphglog.synth import noisy_step_fixture

from conftest import path_graph, random_delaunay_graph, random_tree_graph


def pairs_of(n_pairs, scores):
    return ZeroCrossingPairs.from_pairs([(k, k + 1, s) for k, s in zip(range(n_pairs), scores)])


# --- zero crossings -------------------------------------------------------

def test_zero_crossings_on_path():
    g = path_graph(3)
    pairs = find_zero_crossing_pairs(g, [-1.0, 2.0, -3.0])
    assert [(p.i, p.j, p.score) for p in pairs] == [(0, 1, 3.0), (1, 2, 5.0)]
    assert len(find_zero_crossing_pairs(g, [1.0, 2.0, 3.0])) == 0


def test_zero_is_not_a_sign():
    g = build_graph(2, [(0, 1)])
    assert len(find_zero_crossing_pairs(g, [0.0, -1.0])) == 0


def test_zero_crossings_dimension_check():
    with pytest.raises(DimensionMismatch):
        find_zero_crossing_pairs(path_graph(3), [1.0, -1.0])


def test_zero_weight_edges_never_cross():
    g = build_graph(3, [(0, 1, 1.0), (1, 2, 0.0)])
    assert len(find_zero_crossing_pairs(g, [1.0, -1.0, 1.0])) == 1


# --- thresholds -----------------------------------------------------------

def test_third_quartile_rule():
    kept = threshold_pairs(pairs_of(4, [1, 2, 3, 4]), ThresholdPolicy("quartile", 0.75))
    assert ThresholdPolicy().threshold(np.array([1, 2, 3, 4.0])) == pytest.approx(3.25)
    assert kept.score.tolist() == [4.0]


def test_threshold_edge_cases():
    assert len(threshold_pairs(ZeroCrossingPairs.empty())) == 0
    for policy in (ThresholdPolicy(), ThresholdPolicy("meanstd", 0.0), ThresholdPolicy("meanstd", 2.0)):
        assert len(threshold_pairs(pairs_of(5, [2.0] * 5), policy)) == 0


def test_meanstd_uses_population_std():
    s = np.array([1.0, 2.0, 3.0, 4.0])
    assert ThresholdPolicy("meanstd", 1.0).threshold(s) == pytest.approx(2.5 + np.sqrt(1.25))


@pytest.mark.parametrize("text, expected", [
    ("quartile:0.75", ThresholdPolicy("quartile", 0.75)),
    ("meanstd:2", ThresholdPolicy("meanstd", 2.0)),
    (" QUARTILE:0.5 ", ThresholdPolicy("quartile", 0.5)),
])
def test_policy_parse(text, expected):
    assert ThresholdPolicy.parse(text) == expected
    assert ThresholdPolicy.parse(str(expected)) == expected


@pytest.mark.parametrize("text", ["quartile:1", "quartile:0", "meanstd:-1", "median:0.5", "quartile", "meanstd:x"])
def test_policy_parse_rejects(text):
    with pytest.raises(ConfigError):
        ThresholdPolicy.parse(text)


def test_filter_mode_parse():
    assert FilterMode.parse("exact") == FilterMode("exact")
    assert FilterMode.parse("cheb") == FilterMode("chebyshev", 50)
    assert FilterMode.parse("cheb:80") == FilterMode("chebyshev", 80)
    assert str(FilterMode.parse("cheb:80")) == "cheb:80"
    for bad in ("cheb:0", "cheb:x", "fourier"):
        with pytest.raises(ConfigError):
            FilterMode.parse(bad)


# --- configurations -------------------------------------------------------

def test_edge_node_configuration():
    strong = ZeroCrossingPairs.from_pairs([(0, 1, 1.0), (1, 2, 1.0)])
    assert edge_node_configuration(strong, 4).bits.tolist() == [1, 1, 1, 0]
    assert edge_node_configuration(ZeroCrossingPairs.empty(), 4).bits.tolist() == [0, 0, 0, 0]
    with pytest.raises(IndexOutOfRange):
        edge_node_configuration(strong, 2)


# --- filtering on the noisy step ------------------------------------------

@pytest.fixture(scope="module")
def step():
    g, f, pts = noisy_step_fixture(seed=0)
    lap = build_laplacian(g)
    return g, lap, f, pts, eigendecompose(lap)


def test_glog_of_constant(step):
    _, lap, _, _, basis = step
    assert np.abs(glog_filter(lap, np.full(lap.n, 3.0), 3.0, basis=basis)).max() < 1e-9
    for mode in ("exact", "cheb:50"):
        assert run_glog(lap, np.full(lap.n, 3.0), mode=mode).bits.sum() == 0
        det = GlogDetector(lap, 3.0, mode=mode)
        assert det.configurations(np.full((3, lap.n), -7.0)).sum() == 0


def test_glog_is_linear(step):
    _, lap, f, _, basis = step
    a = glog_filter(lap, 2 * f, 3.0, basis=basis)
    b = 2 * glog_filter(lap, f, 3.0, basis=basis)
    assert np.linalg.norm(a - b) <= 1e-9 * np.linalg.norm(b)


def test_glog_mean_free(step):
    _, lap, f, _, basis = step
    s = glog_filter(lap, f, 2.0, basis=basis)
    assert abs(s.sum()) <= 1e-8 * np.linalg.norm(f) * lap.n


def _step_boundary(g, pts, split=0.5):
    high = pts[:, 0] >= split
    ei = g.edge_index
    cut = ei[high[ei[:, 0]] != high[ei[:, 1]]]
    return high, np.unique(cut)


@pytest.mark.parametrize("sigma", [1.0, 2.0, 3.0])
def test_glog_signs_differ_across_the_step(step, sigma):
    g, lap, f, pts, basis = step
    s = glog_filter(lap, f, sigma, basis=basis)
    high, boundary = _step_boundary(g, pts)
    hi = s[boundary[high[boundary]]].mean()
    lo = s[boundary[~high[boundary]]].mean()
    assert hi * lo < 0


@pytest.mark.parametrize("seed", range(5))
def test_edge_nodes_hug_the_step(seed):
    g, f, pts = noisy_step_fixture(seed=seed)
    lap = build_laplacian(g)
    cfg = run_glog(lap, f, 2.0, ThresholdPolicy("quartile", 0.75))
    _, boundary = _step_boundary(g, pts)
    dist = shortest_path(g.adjacency, unweighted=True, indices=boundary).min(axis=0)
    assert cfg.bits.sum() > 0
    assert dist[cfg.support].max() <= 2


@pytest.mark.parametrize("seed", range(5))
def test_meanstd_threshold_monotone_on_step(seed):
    g, f, _ = noisy_step_fixture(seed=seed)
    lap = build_laplacian(g)
    one = run_glog(lap, f, 3.0, ThresholdPolicy("meanstd", 1.0)).bits
    two = run_glog(lap, f, 3.0, ThresholdPolicy("meanstd", 2.0)).bits
    assert np.all(two <= one)
    assert two.sum() < one.sum()


# --- properties -----------------------------------------------------------

graphs = st.tuples(st.integers(4, 60), st.integers(0, 2**31))


@settings(max_examples=30, deadline=None)
@given(graphs, st.sampled_from([0.1, 2.0, 1000.0, 7.5]))
def test_scale_invariance(gs, alpha):
    n, seed = gs
    rng = np.random.default_rng(seed)
    lap = build_laplacian(random_tree_graph(rng, n, extra=n))
    f = rng.normal(size=n)
    basis = eigendecompose(lap)
    scores = find_zero_crossing_pairs(lap, glog_filter(lap, f, 1.0, basis=basis)).score
    assume(np.unique(scores).size == scores.size)
    a = run_glog(lap, f, 1.0).bits
    b = run_glog(lap, alpha * f, 1.0).bits
    np.testing.assert_array_equal(a, b)


@settings(max_examples=30, deadline=None)
@given(graphs)
def test_sign_flip_symmetry(gs):
    n, seed = gs
    rng = np.random.default_rng(seed)
    lap = build_laplacian(random_tree_graph(rng, n, extra=n))
    f = rng.normal(size=n)
    np.testing.assert_array_equal(run_glog(lap, f, 1.0).bits, run_glog(lap, -f, 1.0).bits)


@settings(max_examples=30, deadline=None)
@given(graphs, st.floats(0.0, 3.0), st.floats(0.0, 3.0))
def test_meanstd_monotone(gs, k1, k2):
    n, seed = gs
    k1, k2 = sorted((k1, k2))
    rng = np.random.default_rng(seed)
    lap = build_laplacian(random_tree_graph(rng, n, extra=n))
    f = rng.normal(size=n)
    lo = run_glog(lap, f, 1.0, ThresholdPolicy("meanstd", k1)).bits
    hi = run_glog(lap, f, 1.0, ThresholdPolicy("meanstd", k2)).bits
    assert np.all(hi <= lo)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 12), st.integers(0, 2**31), st.sampled_from([0.5, 1.0, 2.0, 3.0]))
def test_chebyshev_matches_exact_on_small_graphs(n, seed, sigma):
    rng = np.random.default_rng(seed)
    lap = build_laplacian(random_tree_graph(rng, n, extra=n))
    f = rng.normal(size=n)
    exact = glog_filter(lap, f, sigma, "exact")
    approx = glog_filter(lap, f, sigma, "cheb:100")
    # only meaningful away from exact sign/threshold ties
    ei = lap.edge_index
    scale = np.abs(exact).max()
    assume(scale > 1e-6 and np.abs(exact).min() > 1e-6 * scale)
    pairs = find_zero_crossing_pairs(lap, exact)
    if len(pairs):
        thr = ThresholdPolicy().threshold(pairs.score)
        assume(np.abs(pairs.score - thr).min() > 1e-6 * scale)
    np.testing.assert_array_equal(
        run_glog(lap, f, sigma, mode="exact").bits, run_glog(lap, f, sigma, mode="cheb:100").bits
    )


# --- grid -----------------------------------------------------------------

def _grid_step(rows=32, cols=32):
    g = grid_graph(rows, cols)
    f = np.tile((np.arange(cols) >= cols // 2).astype(float), rows)
    return g, build_laplacian(g), f


def test_grid_glog_is_mirror_antisymmetric():
    g, lap, f = _grid_step()
    s = glog_filter(lap, f, 3.0, "exact").reshape(32, 32)
    # mirroring maps f to 1 - f, and the kernel removes constants
    assert np.abs(s + s[:, ::-1]).max() <= 1e-8 * np.abs(s).max()


def test_grid_strongest_pairs_sit_on_the_step():
    g, lap, f = _grid_step()
    s = glog_filter(lap, f, 3.0, "exact")
    pairs = find_zero_crossing_pairs(lap, s)
    top = pairs[pairs.score >= pairs.score.max() * (1 - 1e-9)]
    assert len(top) == 32
    assert set(zip((top.i % 32).tolist(), (top.j % 32).tolist())) == {(15, 16)}
    # anything else retained by the quartile rule ties the threshold up to rounding
    strong = threshold_pairs(pairs, ThresholdPolicy())
    thr = ThresholdPolicy().threshold(pairs.score)
    off_step = strong[strong.i % 32 != 15]
    assert np.all(np.abs(off_step.score - thr) <= 1e-9 * thr)


# --- batched detector -----------------------------------------------------

@pytest.mark.parametrize("mode", ["exact", "cheb:50"])
def test_detector_matches_single_slice_path(mode):
    rng = np.random.default_rng(5)
    g, _ = random_delaunay_graph(rng, 150)
    lap = build_laplacian(g)
    signals = rng.normal(size=(130, 150))
    det = GlogDetector(lap, 2.0, ThresholdPolicy(), mode)
    bits = det.configurations(signals, jobs=1)
    for t in (0, 64, 129):
        np.testing.assert_array_equal(bits[t], run_glog(lap, signals[t], 2.0, mode=mode).bits)
    np.testing.assert_array_equal(det.configurations(signals, jobs=4, chunk=16), bits)
