import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.metrics import silhouette_score

from graphglog.errors import BadK, DegenerateData, DimensionMismatch, EmptySeries, IndexOutOfRange
from graphglog.glog import EdgeNodeConfiguration
from graphglog.temporal import (
    EdgeNodeProbability,
    cluster_configurations,
    edge_node_probability,
    enhance_signal,
    entropy_diagram,
    observed_probability,
    select_k_by_silhouette,
    silhouette,
    slice_entropy,
)


def prob(values):
    return EdgeNodeProbability(np.asarray(values, dtype=float), 1)


def test_probability_ratios():
    configs = np.zeros((10, 3), dtype=np.uint8)
    configs[:3, 0] = 1
    configs[:, 2] = 1
    np.testing.assert_array_equal(edge_node_probability(configs).p_e, [0.3, 0.0, 1.0])


def test_probability_accepts_configuration_objects():
    cfgs = [EdgeNodeConfiguration(np.array([1, 0], np.uint8), "a"), EdgeNodeConfiguration(np.array([1, 1], np.uint8), "b")]
    p = edge_node_probability(cfgs)
    assert p.m == 2
    np.testing.assert_array_equal(p.p_e, [1.0, 0.5])


def test_probability_errors():
    with pytest.raises(EmptySeries):
        edge_node_probability([])
    with pytest.raises(DimensionMismatch):
        edge_node_probability([[0, 1], [1, 0, 1]])


@pytest.mark.parametrize("p, bit, expected", [(0.3, 1, 0.3), (0.3, 0, 0.7), (1.0, 1, 1.0)])
def test_observed_probability(p, bit, expected):
    assert observed_probability(np.array([bit]), prob([p]), 0) == pytest.approx(expected)


def test_observed_probability_index():
    with pytest.raises(IndexOutOfRange):
        observed_probability(np.array([1, 0]), prob([0.1, 0.2]), 2)


def test_entropy_uniform_case():
    n = 7
    cfg = np.array([1, 0, 1, 1, 0, 0, 1])
    assert slice_entropy(cfg, prob([0.5] * n)) == pytest.approx(0.5 * n * np.log(2), abs=1e-10)


def test_entropy_certain_case():
    assert slice_entropy(np.array([1, 0, 0]), prob([1.0, 0.0, 0.0])) == 0.0


def test_entropy_two_node_case():
    e = slice_entropy(np.array([1, 1]), prob([0.25, 0.75]))
    assert e == pytest.approx(-0.25 * np.log(0.25) - 0.75 * np.log(0.75), abs=1e-10)
    assert e == pytest.approx(0.5623, abs=5e-5)


def test_identical_slices_have_zero_entropy():
    configs = np.tile(np.array([1, 0, 1, 0], np.uint8), (6, 1))
    np.testing.assert_array_equal(entropy_diagram(configs).entropy, np.zeros(6))


def test_aberrant_slice_is_strict_maximum():
    configs = np.tile(np.array([1, 1, 0, 0, 0], np.uint8), (10, 1))
    configs[6] = [0, 0, 1, 1, 0]
    e = entropy_diagram(configs).entropy
    assert np.argmax(e) == 6
    assert np.sum(e == e.max()) == 1


def test_diagram_labels():
    cfgs = [EdgeNodeConfiguration(np.array([k % 2, 1], np.uint8), f"t{k}") for k in range(4)]
    assert entropy_diagram(cfgs).labels == ("t0", "t1", "t2", "t3")
    assert entropy_diagram(np.zeros((3, 2), np.uint8)).labels == (0, 1, 2)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 30), st.integers(0, 2**31))
def test_single_bit_perturbation_raises_entropy(n, seed):
    rng = np.random.default_rng(seed)
    p_e = rng.uniform(0.0, 1.0, size=n)
    tau = int(rng.integers(0, n))
    p_e[tau] = rng.choice([rng.uniform(0.01, 0.49), rng.uniform(0.51, 0.99)])
    a = (rng.uniform(size=n) < 0.5).astype(np.uint8)
    likely = 1 if p_e[tau] > 0.5 else 0
    a[tau] = likely
    b = a.copy()
    b[tau] = 1 - likely
    assert slice_entropy(b, prob(p_e)) > slice_entropy(a, prob(p_e))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 20), st.integers(1, 40), st.integers(0, 2**31))
def test_entropy_bounds_and_probability_consistency(m, n, seed):
    rng = np.random.default_rng(seed)
    configs = (rng.uniform(size=(m, n)) < rng.uniform()).astype(np.uint8)
    p = edge_node_probability(configs)
    np.testing.assert_array_equal(p.p_e, configs.sum(axis=0) / m)
    e = entropy_diagram(configs, p).entropy
    assert np.all(np.isfinite(e))
    assert np.all(e >= 0)
    assert np.all(e <= n / np.e + 1e-12)


# --- clustering -----------------------------------------------------------

A = np.array([1, 1, 1, 0, 0, 0], np.uint8)
B = np.array([0, 0, 0, 1, 1, 1], np.uint8)


def test_duplicated_groups_split_perfectly():
    res = cluster_configurations([A, A, B, B], 2, seed=0)
    assert res.labels.tolist() == [0, 0, 1, 1]
    assert res.silhouette == pytest.approx(1.0)
    np.testing.assert_array_equal(res.centroids, [A, B])


def test_k_equals_m():
    rng = np.random.default_rng(0)
    configs = (rng.uniform(size=(6, 12)) < 0.5).astype(np.uint8)
    res = cluster_configurations(configs, 6, seed=0)
    assert sorted(res.labels.tolist()) == list(range(6))
    assert res.labels.tolist() == list(range(6))  # first-occurrence order


def test_cluster_errors():
    with pytest.raises(BadK):
        cluster_configurations([A, B, A], 1)
    with pytest.raises(BadK):
        cluster_configurations([A, B, A], 4)
    with pytest.raises(DegenerateData):
        cluster_configurations([A, A, A], 2)


def test_clustering_is_deterministic():
    rng = np.random.default_rng(3)
    configs = (rng.uniform(size=(40, 30)) < 0.3).astype(np.uint8)
    a = cluster_configurations(configs, 4, seed=11)
    b = cluster_configurations(configs, 4, seed=11)
    np.testing.assert_array_equal(a.labels, b.labels)
    assert a.labels[0] == 0
    assert set(a.labels.tolist()) == set(range(4))


def test_select_k_two_groups():
    k, res = select_k_by_silhouette([A, A, B, B, A, B], range(2, 5), seed=0)
    assert k == 2 and res.k == 2
    assert res.silhouette == pytest.approx(1.0)


def test_select_k_errors():
    with pytest.raises(DegenerateData):
        select_k_by_silhouette([A] * 5, range(2, 4))
    with pytest.raises(BadK):
        select_k_by_silhouette([A, B, A, B], range(2, 5))  # k=4 > m-1
    with pytest.raises(BadK):
        select_k_by_silhouette([A, B, A, B], range(1, 3))


def test_select_k_prefers_three_clear_groups():
    C = np.array([1, 0, 1, 0, 1, 0], np.uint8)
    configs = [A, B, C] * 4
    k, res = select_k_by_silhouette(configs, range(2, 7), seed=0)
    assert k == 3
    assert res.labels.tolist() == [0, 1, 2] * 4


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 40), st.integers(2, 5), st.integers(0, 2**31))
def test_silhouette_matches_sklearn(m, k, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(m, 3))
    labels = rng.integers(0, k, size=m)
    if not 2 <= np.unique(labels).size <= m - 1:
        # one cluster, or all singletons
        assert silhouette(x, labels) == 0.0
        return
    ours = silhouette(x, labels)
    assert -1.0 <= ours <= 1.0
    assert ours == pytest.approx(silhouette_score(x, labels), abs=1e-10)


# --- enhancement ----------------------------------------------------------

def test_enhance_examples():
    np.testing.assert_allclose(enhance_signal([0, 10, 5], prob([0.2, 0, 0.5])), [0.2, 1.0, 1.0])
    np.testing.assert_allclose(enhance_signal([2, 4, 1], prob([0, 0, 0])), [0.5, 1.0, 0.25])
    np.testing.assert_allclose(enhance_signal([0, 0, 0], prob([0.1, 0.9, 0.4])), [0.1, 0.9, 0.4])


def test_enhance_errors():
    with pytest.raises(DimensionMismatch):
        enhance_signal([1, 2], prob([0.1, 0.2, 0.3]))
    with pytest.raises(ValueError):
        enhance_signal([-1, 2], prob([0.1, 0.2]))
