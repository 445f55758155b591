"""End-to-end pipeline: edge nodes per slice, probability, entropy, clusters."""

from __future__ import annotations

import logging
import re
import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import io
from .errors import ConfigError, DegenerateData
from .glog import DEFAULT_SIGMA, FilterMode, GlogDetector, ThresholdPolicy
from .graph import WeightedGraph, build_laplacian, require_connected
from .plot import write_entropy_svg
from .spectral import DEFAULT_EXACT_NODE_CAP
from .temporal import (
    ClusterResult,
    EdgeNodeProbability,
    EntropyDiagram,
    cluster_configurations,
    edge_node_probability,
    entropy_diagram,
    select_k_by_silhouette,
)

__all__ = [
    "BENCHMARK_SIGMA",
    "BENCHMARK_THRESHOLD",
    "PipelineConfig",
    "PipelineResult",
    "parse_k",
    "resolve_mode",
    "run_pipeline",
    "write_artifacts",
]

log = logging.getLogger(__name__)

# Parameters for the synthetic moving-disc benchmark. Chosen on held-out
# seeds 100-114; see README.
BENCHMARK_SIGMA = 8.0
BENCHMARK_THRESHOLD = ThresholdPolicy("quartile", 0.5)

_K_AUTO = re.compile(r"^auto:(\d+)\.\.(\d+)$")


def parse_k(text: str) -> Union[int, range]:
    """``N`` for a fixed k, ``auto:A..B`` for silhouette selection over ``A..B``."""
    text = str(text).strip().lower()
    m = _K_AUTO.match(text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if lo < 2 or hi < lo:
            raise ConfigError(f"bad k range {text!r}; need 2 <= A <= B")
        return range(lo, hi + 1)
    try:
        k = int(text)
    except ValueError:
        raise ConfigError(f"cannot parse k {text!r}; expected N or auto:A..B") from None
    if k < 2:
        raise ConfigError(f"k must be >= 2, got {k}")
    return k


def resolve_mode(mode: str, n: int, cap: int) -> FilterMode:
    """``auto`` picks exact mode up to ``cap`` nodes and Chebyshev (K=50) above."""
    if mode.strip().lower() == "auto":
        return FilterMode("exact") if n <= cap else FilterMode("chebyshev")
    return FilterMode.parse(mode)


@dataclass(frozen=True)
class PipelineConfig:
    sigma: float = DEFAULT_SIGMA
    threshold: str = "quartile:0.75"
    mode: str = "auto"
    exact_cap: int = DEFAULT_EXACT_NODE_CAP
    k: str = "auto:2..10"
    seed: int = 0
    jobs: int = 0  # 0: all cores
    graph: str = ""
    signals: str = ""
    synthetic: bool = False
    slices: int = 100
    out: str = "out"

    def __post_init__(self):
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ConfigError(f"sigma must be positive, got {self.sigma}")
        ThresholdPolicy.parse(self.threshold)
        if self.mode.strip().lower() != "auto":
            FilterMode.parse(self.mode)
        parse_k(self.k)
        if self.exact_cap < 1:
            raise ConfigError(f"exact_cap must be positive, got {self.exact_cap}")
        if self.jobs < 0:
            raise ConfigError(f"jobs must be >= 0, got {self.jobs}")
        if self.slices < 1:
            raise ConfigError(f"slices must be >= 1, got {self.slices}")

    @property
    def policy(self) -> ThresholdPolicy:
        return ThresholdPolicy.parse(self.threshold)

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def parse_text(text: str) -> dict:
        """Parse ``key = value`` lines (``#`` comments allowed) into typed overrides."""
        types = {f.name: f.type for f in fields(PipelineConfig)}
        out = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip().replace("-", "_"), value.strip()
            if not sep or key not in types:
                raise ConfigError(f"config line {lineno}: cannot parse {raw!r}")
            out[key] = _coerce(key, types[key], value)
        return out

    @classmethod
    def from_text(cls, text: str) -> "PipelineConfig":
        return cls(**cls.parse_text(text))

    def with_overrides(self, **overrides) -> "PipelineConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def _coerce(key: str, typ, value: str):
    typ = typ if isinstance(typ, str) else typ.__name__
    try:
        if typ == "bool":
            if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(value)
            return value.lower() in ("true", "1", "yes")
        if typ == "int":
            return int(value)
        if typ == "float":
            return float(value)
    except ValueError:
        raise ConfigError(f"config key {key!r}: bad value {value!r}") from None
    return value


@dataclass
class PipelineResult:
    labels: list
    configurations: np.ndarray
    probability: EdgeNodeProbability
    diagram: EntropyDiagram
    clusters: Optional[ClusterResult]
    mode: FilterMode
    timings: dict = field(default_factory=dict)


def run_pipeline(
    graph: WeightedGraph,
    signals: np.ndarray,
    labels: Optional[Sequence] = None,
    config: PipelineConfig = PipelineConfig(),
) -> PipelineResult:
    """Run GLoG on every slice of ``signals`` (shape ``(m, n)``) and derive the analytics."""
    timings = {}
    t0 = time.perf_counter()
    require_connected(graph)
    signals = np.atleast_2d(np.asarray(signals, dtype=float))
    m = signals.shape[0]
    labels = list(range(m)) if labels is None else list(labels)

    lap = build_laplacian(graph)
    mode = resolve_mode(config.mode, graph.n, config.exact_cap)
    detector = GlogDetector(lap, config.sigma, config.policy, mode, exact_node_cap=config.exact_cap)
    t1 = time.perf_counter()
    timings["setup"] = t1 - t0

    bits = detector.configurations(signals, jobs=config.jobs)
    t2 = time.perf_counter()
    timings["edge_nodes"] = t2 - t1

    prob = edge_node_probability(bits)
    diagram = entropy_diagram(bits, prob, labels=labels)
    t3 = time.perf_counter()
    timings["entropy"] = t3 - t2

    clusters = _cluster(bits, config)
    if clusters is not None:
        diagram = diagram.with_clusters(clusters.labels)
    timings["clustering"] = time.perf_counter() - t3
    timings["total"] = time.perf_counter() - t0
    return PipelineResult(labels, bits, prob, diagram, clusters, mode, timings)


def _cluster(bits: np.ndarray, config: PipelineConfig) -> Optional[ClusterResult]:
    m = bits.shape[0]
    k = parse_k(config.k)
    try:
        if isinstance(k, int):
            return cluster_configurations(bits, k, config.seed)
        ks = [kk for kk in k if kk <= m - 1]
        if not ks:
            log.warning("too few slices (%d) for clustering; skipped", m)
            return None
        return select_k_by_silhouette(bits, ks, config.seed)[1]
    except DegenerateData as exc:
        log.warning("clustering skipped: %s", exc)
        return None


def write_artifacts(result: PipelineResult, out_dir, config: Optional[PipelineConfig] = None) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if config is not None:
        (out / "config_resolved.txt").write_text(config.to_text(), encoding="utf-8")
    labels = result.labels
    io.write_edge_nodes(out / "edge_nodes.csv", labels, result.configurations)
    io.write_edge_nodes_sparse(out / "edge_nodes_sparse.csv", labels, result.configurations)
    io.write_probability(out / "p_e.csv", result.probability.p_e)
    clusters = result.clusters.labels if result.clusters is not None else None
    io.write_entropy(out / "entropy.csv", labels, result.diagram.entropy, clusters)
    if clusters is not None:
        io.write_clusters(out / "clusters.csv", labels, clusters)
    write_entropy_svg(out / "entropy.svg", result.diagram.entropy, clusters)
    return out
