"""Synthetic benchmark: a moving disc on a random Delaunay graph, plus a noisy-step fixture.

Random draws come from ``numpy.random.default_rng(seed)`` (PCG64) in a fixed
order, all uniform on their intervals:

1. node coordinates, ``(n_points, 2)`` in ``[0, 1)``;
2. for each slice in order: ``dx``, ``dy`` in ``[-jitter, jitter]``, then
   ``n_points`` noise values in ``[-noise, noise]``.

Anomalous slices add ``shift * (+-1, +-1) / sqrt(2)`` to the disc centre.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .delaunay import delaunay
from .graph import WeightedGraph, build_graph

__all__ = [
    "SyntheticConfig",
    "SyntheticDataset",
    "anomaly_schedule",
    "disc_signal",
    "generate_synthetic",
    "noisy_step_fixture",
]

TOP_RIGHT = "top-right"
BOTTOM_LEFT = "bottom-left"
CENTERED = "centered"


@dataclass(frozen=True)
class SyntheticConfig:
    n_points: int = 600
    n_slices: int = 100
    n_anomalies: Optional[int] = None  # None: 12 per 100 slices, rounded
    radius: float = 0.1
    jitter: float = 0.05
    noise: float = 0.1
    shift: float = 0.25
    anomaly_slices: Optional[Tuple[int, ...]] = None

    def resolved_anomalies(self) -> int:
        if self.anomaly_slices is not None:
            return len(self.anomaly_slices)
        if self.n_anomalies is not None:
            return int(self.n_anomalies)
        return int(round(12 * self.n_slices / 100))


@dataclass(frozen=True)
class SyntheticDataset:
    graph: WeightedGraph
    points: np.ndarray
    signal: np.ndarray  # (m, n)
    clean: np.ndarray  # (m, n) binary, before noise
    centers: np.ndarray  # (m, 2)
    anomalies: dict  # slice index -> direction
    seed: int
    config: SyntheticConfig = field(default_factory=SyntheticConfig)

    @property
    def n_slices(self) -> int:
        return self.signal.shape[0]

    @property
    def anomalous_slices(self) -> np.ndarray:
        return np.array(sorted(self.anomalies), dtype=np.int64)

    def ground_truth(self) -> np.ndarray:
        """Per-slice group: 0 centred, 1 top-right, 2 bottom-left."""
        codes = {TOP_RIGHT: 1, BOTTOM_LEFT: 2}
        out = np.zeros(self.n_slices, dtype=np.int64)
        for t, direction in self.anomalies.items():
            out[t] = codes[direction]
        return out


def anomaly_schedule(n_slices: int, n_anomalies: int, slices: Optional[Sequence[int]] = None) -> dict:
    """Evenly spaced anomalous slices alternating top-right / bottom-left.

    Slice ``floor((k + 0.5) * m / count)`` is the k-th anomaly; even k shift
    top-right, odd k bottom-left.
    """
    if slices is None:
        if not 0 <= n_anomalies <= n_slices:
            raise ValueError(f"cannot place {n_anomalies} anomalies in {n_slices} slices")
        slices = [int((k + 0.5) * n_slices / n_anomalies) for k in range(n_anomalies)]
    slices = [int(s) for s in slices]
    if len(set(slices)) != len(slices) or any(not 0 <= s < n_slices for s in slices):
        raise ValueError(f"invalid anomalous slice indices {slices}")
    return {s: (TOP_RIGHT if k % 2 == 0 else BOTTOM_LEFT) for k, s in enumerate(slices)}


def disc_signal(points: np.ndarray, center, radius: float) -> np.ndarray:
    """1.0 for points within ``radius`` of ``center`` (inclusive), else 0.0."""
    d2 = ((np.asarray(points) - np.asarray(center)) ** 2).sum(axis=1)
    return (d2 <= radius**2).astype(float)


def generate_synthetic(seed: int = 0, config: SyntheticConfig = SyntheticConfig()) -> SyntheticDataset:
    rng = np.random.default_rng(seed)
    points = rng.uniform(0.0, 1.0, size=(config.n_points, 2))
    graph = build_graph(config.n_points, delaunay(points).tolist())

    m = config.n_slices
    anomalies = anomaly_schedule(m, config.resolved_anomalies(), config.anomaly_slices)
    step = config.shift / np.sqrt(2.0)
    offsets = {TOP_RIGHT: np.array([step, step]), BOTTOM_LEFT: np.array([-step, -step])}

    signal = np.empty((m, config.n_points))
    clean = np.empty((m, config.n_points))
    centers = np.empty((m, 2))
    for t in range(m):
        delta = rng.uniform(-config.jitter, config.jitter, size=2)
        noise = rng.uniform(-config.noise, config.noise, size=config.n_points)
        center = 0.5 + delta
        if t in anomalies:
            center = center + offsets[anomalies[t]]
        centers[t] = center
        clean[t] = disc_signal(points, center, config.radius)
        signal[t] = clean[t] + noise

    for a in (points, signal, clean, centers):
        a.setflags(write=False)
    return SyntheticDataset(
        graph=graph,
        points=points,
        signal=signal,
        clean=clean,
        centers=centers,
        anomalies=anomalies,
        seed=seed,
        config=config,
    )


def noisy_step_fixture(
    seed: int = 0, n_points: int = 100, noise: float = 0.1, split: float = 0.5
) -> Tuple[WeightedGraph, np.ndarray, np.ndarray]:
    """Random Delaunay graph in the unit square carrying a vertical step.

    Returns ``(graph, signal, points)``; the signal is ``1 + eps`` right of
    ``x = split`` and ``eps`` left of it, with ``eps`` uniform in
    ``[-noise, noise]``.
    """
    rng = np.random.default_rng(seed)
    points = rng.uniform(0.0, 1.0, size=(n_points, 2))
    graph = build_graph(n_points, delaunay(points).tolist())
    step = (points[:, 0] >= split).astype(float)
    eps = rng.uniform(-noise, noise, size=n_points)
    return graph, step + eps, points
