"""GLoG boundary detection: filter, zero-crossing pairs, thresholding, edge nodes."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import ConfigError, DimensionMismatch, IndexOutOfRange
from .graph import Laplacian, WeightedGraph, as_signal
from .spectral import (
    DEFAULT_CHEBYSHEV_ORDER,
    DEFAULT_EXACT_NODE_CAP,
    SpectralBasis,
    apply_chebyshev,
    apply_filter_exact,
    chebyshev_approximant,
    eigendecompose,
    estimate_lambda_max,
    glog_kernel,
)

__all__ = [
    "DEFAULT_SIGMA",
    "FilterMode",
    "ThresholdPolicy",
    "ZeroCrossingPair",
    "ZeroCrossingPairs",
    "EdgeNodeConfiguration",
    "glog_filter",
    "suppress_rounding",
    "find_zero_crossing_pairs",
    "threshold_pairs",
    "edge_node_configuration",
    "run_glog",
    "GlogDetector",
]

DEFAULT_SIGMA = 3.0
# GLoG values this small relative to the input are rounding residue and are
# treated as exact zeros before sign tests
ZERO_FLOOR = 1e-10


@dataclass(frozen=True)
class FilterMode:
    """``exact`` (eigendecomposition) or ``chebyshev`` of a given order."""

    kind: str = "chebyshev"
    order: int = DEFAULT_CHEBYSHEV_ORDER

    def __post_init__(self):
        if self.kind not in ("exact", "chebyshev"):
            raise ConfigError(f"unknown filter mode {self.kind!r}")
        if self.kind == "chebyshev" and int(self.order) < 1:
            raise ConfigError(f"Chebyshev order must be >= 1, got {self.order}")

    @classmethod
    def parse(cls, text: str) -> "FilterMode":
        """Parse ``exact``, ``cheb`` or ``cheb:K``."""
        text = text.strip().lower()
        if text == "exact":
            return cls("exact")
        kind, _, arg = text.partition(":")
        if kind not in ("cheb", "chebyshev"):
            raise ConfigError(f"cannot parse filter mode {text!r}; expected exact or cheb:K")
        try:
            order = int(arg) if arg else DEFAULT_CHEBYSHEV_ORDER
        except ValueError:
            raise ConfigError(f"bad Chebyshev order in {text!r}") from None
        return cls("chebyshev", order)

    def __str__(self) -> str:
        return "exact" if self.kind == "exact" else f"cheb:{self.order}"


@dataclass(frozen=True)
class ThresholdPolicy:
    """Rule for keeping only the strongest zero-crossing pairs.

    ``quartile`` keeps scores strictly above the ``value``-quantile (linear
    interpolation between order statistics). ``meanstd`` keeps scores
    strictly above ``mean + value * std`` (population std).
    """

    kind: str = "quartile"
    value: float = 0.75

    def __post_init__(self):
        if self.kind == "quartile":
            if not 0.0 < self.value < 1.0:
                raise ConfigError(f"quantile must lie in (0, 1), got {self.value}")
        elif self.kind == "meanstd":
            if not self.value >= 0.0:
                raise ConfigError(f"std multiplier must be >= 0, got {self.value}")
        else:
            raise ConfigError(f"unknown threshold policy {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "ThresholdPolicy":
        """Parse ``quartile:0.75`` or ``meanstd:2``."""
        kind, _, arg = text.strip().lower().partition(":")
        if kind not in ("quartile", "meanstd") or not arg:
            raise ConfigError(
                f"cannot parse threshold {text!r}; expected quartile:Q or meanstd:K"
            )
        try:
            value = float(arg)
        except ValueError:
            raise ConfigError(f"bad threshold parameter in {text!r}") from None
        return cls(kind, value)

    def threshold(self, scores: np.ndarray) -> float:
        scores = np.asarray(scores, dtype=float)
        if scores.size == 0:
            return np.inf
        if self.kind == "quartile":
            return float(np.quantile(scores, self.value, method="linear"))
        return float(scores.mean() + self.value * scores.std())

    def __str__(self) -> str:
        return f"{self.kind}:{self.value:g}"


class ZeroCrossingPair(NamedTuple):
    i: int
    j: int
    score: float


@dataclass(frozen=True)
class ZeroCrossingPairs:
    """Zero-crossing pairs in columnar form, sorted by ``(i, j)``."""

    i: np.ndarray
    j: np.ndarray
    score: np.ndarray

    @classmethod
    def empty(cls) -> "ZeroCrossingPairs":
        return cls(np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0, float))

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[float]]) -> "ZeroCrossingPairs":
        if not pairs:
            return cls.empty()
        arr = np.asarray(pairs, dtype=float)
        return cls(arr[:, 0].astype(np.int64), arr[:, 1].astype(np.int64), arr[:, 2])

    def __len__(self) -> int:
        return self.score.shape[0]

    def __iter__(self) -> Iterator[ZeroCrossingPair]:
        for a, b, s in zip(self.i.tolist(), self.j.tolist(), self.score.tolist()):
            yield ZeroCrossingPair(a, b, s)

    def __getitem__(self, mask) -> "ZeroCrossingPairs":
        return ZeroCrossingPairs(self.i[mask], self.j[mask], self.score[mask])

    def tolist(self) -> list:
        return list(self)


@dataclass(frozen=True)
class EdgeNodeConfiguration:
    """Binary per-node indicator of strong edge nodes for one slice."""

    bits: np.ndarray
    label: object = None

    @property
    def n(self) -> int:
        return self.bits.shape[0]

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.bits)


GraphLike = Union[WeightedGraph, Laplacian]


def glog_filter(
    lap: Laplacian,
    f,
    sigma: float = DEFAULT_SIGMA,
    mode: Union[FilterMode, str] = "exact",
    basis: Optional[SpectralBasis] = None,
    lmax: Optional[float] = None,
) -> np.ndarray:
    """GLoG-filtered signal (one vector, or one column per slice for ``(n, m)`` input).

    A precomputed ``basis`` (exact mode) or ``lmax`` (Chebyshev mode) may be
    passed in to avoid recomputing it.
    """
    mode = FilterMode.parse(mode) if isinstance(mode, str) else mode
    f = as_signal(f, lap.n)
    h = glog_kernel(sigma)
    if mode.kind == "exact":
        if basis is None:
            basis = eigendecompose(lap)
        return apply_filter_exact(basis, h, f)
    if lmax is None:
        lmax = estimate_lambda_max(lap)
    return apply_chebyshev(lap.matrix, chebyshev_approximant(h, lmax, mode.order), f)


def suppress_rounding(s: np.ndarray, f: np.ndarray, sigma: float) -> np.ndarray:
    """Zero out GLoG values below ``ZERO_FLOOR * max|f| * max|kernel|``.

    Works on one slice (``s``, ``f`` of shape ``(n,)``) or a stack of slices
    along axis 0. The floor scales with the input, so positive rescaling of
    ``f`` leaves the result's sign pattern unchanged.
    """
    peak = 4.0 * np.pi**2 / (np.e * float(sigma) ** 2)
    amp = np.abs(f).max(axis=-1, keepdims=True) if f.size else 0.0
    return np.where(np.abs(s) <= ZERO_FLOOR * peak * amp, 0.0, s)


def find_zero_crossing_pairs(g: GraphLike, s) -> ZeroCrossingPairs:
    """Edges whose endpoint values have strictly opposite signs, with score ``|s_i - s_j|``."""
    s = np.asarray(s, dtype=float)
    n = g.n
    if s.ndim != 1 or s.shape[0] != n:
        raise DimensionMismatch(f"signal of shape {s.shape} does not match a graph with {n} nodes")
    ei = g.edge_index
    a, b = s[ei[:, 0]], s[ei[:, 1]]
    mask = a * b < 0
    return ZeroCrossingPairs(ei[mask, 0], ei[mask, 1], np.abs(a[mask] - b[mask]))


def threshold_pairs(pairs: ZeroCrossingPairs, policy: ThresholdPolicy = ThresholdPolicy()) -> ZeroCrossingPairs:
    """Keep the pairs whose score is strictly above the policy's threshold."""
    if not isinstance(pairs, ZeroCrossingPairs):
        pairs = ZeroCrossingPairs.from_pairs(list(pairs))
    if len(pairs) == 0:
        return pairs
    return pairs[pairs.score > policy.threshold(pairs.score)]


def edge_node_configuration(strong: ZeroCrossingPairs, n: int, label=None) -> EdgeNodeConfiguration:
    if not isinstance(strong, ZeroCrossingPairs):
        strong = ZeroCrossingPairs.from_pairs(list(strong))
    bits = np.zeros(n, dtype=np.uint8)
    if len(strong):
        idx = np.concatenate([strong.i, strong.j])
        if idx.min() < 0 or idx.max() >= n:
            raise IndexOutOfRange(f"pair index outside [0, {n})")
        bits[idx] = 1
    bits.setflags(write=False)
    return EdgeNodeConfiguration(bits, label)


def run_glog(
    lap: Laplacian,
    f,
    sigma: float = DEFAULT_SIGMA,
    policy: ThresholdPolicy = ThresholdPolicy(),
    mode: Union[FilterMode, str] = "exact",
    label=None,
) -> EdgeNodeConfiguration:
    """Edge-node configuration of a single slice."""
    f = as_signal(f, lap.n)
    s = suppress_rounding(glog_filter(lap, f, sigma, mode), f, sigma)
    strong = threshold_pairs(find_zero_crossing_pairs(lap, s), policy)
    return edge_node_configuration(strong, lap.n, label)


class GlogDetector:
    """Edge-node extraction for many slices sharing one graph.

    The eigendecomposition (exact mode) or the Chebyshev coefficients
    (Chebyshev mode) are computed once at construction.
    """

    def __init__(
        self,
        lap: Laplacian,
        sigma: float = DEFAULT_SIGMA,
        policy: ThresholdPolicy = ThresholdPolicy(),
        mode: Union[FilterMode, str] = FilterMode(),
        exact_node_cap: int = DEFAULT_EXACT_NODE_CAP,
    ):
        self.lap = lap
        self.sigma = float(sigma)
        self.policy = policy
        self.mode = FilterMode.parse(mode) if isinstance(mode, str) else mode
        self.kernel = glog_kernel(sigma)
        self.basis = None
        self.approximant = None
        if self.mode.kind == "exact":
            self.basis = eigendecompose(lap, max_nodes=exact_node_cap)
        else:
            self.approximant = chebyshev_approximant(
                self.kernel, estimate_lambda_max(lap), self.mode.order
            )

    def filter(self, signals) -> np.ndarray:
        """GLoG of an ``(m, n)`` array of slices; returns ``(m, n)``."""
        signals = np.atleast_2d(np.asarray(signals, dtype=float))
        cols = as_signal(signals.T, self.lap.n)
        if self.basis is not None:
            out = apply_filter_exact(self.basis, self.kernel, cols)
        else:
            out = apply_chebyshev(self.lap.matrix, self.approximant, cols)
        return np.ascontiguousarray(out.T)

    def _configurations(self, signals: np.ndarray) -> np.ndarray:
        g = suppress_rounding(self.filter(signals), signals, self.sigma)
        ei = self.lap.edge_index
        a, b = g[:, ei[:, 0]], g[:, ei[:, 1]]
        crossing = a * b < 0
        scores = np.abs(a - b)
        bits = np.zeros(g.shape, dtype=np.uint8)
        for t in range(g.shape[0]):
            sc = scores[t, crossing[t]]
            if sc.size == 0:
                continue
            keep = np.flatnonzero(crossing[t])[sc > self.policy.threshold(sc)]
            bits[t, ei[keep, 0]] = 1
            bits[t, ei[keep, 1]] = 1
        return bits

    def configurations(self, signals, jobs: int = 1, chunk: int = 64) -> np.ndarray:
        """Edge-node configurations of ``(m, n)`` slices as an ``(m, n)`` uint8 matrix.

        With ``jobs > 1`` chunks of slices run in a thread pool; the output is
        assembled in slice order, so it does not depend on scheduling.
        """
        signals = np.atleast_2d(np.asarray(signals, dtype=float))
        m = signals.shape[0]
        if jobs is None or jobs <= 0:
            jobs = os.cpu_count() or 1
        if jobs == 1 or m <= chunk:
            return self._configurations(signals)
        starts = range(0, m, chunk)
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(lambda s: self._configurations(signals[s : s + chunk]), starts))
        return np.concatenate(parts, axis=0)
