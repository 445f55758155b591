"""Boundary detection on graph signals with the graph Laplacian of Gaussian (GLoG),
plus edge-node probability, time-slice entropy diagrams and configuration
clustering for spatio-temporal data."""

from .errors import GlogError
from .glog import (
    EdgeNodeConfiguration,
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
from .graph import (
    Laplacian,
    WeightedGraph,
    build_graph,
    build_laplacian,
    grid_graph,
    is_connected,
)
from .pipeline import PipelineConfig, run_pipeline
from .spectral import (
    SpectralBasis,
    SpectralFilter,
    apply_filter_chebyshev,
    apply_filter_exact,
    eigendecompose,
    estimate_lambda_max,
    gaussian_kernel,
    gft,
    glog_kernel,
    igft,
)
from .synth import generate_synthetic, noisy_step_fixture
from .temporal import (
    cluster_configurations,
    edge_node_probability,
    enhance_signal,
    entropy_diagram,
    observed_probability,
    select_k_by_silhouette,
    slice_entropy,
)

__version__ = "0.1.0"
