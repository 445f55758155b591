"""Command-line interface: ``generate``, ``run``, ``enhance``, ``plot-entropy``.

Errors are reported on stderr as a single ``ERROR <CODE>: <message>`` line
and exit with status 2.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import io
from .errors import ConfigError, DimensionMismatch, GlogError, MalformedInput
from .graph import build_graph
from .pipeline import (
    BENCHMARK_SIGMA,
    BENCHMARK_THRESHOLD,
    PipelineConfig,
    run_pipeline,
    write_artifacts,
)
from .plot import write_entropy_svg
from .synth import SyntheticConfig, generate_synthetic
from .temporal import enhance_signal

log = logging.getLogger("graphglog")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        sys.stderr.write(f"ERROR USAGE: {message}\n")
        raise SystemExit(2)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="graphglog", description="GLoG boundary detection and entropy diagrams on graphs.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write the synthetic moving-disc dataset")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--slices", type=int, default=100)
    g.add_argument("--points", type=int, default=600)
    g.add_argument("--anomalies", type=int, default=None, help="default: 12 per 100 slices")
    g.add_argument("--shift", type=float, default=0.25)

    r = sub.add_parser("run", help="run the full pipeline")
    r.add_argument("--config", help="key = value file; flags override it")
    r.add_argument("--graph", help="edge-list CSV (src,dst[,weight])")
    r.add_argument("--signals", help="long-form CSV (slice,node_index,value)")
    r.add_argument("--synthetic", action="store_true", default=None, help="use the built-in synthetic dataset")
    r.add_argument("--slices", type=int)
    r.add_argument("--sigma", type=float)
    r.add_argument("--threshold", help="quartile:Q or meanstd:K")
    r.add_argument("--mode", help="auto, exact or cheb:K")
    r.add_argument("--exact-cap", type=int, dest="exact_cap")
    r.add_argument("--k", help="N or auto:A..B")
    r.add_argument("--seed", type=int)
    r.add_argument("--jobs", type=int, help="worker threads; 0 = all cores")
    r.add_argument("--out")

    e = sub.add_parser("enhance", help="normalised totals plus edge-node probability")
    e.add_argument("--totals", required=True, help="CSV node_index,total")
    e.add_argument("--p-e", required=True, dest="p_e", help="CSV node_index,p_e")
    e.add_argument("--out", required=True)

    pe = sub.add_parser("plot-entropy", help="render entropy.csv as SVG")
    pe.add_argument("--entropy", required=True)
    pe.add_argument("--out", required=True)
    return p


def _cmd_generate(args) -> int:
    cfg = SyntheticConfig(
        n_points=args.points, n_slices=args.slices, n_anomalies=args.anomalies, shift=args.shift
    )
    ds = generate_synthetic(args.seed, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_points(out / "points.csv", ds.points)
    io.write_edge_list(out / "graph.csv", ds.graph.edges, ds.graph.weights)
    io.write_signals(out / "signals.csv", range(ds.n_slices), ds.signal)
    io.write_anomalies(out / "anomalies.csv", ds.anomalies)
    print(f"wrote {ds.graph.n} nodes, {ds.graph.num_edges} edges, {ds.n_slices} slices to {out}")
    return 0


def _resolve_run_config(args) -> PipelineConfig:
    file_values = {}
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        file_values = PipelineConfig.parse_text(text)
    flags = {
        k: getattr(args, k)
        for k in ("graph", "signals", "synthetic", "slices", "sigma", "threshold", "mode",
                  "exact_cap", "k", "seed", "jobs", "out")
        if getattr(args, k) is not None
    }
    merged = {**file_values, **flags}
    if merged.get("synthetic"):
        merged.setdefault("sigma", BENCHMARK_SIGMA)
        merged.setdefault("threshold", str(BENCHMARK_THRESHOLD))
    return PipelineConfig(**merged)


def _cmd_run(args) -> int:
    start = time.perf_counter()
    cfg = _resolve_run_config(args)
    out = Path(cfg.out)
    if cfg.synthetic:
        ds = generate_synthetic(cfg.seed, SyntheticConfig(n_slices=cfg.slices))
        graph, signals, labels = ds.graph, ds.signal, list(range(ds.n_slices))
    else:
        if not cfg.graph or not cfg.signals:
            raise ConfigError("run needs --graph and --signals, or --synthetic")
        edges = io.read_edge_list(cfg.graph)
        max_idx = max((max(i, j) for i, j, _ in edges), default=-1)
        labels, signals = io.read_signals(cfg.signals)
        n = max(max_idx + 1, signals.shape[1])
        if signals.shape[1] < n:
            signals = np.pad(signals, ((0, 0), (0, n - signals.shape[1])))
        graph = build_graph(n, edges)
        ds = None

    result = run_pipeline(graph, signals, labels, cfg)
    write_artifacts(result, out, cfg)
    if ds is not None:
        io.write_anomalies(out / "anomalies.csv", ds.anomalies)

    cl = result.clusters
    print(f"nodes={graph.n} edges={graph.num_edges} slices={len(labels)} mode={result.mode}")
    if cl is not None:
        print(f"clusters k={cl.k} silhouette={cl.silhouette:.4f}")
    top = np.argsort(-result.diagram.entropy, kind="stable")[:5]
    print("highest-entropy slices: " + ", ".join(str(labels[t]) for t in top))
    for name, secs in result.timings.items():
        print(f"time {name}: {secs:.3f}s")
    print(f"total wall time: {time.perf_counter() - start:.3f}s")
    return 0


def _cmd_enhance(args) -> int:
    totals = io.read_node_values(args.totals, ("total", "value"))
    p_e = io.read_node_values(args.p_e, ("p_e",))
    if totals.shape != p_e.shape:
        raise DimensionMismatch(f"{args.totals} has {totals.size} nodes, {args.p_e} has {p_e.size}")
    if (totals < 0).any():
        raise MalformedInput(f"{args.totals}: totals must be non-negative")
    out = enhance_signal(totals, p_e)
    io.write_node_values(args.out, "enhanced_value", out)
    return 0


def _cmd_plot(args) -> int:
    _, entropy, clusters = io.read_entropy(args.entropy)
    write_entropy_svg(args.out, entropy, clusters)
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "run": _cmd_run,
    "enhance": _cmd_enhance,
    "plot-entropy": _cmd_plot,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _COMMANDS[args.command](args)
    except GlogError as exc:
        msg = " ".join(str(exc).split())
        sys.stderr.write(f"ERROR {exc.code}: {msg}\n")
    except FileNotFoundError as exc:
        sys.stderr.write(f"ERROR FILE_NOT_FOUND: {exc.filename}\n")
    except OSError as exc:
        sys.stderr.write(f"ERROR IO_ERROR: {' '.join(str(exc).split())}\n")
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
