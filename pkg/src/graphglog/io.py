"""CSV ingestion and export.

Floats are written with ``repr`` (shortest round-trip form) so identical
results always produce identical bytes.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import MalformedInput

__all__ = [
    "read_edge_list",
    "read_signals",
    "read_node_values",
    "write_edge_list",
    "write_points",
    "write_signals",
    "write_anomalies",
    "write_edge_nodes",
    "write_edge_nodes_sparse",
    "write_probability",
    "write_entropy",
    "write_clusters",
    "write_node_values",
    "read_entropy",
]


def _fmt(x: float) -> str:
    return repr(float(x))


def _open_rows(path) -> Tuple[List[str], List[List[str]]]:
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except UnicodeDecodeError as exc:
        raise MalformedInput(f"{path}: not valid UTF-8 ({exc})") from None
    if not rows:
        raise MalformedInput(f"{path}: file is empty")
    header = [c.strip().lower() for c in rows[0]]
    return header, rows[1:]


def _columns(path, header, required, optional=()) -> dict:
    missing = [c for c in required if c not in header]
    if missing:
        raise MalformedInput(f"{path}: missing column(s) {', '.join(missing)}; header is {header}")
    return {c: header.index(c) for c in (*required, *optional) if c in header}


def _int(path, lineno, text) -> int:
    try:
        value = int(text.strip())
    except ValueError:
        raise MalformedInput(f"{path}:{lineno}: expected an integer, got {text!r}") from None
    return value


def _float(path, lineno, text) -> float:
    try:
        value = float(text.strip())
    except ValueError:
        raise MalformedInput(f"{path}:{lineno}: expected a number, got {text!r}") from None
    if not np.isfinite(value):
        raise MalformedInput(f"{path}:{lineno}: non-finite value {text!r}")
    return value


def read_edge_list(path) -> List[Tuple[int, int, float]]:
    """Read ``src,dst[,weight]`` rows; a missing or blank weight means 1.0."""
    header, rows = _open_rows(path)
    cols = _columns(path, header, ("src", "dst"), ("weight",))
    edges = []
    for lineno, row in enumerate(rows, start=2):
        try:
            i = _int(path, lineno, row[cols["src"]])
            j = _int(path, lineno, row[cols["dst"]])
            w_text = row[cols["weight"]] if "weight" in cols and cols["weight"] < len(row) else ""
        except IndexError:
            raise MalformedInput(f"{path}:{lineno}: too few fields") from None
        w = _float(path, lineno, w_text) if w_text.strip() else 1.0
        edges.append((i, j, w))
    return edges


def read_signals(path, n_nodes: Optional[int] = None) -> Tuple[list, np.ndarray]:
    """Read a long-form ``slice,node_index,value`` table.

    Returns ``(labels, values)`` with ``values`` of shape ``(m, n)``. Slices
    keep their order of first appearance; absent ``(slice, node)`` entries are
    zero (count exports usually omit empty cells). Repeated entries are an
    error.
    """
    header, rows = _open_rows(path)
    cols = _columns(path, header, ("slice", "node_index", "value"))
    labels: list = []
    slot = {}
    triples = []
    for lineno, row in enumerate(rows, start=2):
        try:
            label = row[cols["slice"]].strip()
            node = _int(path, lineno, row[cols["node_index"]])
            value = _float(path, lineno, row[cols["value"]])
        except IndexError:
            raise MalformedInput(f"{path}:{lineno}: too few fields") from None
        if node < 0:
            raise MalformedInput(f"{path}:{lineno}: negative node index {node}")
        if label not in slot:
            slot[label] = len(labels)
            labels.append(label)
        triples.append((slot[label], node, value, lineno))
    if not triples:
        raise MalformedInput(f"{path}: no data rows")
    max_node = max(t[1] for t in triples)
    n = max_node + 1 if n_nodes is None else n_nodes
    if max_node >= n:
        raise MalformedInput(f"{path}: node index {max_node} outside a graph with {n} nodes")
    values = np.zeros((len(labels), n))
    seen = np.zeros((len(labels), n), dtype=bool)
    for t, node, value, lineno in triples:
        if seen[t, node]:
            raise MalformedInput(f"{path}:{lineno}: duplicate entry for slice {labels[t]!r}, node {node}")
        seen[t, node] = True
        values[t, node] = value
    return labels, values


def read_node_values(path, value_columns: Sequence[str]) -> np.ndarray:
    """Read ``node_index,<value>`` rows (first matching value column) into a dense vector."""
    header, rows = _open_rows(path)
    vcol = next((c for c in value_columns if c in header), None)
    if vcol is None:
        raise MalformedInput(
            f"{path}: expected one of the columns {', '.join(value_columns)}; header is {header}"
        )
    cols = _columns(path, header, ("node_index", vcol))
    pairs = {}
    for lineno, row in enumerate(rows, start=2):
        try:
            node = _int(path, lineno, row[cols["node_index"]])
            value = _float(path, lineno, row[cols[vcol]])
        except IndexError:
            raise MalformedInput(f"{path}:{lineno}: too few fields") from None
        if node < 0:
            raise MalformedInput(f"{path}:{lineno}: negative node index {node}")
        if node in pairs:
            raise MalformedInput(f"{path}:{lineno}: duplicate node {node}")
        pairs[node] = value
    if not pairs:
        raise MalformedInput(f"{path}: no data rows")
    n = max(pairs) + 1
    if len(pairs) != n:
        raise MalformedInput(f"{path}: node indices must cover 0..{n - 1} exactly")
    out = np.empty(n)
    for node, value in pairs.items():
        out[node] = value
    return out


def read_entropy(path) -> Tuple[list, np.ndarray, Optional[np.ndarray]]:
    header, rows = _open_rows(path)
    cols = _columns(path, header, ("slice_label", "entropy"), ("cluster",))
    labels, ent, clusters = [], [], []
    for lineno, row in enumerate(rows, start=2):
        labels.append(row[cols["slice_label"]].strip())
        ent.append(_float(path, lineno, row[cols["entropy"]]))
        if "cluster" in cols and row[cols["cluster"]].strip():
            clusters.append(_int(path, lineno, row[cols["cluster"]]))
    cl = np.array(clusters) if len(clusters) == len(labels) else None
    return labels, np.array(ent), cl


def _write(path, header: Sequence[str], rows) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_edge_list(path, edges: np.ndarray, weights: np.ndarray) -> None:
    _write(path, ("src", "dst", "weight"), ((int(i), int(j), _fmt(w)) for (i, j), w in zip(edges, weights)))


def write_points(path, points: np.ndarray) -> None:
    _write(path, ("node_index", "x", "y"), ((k, _fmt(x), _fmt(y)) for k, (x, y) in enumerate(points)))


def write_signals(path, labels, values: np.ndarray) -> None:
    def rows():
        for label, row in zip(labels, values):
            for node, v in enumerate(row):
                yield (label, node, _fmt(v))

    _write(path, ("slice", "node_index", "value"), rows())


def write_anomalies(path, anomalies: dict) -> None:
    _write(path, ("slice", "direction"), ((t, anomalies[t]) for t in sorted(anomalies)))


def write_edge_nodes(path, labels, bits: np.ndarray) -> None:
    n = bits.shape[1]
    _write(
        path,
        ("slice_label", *(str(k) for k in range(n))),
        ((label, *row.tolist()) for label, row in zip(labels, bits)),
    )


def write_edge_nodes_sparse(path, labels, bits: np.ndarray) -> None:
    _write(
        path,
        ("slice_label", "node_index"),
        ((label, int(k)) for label, row in zip(labels, bits) for k in np.flatnonzero(row)),
    )


def write_probability(path, p_e: np.ndarray) -> None:
    _write(path, ("node_index", "p_e"), ((k, _fmt(p)) for k, p in enumerate(p_e)))


def write_entropy(path, labels, entropy: np.ndarray, clusters=None) -> None:
    if clusters is None:
        rows = ((label, _fmt(e), "") for label, e in zip(labels, entropy))
    else:
        rows = ((label, _fmt(e), int(c)) for label, e, c in zip(labels, entropy, clusters))
    _write(path, ("slice_label", "entropy", "cluster"), rows)


def write_clusters(path, labels, clusters) -> None:
    _write(path, ("slice_label", "cluster"), ((label, int(c)) for label, c in zip(labels, clusters)))


def write_node_values(path, column: str, values: np.ndarray) -> None:
    _write(path, ("node_index", column), ((k, _fmt(v)) for k, v in enumerate(values)))
