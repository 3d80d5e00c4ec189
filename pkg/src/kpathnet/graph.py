"""Undirected simple graph in CSR form, plus edge-list I/O.

Vertices are dense integers ``0..n-1``; ``labels[i]`` keeps the id the
vertex had in the source file. Edges are stored once, canonicalised so
that ``src[e] < dst[e]``, and sorted lexicographically, which makes edge
ids a pure function of the edge set.
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from .errors import DomainError, ParseError, ValidationError

COMMENT_PREFIXES = ("#", "%")


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    indptr: np.ndarray
    adj_edge: np.ndarray
    adj_nbr: np.ndarray
    labels: np.ndarray
    # adjacency slot holding the other direction of the same edge
    adj_mirror: np.ndarray
    # slot of each edge in its lower endpoint's adjacency list
    edge_slot: np.ndarray

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]] | np.ndarray,
        weights: Iterable[float] | np.ndarray | None = None,
        labels: np.ndarray | None = None,
    ) -> "Graph":
        """Build a normalised graph: self-loops dropped, duplicates merged by
        summing their weights."""
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                         dtype=np.int64).reshape(-1, 2)
        if weights is None:
            w = np.ones(len(arr), dtype=np.float64)
        else:
            w = np.asarray(list(weights) if not isinstance(weights, np.ndarray) else weights,
                           dtype=np.float64)
            if w.shape != (len(arr),):
                raise ValidationError("weights must have one entry per edge")
        if n < 0:
            raise ValidationError("vertex count must be non-negative")
        if len(arr) and (arr.min() < 0 or arr.max() >= n):
            raise ValidationError("edge endpoint out of range")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValidationError("edge weights must be finite and non-negative")

        keep = arr[:, 0] != arr[:, 1]
        arr, w = arr[keep], w[keep]
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        if len(lo):
            key = lo * n + hi
            uniq, inv = np.unique(key, return_inverse=True)
            merged = np.zeros(len(uniq), dtype=np.float64)
            np.add.at(merged, inv, w)
            src, dst, w = uniq // n, uniq % n, merged
        else:
            src = dst = np.zeros(0, dtype=np.int64)
            w = np.zeros(0, dtype=np.float64)

        if labels is None:
            labels = np.arange(n, dtype=np.int64)
        return cls._assemble(n, src.astype(np.int64), dst.astype(np.int64), w,
                             np.asarray(labels, dtype=np.int64))

    @classmethod
    def _assemble(cls, n, src, dst, w, labels) -> "Graph":
        m = len(src)
        ends = np.concatenate([src, dst])
        others = np.concatenate([dst, src])
        eids = np.concatenate([np.arange(m), np.arange(m)]).astype(np.int64)
        # stable sort by vertex, then by edge id inside each vertex
        order = np.lexsort((eids, ends))
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(ends, minlength=n), out=indptr[1:])
        for a in (src, dst, w, labels):
            a.setflags(write=False)
        adj_edge, adj_nbr = eids[order], others[order]
        # the two slots of every edge are adjacent after a stable sort by edge id
        by_edge = np.argsort(adj_edge, kind="stable").reshape(-1, 2)
        mirror = np.empty(2 * m, dtype=np.int64)
        mirror[by_edge[:, 0]] = by_edge[:, 1]
        mirror[by_edge[:, 1]] = by_edge[:, 0]
        # src < dst and src's list comes first, so column 0 is the src side
        edge_slot = by_edge[:, 0].copy()
        for a in (adj_edge, adj_nbr, indptr, mirror, edge_slot):
            a.setflags(write=False)
        return cls(n, src, dst, w, indptr, adj_edge, adj_nbr, labels, mirror, edge_slot)

    @property
    def vertex_count(self) -> int:
        return self.n

    @property
    def edge_count(self) -> int:
        return len(self.src)

    @property
    def total_weight(self) -> float:
        return float(self.weight.sum())

    def edges(self) -> np.ndarray:
        return np.column_stack([self.src, self.dst])

    def with_weights(self, weights) -> "Graph":
        """Same topology, new per-edge weights (indexed by edge id)."""
        w = np.array(weights, dtype=np.float64)
        if w.shape != (self.edge_count,):
            raise ValidationError("weights must have one entry per edge")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValidationError("edge weights must be finite and non-negative")
        w.setflags(write=False)
        return Graph(self.n, self.src, self.dst, w, self.indptr, self.adj_edge,
                     self.adj_nbr, self.labels, self.adj_mirror, self.edge_slot)

    def incident(self, v: int) -> list[tuple[int, int]]:
        """``(edge id, opposite endpoint)`` pairs for ``v`` in edge-id order."""
        a, b = self.indptr[v], self.indptr[v + 1]
        return list(zip(self.adj_edge[a:b].tolist(), self.adj_nbr[a:b].tolist()))

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def strengths(self) -> np.ndarray:
        s = np.zeros(self.n, dtype=np.float64)
        np.add.at(s, self.src, self.weight)
        np.add.at(s, self.dst, self.weight)
        return s

    def normalized_degrees(self) -> np.ndarray:
        if self.n == 0:
            return np.zeros(0)
        return self.degrees() / self.n

    def normalized_degree(self, v: int) -> float:
        """Incident-edge count of ``v`` divided by the vertex count."""
        if not 0 <= v < self.n:
            raise DomainError(f"vertex {v} out of range for graph with {self.n} vertices")
        return int(self.indptr[v + 1] - self.indptr[v]) / self.n

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.edge_count})"


def _open_text(source) -> tuple[IO[str], bool]:
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="utf-8"), True
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(source.decode("utf-8")), False
    if isinstance(source, io.TextIOBase):
        return source, False
    return io.TextIOWrapper(source, encoding="utf-8"), False


def load_edge_list(source, *, symmetrize: bool = True) -> Graph:
    """Read a whitespace-separated ``u v [w]`` edge list.

    ``source`` may be a path, raw bytes, or a text/binary stream. Vertex ids
    are compacted in ascending order of their original value. With
    ``symmetrize=False`` a file holding both ``u v`` and ``v u`` is rejected
    instead of being merged into one undirected edge.
    """
    fh, owned = _open_text(source)
    us: list[int] = []
    vs: list[int] = []
    ws: list[float] = []
    try:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith(COMMENT_PREFIXES):
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ParseError(f"expected 2 or 3 columns, got {len(parts)}", lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(f"non-integer vertex id in {line!r}", lineno) from None
            if u < 0 or v < 0:
                raise ParseError("vertex ids must be non-negative", lineno)
            w = 1.0
            if len(parts) == 3:
                try:
                    w = float(parts[2])
                except ValueError:
                    raise ParseError(f"non-numeric weight {parts[2]!r}", lineno) from None
                if not math.isfinite(w):
                    raise ParseError(f"non-finite weight {parts[2]!r}", lineno)
                if w < 0:
                    raise ValidationError(f"line {lineno}: negative weight {w}")
            us.append(u)
            vs.append(v)
            ws.append(w)
    finally:
        if owned:
            fh.close()

    if not us:
        raise DomainError("edge list is empty")

    raw_u = np.asarray(us, dtype=np.int64)
    raw_v = np.asarray(vs, dtype=np.int64)
    labels, inv = np.unique(np.concatenate([raw_u, raw_v]), return_inverse=True)
    k = len(raw_u)
    cu, cv = inv[:k], inv[k:]

    if not symmetrize:
        n = len(labels)
        fwd = set((cu * n + cv).tolist())
        rev = (cv * n + cu)[cu != cv]
        if any(x in fwd for x in rev.tolist()):
            raise ValidationError("input contains reciprocal arcs; enable symmetrization")

    return Graph.from_edges(len(labels), np.column_stack([cu, cv]),
                            np.asarray(ws, dtype=np.float64), labels=labels)


def format_weight(w: float) -> str:
    """Shortest text that parses back to exactly ``w``."""
    if float(w).is_integer() and abs(w) < 2**53:
        return str(int(w))
    return repr(float(w))


def write_edge_list(g: Graph, sink, weights=None) -> None:
    """Write ``u v w`` lines in edge-id order using the original vertex ids.

    ``sink`` is a path or a text/binary stream. ``weights`` defaults to the
    graph's own edge weights.
    """
    w = g.weight if weights is None else np.asarray(weights, dtype=np.float64)
    if w.shape != (g.edge_count,):
        raise ValidationError("weights must cover every edge")
    lab = g.labels
    text = "".join(
        f"{lab[a]} {lab[b]} {format_weight(x)}\n"
        for a, b, x in zip(g.src.tolist(), g.dst.tolist(), w.tolist())
    )
    _write_text(sink, text)


def write_weighted_edge_list(g: Graph, centrality, sink) -> None:
    """Persist a centrality map as the weight column of ``g``'s edge list."""
    write_edge_list(g, sink, weights=centrality.estimate)


def _write_text(sink, text: str) -> None:
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    elif isinstance(sink, io.TextIOBase):
        sink.write(text)
    else:
        sink.write(text.encode("utf-8"))
