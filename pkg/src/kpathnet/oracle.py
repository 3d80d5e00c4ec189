"""Brute-force reference computations for tiny graphs.

Nothing here shares code with the production paths it is used to check:
walk probabilities are enumerated exactly, modularity is maximised over
every set partition, and edge betweenness is counted with plain BFS.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .graph import Graph

MAX_WALK_EDGES = 12
MAX_WALK_KAPPA = 4
MAX_PARTITION_VERTICES = 10
MAX_BETWEENNESS_VERTICES = 1000


@dataclass
class WalkDistribution:
    edge_probability: np.ndarray
    # (source, edge ids) -> probability
    traces: dict[tuple[int, tuple[int, ...]], float] = field(default_factory=dict)


def exact_walk_distribution(g: Graph, kappa: int, source_policy="degree", *,
                            max_edges: int = MAX_WALK_EDGES,
                            max_kappa: int = MAX_WALK_KAPPA,
                            exact: bool = False) -> WalkDistribution:
    """Exact per-edge probability that a single walk traverses each edge,
    with every edge weight fixed at 1.

    Enumerates every (source, edge-distinct walk) realisation. ``exact=True``
    accumulates in rational arithmetic before converting to float.
    """
    if g.edge_count > max_edges or kappa > max_kappa:
        raise DomainError(
            f"enumeration bound exceeded (|E|={g.edge_count} > {max_edges} "
            f"or kappa={kappa} > {max_kappa})")
    if kappa < 1:
        raise DomainError("kappa must be >= 1")
    one = Fraction(1) if exact else 1.0
    if str(getattr(source_policy, "value", source_policy)) == "uniform":
        src_p = [one / g.n] * g.n
    else:
        if g.edge_count == 0:
            raise DomainError("degree-proportional sources need at least one edge")
        src_p = [one * len(g.incident(v)) / (2 * g.edge_count) for v in range(g.n)]

    adj = [g.incident(v) for v in range(g.n)]
    traces: dict = {}

    def walk(source, v, used, prob):
        if len(used) == kappa:
            traces[(source, tuple(used))] = prob
            return
        free = [(e, w) for e, w in adj[v] if e not in used]
        if not free:
            traces[(source, tuple(used))] = prob
            return
        step = prob / len(free)
        for e, w in free:
            used.append(e)
            walk(source, w, used, step)
            used.pop()

    for s in range(g.n):
        if src_p[s]:
            walk(s, s, [], src_p[s])

    per_edge = [one * 0] * g.edge_count
    for (_, path), p in traces.items():
        for e in path:
            per_edge[e] += p
    return WalkDistribution(np.array([float(x) for x in per_edge]),
                            {k: float(v) for k, v in traces.items()})


@dataclass
class ExhaustiveQResult:
    labels: np.ndarray
    q: float
    enumerated: int


def _set_partitions(n: int) -> np.ndarray:
    """All restricted-growth strings of length n, one per row."""
    rows = [[0]] if n else [[]]
    for _ in range(1, n):
        nxt = []
        for r in rows:
            top = max(r) + 1
            for c in range(top + 1):
                nxt.append(r + [c])
        rows = nxt
    return np.array(rows, dtype=np.int64).reshape(len(rows), n)


def exhaustive_modularity_max(g: Graph) -> ExhaustiveQResult:
    """Best modularity over every partition of the vertex set."""
    if g.n > MAX_PARTITION_VERTICES:
        raise DomainError(f"exhaustive search limited to {MAX_PARTITION_VERTICES} vertices")
    m = float(g.weight.sum())
    if g.edge_count == 0 or m == 0:
        raise DomainError("modularity undefined for a graph without edge weight")
    parts = _set_partitions(g.n)
    strength = np.zeros(g.n)
    for e in range(g.edge_count):
        strength[g.src[e]] += g.weight[e]
        strength[g.dst[e]] += g.weight[e]
    same = parts[:, g.src] == parts[:, g.dst]
    inside = same.astype(float) @ g.weight
    null = np.zeros(len(parts))
    for c in range(g.n):
        d = (parts == c).astype(float) @ strength
        null += (d / (2 * m)) ** 2
    q = inside / m - null
    best = int(np.argmax(q))
    return ExhaustiveQResult(parts[best].copy(), float(q[best]), len(parts))


def edge_betweenness(g: Graph) -> np.ndarray:
    """Shortest-path edge betweenness summed over ordered vertex pairs.

    Unweighted: every edge counts as one hop regardless of its weight.
    """
    if g.n > MAX_BETWEENNESS_VERTICES:
        raise DomainError(f"betweenness oracle limited to {MAX_BETWEENNESS_VERTICES} vertices")
    adj = [g.incident(v) for v in range(g.n)]
    score = np.zeros(g.edge_count)
    for s in range(g.n):
        dist = [-1] * g.n
        sigma = [0] * g.n
        preds: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
        dist[s], sigma[s] = 0, 1
        order = []
        q = deque([s])
        while q:
            v = q.popleft()
            order.append(v)
            for e, w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    q.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append((v, e))
        delta = [0.0] * g.n
        for w in reversed(order):
            for v, e in preds[w]:
                c = sigma[v] / sigma[w] * (1.0 + delta[w])
                score[e] += c
                delta[v] += c
    return score
