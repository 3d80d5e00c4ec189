"""Two-phase Louvain modularity maximisation on weighted graphs.

Phase one moves single vertices between neighbouring communities while
modularity strictly improves; phase two collapses each community into a
super-vertex whose self-loop holds the community's internal weight. The
phases alternate until a level no longer raises modularity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import DomainError, ValidationError
from ..graph import Graph
from .partition import Partition


@dataclass(frozen=True)
class LouvainConfig:
    seed: int = 0
    min_gain: float = 1e-12
    max_levels: int = 32
    max_passes: int = 1000

    def __post_init__(self):
        if self.min_gain < 0:
            raise ValidationError("min_gain must be >= 0")
        if self.max_levels < 1:
            raise ValidationError("max_levels must be >= 1")


@dataclass
class LouvainResult:
    partition: Partition
    hierarchy: list[Partition]
    q_per_level: list[float]

    @property
    def modularity(self) -> float:
        return self.q_per_level[-1]


@dataclass
class Network:
    """Weighted undirected graph that may carry self-loops.

    ``nbrs[i]`` maps neighbour -> weight (no self entries); ``loops[i]`` is
    the self-loop weight, counted once toward ``m`` and twice toward the
    vertex strength.
    """

    nbrs: list[dict[int, float]]
    loops: list[float]
    strength: list[float] = field(init=False)
    m: float = field(init=False)

    def __post_init__(self):
        self.strength = [sum(nb.values()) + 2.0 * lp for nb, lp in zip(self.nbrs, self.loops)]
        self.m = sum(self.strength) / 2.0

    @classmethod
    def from_graph(cls, g: Graph, weights=None) -> "Network":
        w = g.weight if weights is None else np.asarray(weights, dtype=np.float64)
        nbrs: list[dict[int, float]] = [{} for _ in range(g.n)]
        for a, b, x in zip(g.src.tolist(), g.dst.tolist(), w.tolist()):
            nbrs[a][b] = nbrs[a].get(b, 0.0) + x
            nbrs[b][a] = nbrs[b].get(a, 0.0) + x
        return cls(nbrs, [0.0] * g.n)

    @property
    def n(self) -> int:
        return len(self.nbrs)

    def modularity(self, comm) -> float:
        inside: dict[int, float] = {}
        tot: dict[int, float] = {}
        for i, nb in enumerate(self.nbrs):
            c = comm[i]
            tot[c] = tot.get(c, 0.0) + self.strength[i]
            x = self.loops[i]
            for j, w in nb.items():
                if j > i and comm[j] == c:
                    x += w
            inside[c] = inside.get(c, 0.0) + x
        m = self.m
        return sum(inside.get(c, 0.0) / m - (t / (2 * m)) ** 2 for c, t in tot.items())

    def aggregate(self, comm: list[int]) -> "Network":
        """Collapse communities (dense ids) into super-vertices."""
        k = max(comm) + 1
        nbrs: list[dict[int, float]] = [{} for _ in range(k)]
        loops = [0.0] * k
        for i, nb in enumerate(self.nbrs):
            ci = comm[i]
            loops[ci] += self.loops[i]
            for j, w in nb.items():
                cj = comm[j]
                if ci == cj:
                    if j > i:
                        loops[ci] += w
                else:
                    nbrs[ci][cj] = nbrs[ci].get(cj, 0.0) + w
        return Network(nbrs, loops)


def local_moves(net: Network, comm: list[int], order, min_gain: float = 0.0,
                max_passes: int = 1000,
                on_move: Callable[[int, int, int, float], None] | None = None) -> bool:
    """Greedy single-vertex moves, in place on ``comm``. Returns whether
    anything moved.

    ``on_move(vertex, old, new, delta_q)`` is called after every accepted
    move with the modularity change predicted by the gain formula.
    """
    m = net.m
    two_m = 2.0 * m
    tot: dict[int, float] = {}
    for i, c in enumerate(comm):
        tot[c] = tot.get(c, 0.0) + net.strength[i]
    moved_any = False
    for _ in range(max_passes):
        moved = False
        for i in order:
            ci = comm[i]
            ki = net.strength[i]
            links: dict[int, float] = {}
            for j, w in net.nbrs[i].items():
                cj = comm[j]
                links[cj] = links.get(cj, 0.0) + w
            tot[ci] -= ki
            # gain (times m) of inserting isolated i into community c
            stay = links.get(ci, 0.0) - tot[ci] * ki / two_m
            best, best_gain = ci, stay
            for c, w in links.items():
                gain = w - tot[c] * ki / two_m
                if gain > best_gain:
                    best, best_gain = c, gain
            delta = (best_gain - stay) / m
            if best != ci and delta > min_gain:
                comm[i] = best
                tot[best] = tot.get(best, 0.0) + ki
                moved = moved_any = True
                if on_move is not None:
                    on_move(i, ci, best, delta)
            else:
                tot[ci] += ki
        if not moved:
            break
    return moved_any


def _densify(comm: list[int]) -> list[int]:
    remap: dict[int, int] = {}
    return [remap.setdefault(c, len(remap)) for c in comm]


def louvain(g: Graph, cfg: LouvainConfig | None = None, weights=None) -> LouvainResult:
    cfg = cfg or LouvainConfig()
    if g.edge_count == 0:
        raise DomainError("Louvain needs at least one edge")
    net = Network.from_graph(g, weights)
    if net.m <= 0:
        raise DomainError("Louvain needs positive total edge weight")
    rng = np.random.default_rng(cfg.seed)

    membership = list(range(g.n))  # original vertex -> current super-vertex
    hierarchy: list[Partition] = []
    q_levels: list[float] = []
    q_prev = net.modularity(list(range(net.n)))
    for _ in range(cfg.max_levels):
        comm = list(range(net.n))
        order = rng.permutation(net.n).tolist()
        if not local_moves(net, comm, order, cfg.min_gain, cfg.max_passes):
            break
        comm = _densify(comm)
        q = net.modularity(comm)
        if q - q_prev <= cfg.min_gain and hierarchy:
            break
        membership = [comm[s] for s in membership]
        hierarchy.append(Partition.from_labels(np.asarray(membership)))
        q_levels.append(q)
        q_prev = q
        net = net.aggregate(comm)

    if not hierarchy:
        hierarchy.append(Partition.singletons(g.n))
        q_levels.append(q_prev)
    return LouvainResult(hierarchy[-1], hierarchy, q_levels)
