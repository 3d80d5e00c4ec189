from __future__ import annotations

import numpy as np

from ..errors import DomainError
from ..graph import Graph
from .partition import Partition


def modularity(g: Graph, p: Partition | np.ndarray, weights=None) -> float:
    """Weighted modularity ``sum_c [ l_c/m - (d_c/2m)^2 ]``.

    ``l_c`` is the edge weight inside community ``c``, ``d_c`` the summed
    strength of its vertices and ``m`` the total edge weight. ``weights``
    overrides the graph's own weights.
    """
    labels = p.assignment if isinstance(p, Partition) else np.asarray(p)
    if len(labels) != g.n:
        raise DomainError(f"partition covers {len(labels)} vertices, graph has {g.n}")
    w = g.weight if weights is None else np.asarray(weights, dtype=np.float64)
    m = float(w.sum())
    if g.edge_count == 0 or m <= 0:
        raise DomainError("modularity is undefined for a graph without edge weight")
    labels = np.asarray(labels, dtype=np.int64)
    _, dense = np.unique(labels, return_inverse=True)
    k = int(dense.max()) + 1
    cu, cv = dense[g.src], dense[g.dst]
    inside = np.bincount(cu[cu == cv], weights=w[cu == cv], minlength=k)
    d = np.bincount(cu, weights=w, minlength=k) + np.bincount(cv, weights=w, minlength=k)
    return float(np.sum(inside / m - (d / (2 * m)) ** 2))


def q_gain_percent(before: float, after: float) -> float:
    """Relative change in percent, as in ``0.423 -> 0.445`` is ``+5.2``."""
    if before == 0:
        raise DomainError("relative gain undefined for a zero baseline")
    return (after - before) / abs(before) * 100.0
