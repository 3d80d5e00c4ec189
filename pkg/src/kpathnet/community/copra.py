"""COPRA-style overlapping label propagation.

Every vertex carries ``{community: belonging}`` pairs summing to one.
Updates are synchronous: a vertex's new label is the edge-weighted mean
of its neighbours' previous labels, pruned at ``1 / v_max``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, ValidationError
from ..graph import Graph
from .partition import CoverPartition

_EPS = 1e-12


@dataclass(frozen=True)
class CopraConfig:
    v_max: int = 1
    max_iterations: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.v_max < 1:
            raise ValidationError("v_max must be >= 1")
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be >= 1")


@dataclass
class CopraResult:
    cover: CoverPartition
    iterations: int
    converged: bool


def _update(old, incident, rng, threshold):
    acc: dict[int, float] = {}
    total = sum(w for _, w in incident)
    if total <= 0:
        incident = [(j, 1.0) for j, _ in incident]
        total = float(len(incident))
    for j, w in incident:
        for c, b in old[j].items():
            acc[c] = acc.get(c, 0.0) + w * b / total
    kept = {c: b for c, b in acc.items() if b >= threshold - _EPS}
    if not kept:
        top = max(acc.values())
        ties = sorted(c for c, b in acc.items() if b >= top - _EPS)
        pick = ties[int(rng.integers(len(ties)))] if len(ties) > 1 else ties[0]
        kept = {pick: 1.0}
    s = sum(kept.values())
    return {c: b / s for c, b in kept.items()}


def copra(g: Graph, cfg: CopraConfig | None = None, weights=None) -> CopraResult:
    cfg = cfg or CopraConfig()
    if g.n == 0:
        raise DomainError("COPRA needs a non-empty graph")
    w = g.weight if weights is None else np.asarray(weights, dtype=np.float64)
    rng = np.random.default_rng(cfg.seed)
    threshold = 1.0 / cfg.v_max
    incident = [[(j, float(w[e])) for e, j in g.incident(v)] for v in range(g.n)]

    labels: list[dict[int, float]] = [{v: 1.0} for v in range(g.n)]
    converged = False
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        new = [_update(labels, inc, rng, threshold) if inc else labels[v]
               for v, inc in enumerate(incident)]
        same = all(a.keys() == b.keys() for a, b in zip(labels, new))
        labels = new
        if same:
            converged = True
            break
    return CopraResult(CoverPartition(tuple(labels)), it, converged)
