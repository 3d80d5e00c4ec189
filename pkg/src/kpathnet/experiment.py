"""Paired weighted-vs-unweighted community detection runs.

Run ``i`` of a cell uses seed ``seed_base + i`` for both the walk engine
and the detector, and the unweighted arm reuses the same detector seed, so
the two arms are paired run by run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .community import CopraConfig, LouvainConfig, copra, louvain, modularity
from .errors import ValidationError
from .graph import Graph
from .kpath import WalkConfig, werw_kpath
from .metrics import nmi, paired_ttest

ALGORITHMS = ("louvain", "copra")


def detect(g: Graph, algo: str, seed: int, weights=None, *, v_max: int = 1):
    """Crisp partition found by ``algo`` on ``g`` (optionally reweighted)."""
    if algo == "louvain":
        return louvain(g, LouvainConfig(seed=seed), weights=weights).partition
    if algo == "copra":
        return copra(g, CopraConfig(v_max=v_max, seed=seed), weights=weights).cover.crisp()
    raise ValidationError(f"unknown algorithm {algo!r}")


@dataclass
class ArmResult:
    weighted: bool
    q: list[float] = field(default_factory=list)
    nmi: list[float] = field(default_factory=list)

    @property
    def mean_q(self) -> float:
        return float(np.mean(self.q)) if self.q else math.nan

    @property
    def mean_nmi(self) -> float:
        return float(np.mean(self.nmi)) if self.nmi else math.nan


@dataclass
class CellResult:
    algo: str
    unweighted: ArmResult
    weighted: ArmResult

    @property
    def ttest_p(self) -> float:
        """Paired t-test on NMI between the arms."""
        if len(self.weighted.nmi) < 2:
            return math.nan
        return paired_ttest(self.weighted.nmi, self.unweighted.nmi)

    @property
    def ttest_p_q(self) -> float:
        if len(self.weighted.q) < 2:
            return math.nan
        return paired_ttest(self.weighted.q, self.unweighted.q)


def run_cell(g: Graph, truth, algo: str, runs: int = 10, seed_base: int = 0,
             kappa: int = 20) -> CellResult:
    """Both arms of one (benchmark, algorithm) cell.

    Q is measured on the unit-weight topology in both arms so the values
    are comparable; the centrality weights only steer the detector.
    """
    if runs < 1:
        raise ValidationError("runs must be >= 1")
    if algo not in ALGORITHMS:
        raise ValidationError(f"unknown algorithm {algo!r}")
    unit = np.ones(g.edge_count)
    plain, weighted = ArmResult(False), ArmResult(True)
    for i in range(runs):
        seed = seed_base + i
        p = detect(g, algo, seed, weights=unit)
        plain.q.append(modularity(g, p, weights=unit))
        plain.nmi.append(nmi(p, truth))

        c = werw_kpath(g, WalkConfig(kappa=kappa, seed=seed))
        p = detect(g, algo, seed, weights=c.estimate)
        weighted.q.append(modularity(g, p, weights=unit))
        weighted.nmi.append(nmi(p, truth))
    return CellResult(algo, plain, weighted)
