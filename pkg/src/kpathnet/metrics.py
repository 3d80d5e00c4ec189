"""Partition agreement, correlation and centrality-distribution measures."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .community.partition import CoverPartition, Partition
from .errors import DomainError, ValidationError


def _labels(p) -> np.ndarray:
    if isinstance(p, CoverPartition):
        p = p.crisp()
    if isinstance(p, Partition):
        return p.assignment
    return np.asarray(p)


def confusion_matrix(a, b) -> np.ndarray:
    """Counts ``N[i, j]`` of vertices in community ``i`` of ``a`` and ``j`` of ``b``."""
    la, lb = _labels(a), _labels(b)
    if la.shape != lb.shape:
        raise DomainError(f"partitions cover different vertex sets ({len(la)} vs {len(lb)})")
    _, ia = np.unique(la, return_inverse=True)
    _, ib = np.unique(lb, return_inverse=True)
    cm = np.zeros((ia.max() + 1 if len(ia) else 0, ib.max() + 1 if len(ib) else 0), dtype=np.int64)
    np.add.at(cm, (ia, ib), 1)
    return cm


def nmi(a, b) -> float:
    """Danon normalised mutual information of two crisp partitions.

    Overlapping covers are projected onto their strongest membership. When
    both partitions are a single community the ratio is 0/0; it is taken as
    1 if they are identical and 0 otherwise.
    """
    cm = confusion_matrix(a, b).astype(np.float64)
    n = cm.sum()
    if n == 0:
        raise DomainError("partitions are empty")
    rows, cols = cm.sum(axis=1), cm.sum(axis=0)
    nz = cm > 0
    if np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1):
        return 1.0  # same partition up to relabelling; skip the rounding
    outer = np.outer(rows, cols)
    num = -2.0 * np.sum(cm[nz] * np.log(cm[nz] * n / outer[nz]))
    den = np.sum(rows * np.log(rows / n)) + np.sum(cols * np.log(cols / n))
    if den == 0.0:
        return 1.0 if cm.shape == (1, 1) else 0.0
    value = num / den
    return float(min(1.0, max(0.0, value)))


def _check_pair(x, y, allow_constant=False):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or x.shape != y.shape:
        raise DomainError("inputs must be 1-d vectors of equal length")
    if len(x) < 2:
        raise DomainError("need at least two observations")
    if not allow_constant and (np.all(x == x[0]) or np.all(y == y[0])):
        raise DomainError("correlation undefined for a constant vector")
    return x, y


def pearson(x, y) -> float:
    x, y = _check_pair(x, y)
    dx, dy = x - x.mean(), y - y.mean()
    r = float(np.dot(dx, dy) / math.sqrt(np.dot(dx, dx) * np.dot(dy, dy)))
    return max(-1.0, min(1.0, r))


def rank(x) -> np.ndarray:
    """1-based ranks, ties sharing their average rank."""
    return stats.rankdata(np.asarray(x, dtype=np.float64), method="average")


def spearman(x, y) -> float:
    x, y = _check_pair(x, y)
    return pearson(rank(x), rank(y))


def _discordance_parts(x, y):
    n = len(x)
    pairs = n * (n - 1) // 2

    def tied(v):
        _, counts = np.unique(v, return_counts=True)
        return int(np.sum(counts * (counts - 1) // 2))

    return pairs, tied(x), tied(y)


def kendall_tau(x, y) -> float:
    """Kendall tau-a: (concordant - discordant) / (n choose 2).

    Pairs tied in either vector count as neither concordant nor discordant.
    The concordance count comes from scipy's O(n log n) tau-b, rescaled to
    the tau-a denominator.
    """
    x, y = _check_pair(x, y, allow_constant=True)
    pairs, tx, ty = _discordance_parts(x, y)
    if tx == pairs or ty == pairs:
        return 0.0
    tau_b = stats.kendalltau(x, y, variant="b").statistic
    c_minus_d = tau_b * math.sqrt((pairs - tx) * (pairs - ty))
    return float(max(-1.0, min(1.0, c_minus_d / pairs)))


@dataclass(frozen=True)
class CorrelationReport:
    pearson: float
    spearman: float
    kendall: float
    n: int
    p_pearson: float
    p_spearman: float
    p_kendall: float

    def as_dict(self) -> dict:
        return {
            "pearson": self.pearson, "spearman": self.spearman, "kendall": self.kendall,
            "n": self.n,
            "p_values": {"pearson": self.p_pearson, "spearman": self.p_spearman,
                         "kendall": self.p_kendall},
        }


def correlation_report(x, y) -> CorrelationReport:
    """All three coefficients with two-sided asymptotic p-values.

    The Kendall p-value is scipy's tau-b test, which shares its numerator
    with tau-a.
    """
    x, y = _check_pair(x, y)
    return CorrelationReport(
        pearson(x, y), spearman(x, y), kendall_tau(x, y), len(x),
        float(stats.pearsonr(x, y).pvalue),
        float(stats.spearmanr(x, y).pvalue),
        float(stats.kendalltau(x, y, variant="b").pvalue),
    )


@dataclass(frozen=True)
class CentralitySummary:
    bin_edges: np.ndarray
    probability: np.ndarray
    ranked: np.ndarray  # estimates sorted in descending order

    def nonempty_bins(self) -> list[tuple[float, float]]:
        """``(bin centre, probability)`` for occupied bins."""
        centres = np.sqrt(self.bin_edges[:-1] * self.bin_edges[1:])
        keep = self.probability > 0
        return list(zip(centres[keep].tolist(), self.probability[keep].tolist()))


def centrality_summary(centrality, bins: int = 30) -> CentralitySummary:
    """Log-binned histogram of positive estimates plus the rank-ordered values.

    Zero estimates (edges never walked) fall outside any log bin, so the
    probabilities are over positive values only.
    """
    if bins < 1:
        raise ValidationError("bins must be >= 1")
    est = np.asarray(getattr(centrality, "estimate", centrality), dtype=np.float64)
    if est.size == 0:
        raise DomainError("empty centrality map")
    ranked = np.sort(est)[::-1]
    pos = est[est > 0]
    if pos.size == 0:
        return CentralitySummary(np.array([0.0, 0.0]), np.array([0.0]), ranked)
    lo, hi = pos.min(), pos.max()
    if lo == hi:
        edges = np.array([lo, hi])
        prob = np.array([1.0])
    else:
        edges = np.geomspace(lo, hi, bins + 1)
        counts, _ = np.histogram(pos, bins=edges)
        prob = counts / pos.size
    return CentralitySummary(edges, prob, ranked)


def paired_ttest(a, b) -> float:
    """Two-sided p-value of a paired t-test; 1.0 when the differences are all equal."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.size < 2:
        raise DomainError("paired t-test needs two equal-length samples of size >= 2")
    d = a - b
    if np.all(d == d[0]):
        return 1.0 if d[0] == 0 else 0.0
    return float(stats.ttest_rel(a, b).pvalue)
